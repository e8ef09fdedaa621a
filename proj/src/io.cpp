#include "ctlrp/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace ctlrp {

namespace {

using nlohmann::json;
constexpr int kSchemaVersion = 1;

json to_number(double v) {
    // Keep integral values integral so files stay stable and diffable.
    if (v == static_cast<double>(static_cast<std::int64_t>(v)))
        return json(static_cast<std::int64_t>(v));
    return json(v);
}

const json &require(const json &j, const char *key) {
    auto it = j.find(key);
    if (it == j.end()) throw IoError(std::string("missing field '") + key + "'");
    return *it;
}

} // namespace

Instance read_instance_json(std::istream &in) {
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw IoError(std::string("invalid instance JSON: ") + e.what());
    }
    try {
        std::vector<Depot> depots;
        for (const auto &jd : require(j, "depots")) {
            Depot d;
            d.id = require(jd, "id").get<int>();
            d.selection_cost = require(jd, "cost").get<double>();
            d.capacity = require(jd, "capacity").get<double>();
            if (jd.contains("x")) d.location = Point{jd["x"].get<double>(), jd["y"].get<double>()};
            depots.push_back(d);
        }
        std::vector<Facility> facilities;
        std::map<int, int> facility_index;
        for (const auto &jf : require(j, "facilities")) {
            Facility f;
            f.id = require(jf, "id").get<int>();
            f.capacity = require(jf, "capacity").get<double>();
            if (jf.contains("x")) f.location = Point{jf["x"].get<double>(), jf["y"].get<double>()};
            if (!facility_index.emplace(f.id, static_cast<int>(facilities.size())).second)
                throw IoError("duplicate facility id " + std::to_string(f.id));
            facilities.push_back(f);
        }
        std::vector<Customer> customers;
        for (const auto &jc : require(j, "customers")) {
            Customer c;
            c.id = require(jc, "id").get<int>();
            c.demand = require(jc, "demand").get<std::int64_t>();
            if (jc.contains("x")) c.location = Point{jc["x"].get<double>(), jc["y"].get<double>()};
            for (const auto &fid : require(jc, "coverage")) {
                auto it = facility_index.find(fid.get<int>());
                if (it == facility_index.end())
                    throw IoError("customer " + std::to_string(c.id) + " covers unknown facility id");
                c.coverage.push_back(it->second);
            }
            customers.push_back(c);
        }
        const int m = require(j, "vehicle_count").get<int>();
        const double q = require(j, "vehicle_capacity").get<double>();

        std::optional<std::vector<std::vector<double>>> cost;
        if (j.contains("travel_cost")) {
            const auto &jt = j["travel_cost"];
            cost = require(jt, "matrix").get<std::vector<std::vector<double>>>();
        }
        return Instance(std::move(depots), std::move(facilities), std::move(customers), m, q,
                        std::move(cost));
    } catch (const json::exception &e) {
        throw IoError(std::string("invalid instance JSON: ") + e.what());
    } catch (const InstanceError &e) {
        throw IoError(std::string("invalid instance: ") + e.what());
    }
}

void write_instance_json(std::ostream &out, const Instance &inst) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["vehicle_count"] = inst.vehicle_count();
    j["vehicle_capacity"] = to_number(inst.vehicle_capacity());
    auto &jd = j["depots"] = json::array();
    for (const auto &d : inst.depots()) {
        json e{{"id", d.id}, {"cost", to_number(d.selection_cost)}, {"capacity", to_number(d.capacity)}};
        e["x"] = d.location.x;
        e["y"] = d.location.y;
        jd.push_back(std::move(e));
    }
    auto &jf = j["facilities"] = json::array();
    for (const auto &f : inst.facilities()) {
        json e{{"id", f.id}, {"capacity", to_number(f.capacity)}};
        e["x"] = f.location.x;
        e["y"] = f.location.y;
        jf.push_back(std::move(e));
    }
    auto &jc = j["customers"] = json::array();
    for (const auto &c : inst.customers()) {
        json e{{"id", c.id}, {"demand", c.demand}};
        e["x"] = c.location.x;
        e["y"] = c.location.y;
        auto &cov = e["coverage"] = json::array();
        for (int f : c.coverage) cov.push_back(inst.facility(f).id);
        jc.push_back(std::move(e));
    }
    if (inst.has_explicit_costs()) {
        auto &matrix = j["travel_cost"]["matrix"] = json::array();
        for (int a = 0; a < inst.num_nodes(); ++a) {
            json row = json::array();
            for (int b = 0; b < inst.num_nodes(); ++b) row.push_back(inst.node_cost(a, b));
            matrix.push_back(std::move(row));
        }
    }
    out << j.dump(2) << '\n';
}

Solution read_solution_json(std::istream &in, const Instance &inst) {
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw IoError(std::string("invalid solution JSON: ") + e.what());
    }
    std::map<int, int> facility_index;
    for (int f = 0; f < inst.num_facilities(); ++f) facility_index[inst.facility(f).id] = f;
    std::map<int, int> depot_index;
    for (int d = 0; d < inst.num_depots(); ++d) depot_index[inst.depot(d).id] = d;
    std::map<int, int> customer_index;
    for (int c = 0; c < inst.num_customers(); ++c) customer_index[inst.customer(c).id] = c;

    try {
        Solution sol;
        for (const auto &jr : require(j, "routes")) {
            Route r;
            auto dit = depot_index.find(require(jr, "depot").get<int>());
            if (dit == depot_index.end()) throw IoError("route references unknown depot id");
            r.depot = dit->second;
            for (const auto &fid : require(jr, "stops")) {
                auto fit = facility_index.find(fid.get<int>());
                if (fit == facility_index.end()) throw IoError("route visits unknown facility id");
                r.stops.push_back(fit->second);
            }
            sol.routes.push_back(std::move(r));
        }
        sol.assignment.assign(static_cast<std::size_t>(inst.num_customers()), -1);
        for (const auto &[key, value] : require(j, "assignment").items()) {
            auto cit = customer_index.find(std::stoi(key));
            if (cit == customer_index.end()) throw IoError("assignment references unknown customer id");
            auto fit = facility_index.find(value.get<int>());
            if (fit == facility_index.end()) throw IoError("assignment references unknown facility id");
            sol.assignment[static_cast<std::size_t>(cit->second)] = fit->second;
        }
        for (std::size_t c = 0; c < sol.assignment.size(); ++c)
            if (sol.assignment[c] < 0)
                throw IoError("assignment missing customer id " +
                              std::to_string(inst.customer(static_cast<int>(c)).id));
        return sol;
    } catch (const json::exception &e) {
        throw IoError(std::string("invalid solution JSON: ") + e.what());
    }
}

void write_solution_json(std::ostream &out, const Instance &inst, const Solution &sol) {
    json j;
    j["schema_version"] = kSchemaVersion;
    auto &jr = j["routes"] = json::array();
    for (const auto &r : sol.routes) {
        json e{{"depot", inst.depot(r.depot).id}};
        auto &stops = e["stops"] = json::array();
        for (int f : r.stops) stops.push_back(inst.facility(f).id);
        jr.push_back(std::move(e));
    }
    auto &ja = j["assignment"] = json::object();
    for (int c = 0; c < inst.num_customers(); ++c)
        ja[std::to_string(inst.customer(c).id)] = inst.facility(sol.assignment[static_cast<std::size_t>(c)]).id;
    out << j.dump(2) << '\n';
}

Instance load_instance(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open instance file: " + path);
    return read_instance_json(in);
}

void save_instance(const std::string &path, const Instance &inst) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write instance file: " + path);
    write_instance_json(out, inst);
}

Solution load_solution(const std::string &path, const Instance &inst) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open solution file: " + path);
    return read_solution_json(in, inst);
}

void save_solution(const std::string &path, const Instance &inst, const Solution &sol) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write solution file: " + path);
    write_solution_json(out, inst, sol);
}

} // namespace ctlrp
