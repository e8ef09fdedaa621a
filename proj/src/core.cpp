#include "ctlrp/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ctlrp {

double euclidean(const Point &a, const Point &b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

Instance::Instance(std::vector<Depot> depots, std::vector<Facility> facilities,
                   std::vector<Customer> customers, int vehicle_count, double vehicle_capacity,
                   std::optional<std::vector<std::vector<double>>> travel_cost)
    : depots_(std::move(depots)),
      facilities_(std::move(facilities)),
      customers_(std::move(customers)),
      vehicle_count_(vehicle_count),
      vehicle_capacity_(vehicle_capacity) {
    if (depots_.empty()) throw InstanceError("instance has no depots");
    if (facilities_.empty()) throw InstanceError("instance has no facilities");
    if (vehicle_count_ < 1) throw InstanceError("vehicle count must be >= 1");
    if (!(vehicle_capacity_ > 0)) throw InstanceError("vehicle capacity must be > 0");
    for (const auto &d : depots_)
        if (!(d.capacity > 0)) throw InstanceError("depot capacity must be > 0");
    for (const auto &f : facilities_)
        if (!(f.capacity > 0)) throw InstanceError("facility capacity must be > 0");

    const int n = num_nodes();
    cost_.assign(static_cast<std::size_t>(n) * n, 0.0);
    has_explicit_costs_ = travel_cost.has_value();
    if (travel_cost.has_value()) {
        const auto &m = *travel_cost;
        if (static_cast<int>(m.size()) != n)
            throw InstanceError("travel cost matrix has wrong dimension");
        for (int a = 0; a < n; ++a) {
            if (static_cast<int>(m[a].size()) != n)
                throw InstanceError("travel cost matrix has wrong dimension");
            for (int b = 0; b < n; ++b) {
                const double c = m[a][b];
                if (!(c >= 0.0)) throw InstanceError("travel costs must be nonnegative");
                if (std::abs(c - m[b][a]) > kCostTolerance)
                    throw InstanceError("travel costs must be symmetric");
                if (a == b && c != 0.0) throw InstanceError("self travel cost must be zero");
                cost_[static_cast<std::size_t>(a) * n + b] = c;
            }
        }
    } else {
        auto location = [&](int node) -> const Point & {
            return node < num_depots() ? depots_[static_cast<std::size_t>(node)].location
                                       : facilities_[static_cast<std::size_t>(node - num_depots())].location;
        };
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                const double c = euclidean(location(a), location(b));
                cost_[static_cast<std::size_t>(a) * n + b] = c;
                cost_[static_cast<std::size_t>(b) * n + a] = c;
            }
    }

    coverable_by_.assign(facilities_.size(), {});
    fixed_facility_.assign(facilities_.size(), false);
    for (std::size_t c = 0; c < customers_.size(); ++c) {
        auto &cust = customers_[c];
        if (cust.demand < 0) throw InstanceError("customer demand must be nonnegative");
        if (cust.coverage.empty())
            throw InstanceError("customer " + std::to_string(cust.id) + " has empty coverage set");
        std::sort(cust.coverage.begin(), cust.coverage.end());
        cust.coverage.erase(std::unique(cust.coverage.begin(), cust.coverage.end()), cust.coverage.end());
        for (int f : cust.coverage) {
            if (f < 0 || f >= num_facilities())
                throw InstanceError("customer " + std::to_string(cust.id) + " covers unknown facility");
            coverable_by_[static_cast<std::size_t>(f)].push_back(static_cast<int>(c));
        }
        if (cust.coverage.size() == 1)
            fixed_facility_[static_cast<std::size_t>(cust.coverage.front())] = true;
        total_demand_ += cust.demand;
    }

    std::vector<std::set<int>> neighbors(facilities_.size());
    for (const auto &cust : customers_)
        for (int f : cust.coverage)
            for (int g : cust.coverage)
                if (f != g) neighbors[static_cast<std::size_t>(f)].insert(g);
    facility_neighbors_.reserve(neighbors.size());
    for (auto &s : neighbors) facility_neighbors_.emplace_back(s.begin(), s.end());
}

double route_cost(const Instance &inst, const Route &route) {
    if (route.stops.empty()) return 0.0;
    double cost = inst.cost_depot_facility(route.depot, route.stops.front());
    for (std::size_t k = 0; k + 1 < route.stops.size(); ++k)
        cost += inst.cost_facility_facility(route.stops[k], route.stops[k + 1]);
    cost += inst.cost_depot_facility(route.depot, route.stops.back());
    return cost;
}

namespace {

void check_structure(const Instance &inst, const Solution &sol) {
    for (const auto &route : sol.routes) {
        if (route.depot < 0 || route.depot >= inst.num_depots())
            throw InstanceError("solution references unknown depot");
        for (int f : route.stops)
            if (f < 0 || f >= inst.num_facilities())
                throw InstanceError("solution references unknown facility");
    }
    if (static_cast<int>(sol.assignment.size()) != inst.num_customers())
        throw InstanceError("assignment must cover every customer");
    for (int f : sol.assignment)
        if (f < 0 || f >= inst.num_facilities())
            throw InstanceError("assignment references unknown facility");
}

} // namespace

CostBreakdown evaluate(const Instance &inst, const Solution &sol) {
    check_structure(inst, sol);
    CostBreakdown out;
    std::vector<bool> depot_used(static_cast<std::size_t>(inst.num_depots()), false);
    for (const auto &route : sol.routes) {
        out.routing_cost += route_cost(inst, route);
        if (!route.stops.empty()) depot_used[static_cast<std::size_t>(route.depot)] = true;
    }
    for (int d = 0; d < inst.num_depots(); ++d)
        if (depot_used[static_cast<std::size_t>(d)]) out.depot_cost += inst.depot(d).selection_cost;
    out.total = out.routing_cost + out.depot_cost;
    return out;
}

std::int64_t facility_load(const Instance &inst, const Solution &sol, int f) {
    std::int64_t load = 0;
    for (int c = 0; c < inst.num_customers(); ++c)
        if (sol.assignment[static_cast<std::size_t>(c)] == f) load += inst.customer(c).demand;
    return load;
}

std::int64_t route_demand(const Instance &inst, const Solution &sol, const Route &route) {
    std::vector<std::int64_t> loads(static_cast<std::size_t>(inst.num_facilities()), 0);
    for (int c = 0; c < inst.num_customers(); ++c)
        loads[static_cast<std::size_t>(sol.assignment[static_cast<std::size_t>(c)])] += inst.customer(c).demand;
    std::int64_t total = 0;
    for (int f : route.stops) total += loads[static_cast<std::size_t>(f)];
    return total;
}

std::vector<std::int64_t> route_loads(const Instance &inst, const Solution &sol, const Route &route) {
    check_structure(inst, sol);
    std::vector<std::int64_t> per_facility(static_cast<std::size_t>(inst.num_facilities()), 0);
    for (int c = 0; c < inst.num_customers(); ++c)
        per_facility[static_cast<std::size_t>(sol.assignment[static_cast<std::size_t>(c)])] +=
            inst.customer(c).demand;
    std::vector<std::int64_t> loads;
    if (route.stops.empty()) return loads;
    loads.reserve(route.stops.size() + 1);
    std::int64_t carried = 0;
    for (int f : route.stops) carried += per_facility[static_cast<std::size_t>(f)];
    loads.push_back(carried);
    for (int f : route.stops) {
        carried -= per_facility[static_cast<std::size_t>(f)];
        loads.push_back(carried);
    }
    return loads;
}

const char *rule_name(Rule rule) {
    switch (rule) {
    case Rule::route_count: return "route-count";
    case Rule::unknown_facility: return "unknown-facility";
    case Rule::repeated_stop: return "repeated-stop";
    case Rule::facility_multiply_routed: return "facility-multiply-routed";
    case Rule::empty_route: return "empty-route";
    case Rule::assignment_out_of_range: return "assignment-out-of-range";
    case Rule::coverage: return "coverage";
    case Rule::unrouted_assigned_facility: return "unrouted-assigned-facility";
    case Rule::routed_unassigned_facility: return "routed-unassigned-facility";
    case Rule::vehicle_capacity: return "vehicle-capacity";
    case Rule::facility_capacity: return "facility-capacity";
    case Rule::depot_capacity: return "depot-capacity";
    }
    return "unknown";
}

LoadTable LoadTable::build(const Instance &inst, const Solution &sol) {
    LoadTable t;
    t.facility.assign(static_cast<std::size_t>(inst.num_facilities()), 0);
    t.route.assign(sol.routes.size(), 0);
    t.depot.assign(static_cast<std::size_t>(inst.num_depots()), 0);
    for (int c = 0; c < inst.num_customers(); ++c)
        t.facility[static_cast<std::size_t>(sol.assignment[static_cast<std::size_t>(c)])] +=
            inst.customer(c).demand;
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        for (int f : sol.routes[r].stops) t.route[r] += t.facility[static_cast<std::size_t>(f)];
        t.depot[static_cast<std::size_t>(sol.routes[r].depot)] += t.route[r];
    }
    return t;
}

std::vector<Violation> validate(const Instance &inst, const Solution &sol, ValidateMode mode) {
    std::vector<Violation> out;
    auto add = [&](Rule rule, int entity, int other, std::string detail) {
        out.push_back(Violation{rule, entity, other, std::move(detail)});
    };

    if (static_cast<int>(sol.routes.size()) != inst.vehicle_count())
        add(Rule::route_count, static_cast<int>(sol.routes.size()), inst.vehicle_count(),
            "solution must contain exactly M routes");

    std::vector<int> route_of(static_cast<std::size_t>(inst.num_facilities()), -1);
    bool structure_ok = true;
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        const auto &route = sol.routes[r];
        if (route.depot < 0 || route.depot >= inst.num_depots()) {
            add(Rule::unknown_facility, static_cast<int>(r), route.depot, "route anchored at unknown depot");
            structure_ok = false;
            continue;
        }
        if (route.stops.empty() && mode == ValidateMode::strict)
            add(Rule::empty_route, static_cast<int>(r), route.depot, "empty route in strict mode");
        std::vector<bool> seen(static_cast<std::size_t>(inst.num_facilities()), false);
        for (int f : route.stops) {
            if (f < 0 || f >= inst.num_facilities()) {
                add(Rule::unknown_facility, static_cast<int>(r), f, "route visits unknown facility");
                structure_ok = false;
                continue;
            }
            if (seen[static_cast<std::size_t>(f)]) {
                add(Rule::repeated_stop, static_cast<int>(r), f, "facility repeated within route");
                continue;
            }
            seen[static_cast<std::size_t>(f)] = true;
            if (route_of[static_cast<std::size_t>(f)] >= 0)
                add(Rule::facility_multiply_routed, f, static_cast<int>(r),
                    "facility appears in more than one route");
            else
                route_of[static_cast<std::size_t>(f)] = static_cast<int>(r);
        }
    }

    std::vector<std::int64_t> fac_load(static_cast<std::size_t>(inst.num_facilities()), 0);
    if (static_cast<int>(sol.assignment.size()) != inst.num_customers()) {
        add(Rule::assignment_out_of_range, static_cast<int>(sol.assignment.size()), inst.num_customers(),
            "assignment must map every customer");
        structure_ok = false;
    } else {
        for (int c = 0; c < inst.num_customers(); ++c) {
            const int f = sol.assignment[static_cast<std::size_t>(c)];
            if (f < 0 || f >= inst.num_facilities()) {
                add(Rule::assignment_out_of_range, c, f, "customer assigned to unknown facility");
                structure_ok = false;
                continue;
            }
            const auto &cov = inst.customer(c).coverage;
            if (!std::binary_search(cov.begin(), cov.end(), f))
                add(Rule::coverage, c, f, "assigned facility not in customer coverage set");
            fac_load[static_cast<std::size_t>(f)] += inst.customer(c).demand;
        }
    }

    if (!structure_ok) return out;

    for (int f = 0; f < inst.num_facilities(); ++f) {
        const bool routed = route_of[static_cast<std::size_t>(f)] >= 0;
        const bool used = fac_load[static_cast<std::size_t>(f)] > 0 ||
                          std::any_of(sol.assignment.begin(), sol.assignment.end(),
                                      [f](int g) { return g == f; });
        if (used && !routed)
            add(Rule::unrouted_assigned_facility, f, -1, "facility has customers but is not routed");
        if (routed && !used)
            add(Rule::routed_unassigned_facility, f, route_of[static_cast<std::size_t>(f)],
                "routed facility has no assigned customer");
        if (static_cast<double>(fac_load[static_cast<std::size_t>(f)]) > inst.facility(f).capacity)
            add(Rule::facility_capacity, f, -1, "assigned demand exceeds facility capacity");
    }

    std::vector<std::int64_t> depot_load(static_cast<std::size_t>(inst.num_depots()), 0);
    for (std::size_t r = 0; r < sol.routes.size(); ++r) {
        const auto &route = sol.routes[r];
        std::int64_t demand = 0;
        for (int f : route.stops) demand += fac_load[static_cast<std::size_t>(f)];
        if (static_cast<double>(demand) > inst.vehicle_capacity())
            add(Rule::vehicle_capacity, static_cast<int>(r), -1, "route demand exceeds vehicle capacity");
        depot_load[static_cast<std::size_t>(route.depot)] += demand;
    }
    for (int d = 0; d < inst.num_depots(); ++d)
        if (static_cast<double>(depot_load[static_cast<std::size_t>(d)]) > inst.depot(d).capacity)
            add(Rule::depot_capacity, d, -1, "depot demand exceeds depot capacity");

    return out;
}

} // namespace ctlrp
