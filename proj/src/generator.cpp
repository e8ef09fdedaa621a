#include "ctlrp/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ctlrp {

namespace {

double next_number(std::istream &in, const char *what) {
    double v;
    if (!(in >> v)) throw LrpParseError(std::string("unexpected end of file while reading ") + what);
    return v;
}

} // namespace

LrpSource parse_lrp(std::istream &in) {
    LrpSource src;
    const int n = static_cast<int>(next_number(in, "facility count"));
    const int m = static_cast<int>(next_number(in, "depot count"));
    if (n <= 0 || m <= 0) throw LrpParseError("facility and depot counts must be positive");
    for (int d = 0; d < m; ++d) {
        const double x = next_number(in, "depot x");
        const double y = next_number(in, "depot y");
        src.depot_locations.push_back(Point{x, y});
    }
    for (int f = 0; f < n; ++f) {
        const double x = next_number(in, "facility x");
        const double y = next_number(in, "facility y");
        src.facility_locations.push_back(Point{x, y});
    }
    src.vehicle_capacity = next_number(in, "vehicle capacity");
    if (!(src.vehicle_capacity > 0)) throw LrpParseError("vehicle capacity must be positive");
    for (int d = 0; d < m; ++d) src.depot_capacities.push_back(next_number(in, "depot capacity"));
    for (int f = 0; f < n; ++f) {
        const double q = next_number(in, "facility demand");
        if (q < 0 || q != std::floor(q)) throw LrpParseError("facility demands must be nonnegative integers");
        src.facility_demands.push_back(static_cast<std::int64_t>(q));
    }
    for (int d = 0; d < m; ++d) src.depot_costs.push_back(next_number(in, "depot opening cost"));
    // Route opening cost and the integer-cost flag close the file; scenarios
    // here are Euclidean, so both are parsed and ignored.
    next_number(in, "route opening cost");
    const double flag = next_number(in, "cost type flag");
    if (flag != 0.0 && flag != 1.0) throw LrpParseError("cost type flag must be 0 or 1");
    return src;
}

LrpSource load_lrp(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw LrpParseError("cannot open LRP file: " + path);
    return parse_lrp(in);
}

FleetPlan plan_fleet(std::int64_t total_demand, double vehicle_capacity, double slack) {
    FleetPlan plan;
    if (slack == 1.2 && vehicle_capacity == std::floor(vehicle_capacity)) {
        // ceil(1.2 q / Q) = ceil(6q / 5Q), evaluated in integers so a binary
        // representation of 1.2 cannot tip the ceiling.
        const std::int64_t num = 6 * total_demand;
        const std::int64_t den = 5 * static_cast<std::int64_t>(vehicle_capacity);
        plan.vehicles = static_cast<int>((num + den - 1) / den);
    } else {
        plan.vehicles = static_cast<int>(
            std::ceil(slack * static_cast<double>(total_demand) / vehicle_capacity - 1e-9));
    }
    plan.vehicles = std::max(plan.vehicles, 1);
    plan.vehicles_rescaled = std::max(2, (plan.vehicles + 2) / 3);
    plan.capacity_rescaled = vehicle_capacity * plan.vehicles / plan.vehicles_rescaled;
    return plan;
}

std::vector<int> coverage_set(const std::vector<Point> &facility_locations, const Point &customer,
                              double alpha) {
    std::vector<int> out;
    for (std::size_t f = 0; f < facility_locations.size(); ++f)
        if (euclidean(facility_locations[f], customer) <= alpha) out.push_back(static_cast<int>(f));
    return out;
}

GenerateOutput generate(const LrpSource &src, const GeneratorConfig &cfg) {
    GenerateOutput out;
    const int n_fac = static_cast<int>(src.facility_locations.size());
    const int n_dep = static_cast<int>(src.depot_locations.size());
    if (n_fac == 0 || n_dep == 0) throw LrpParseError("source has no facilities or depots");
    if (cfg.alpha_index != 1 && cfg.alpha_index != 2)
        throw LrpParseError("alpha index must be 1 or 2");

    const int n_cust = std::min(cfg.customer_multiplier * n_fac, cfg.customer_cap);

    double min_x = src.facility_locations[0].x, max_x = min_x;
    double min_y = src.facility_locations[0].y, max_y = min_y;
    for (const auto &p : src.facility_locations) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const double diagonal = euclidean(Point{min_x, min_y}, Point{max_x, max_y});
    const double alpha1 = cfg.alpha_factors[0] * diagonal;
    const double alpha2 = cfg.alpha_factors[1] * diagonal;
    const double alpha = cfg.alpha_index == 1 ? alpha1 : alpha2;

    Rng rng(cfg.seed);

    // Locations are resampled until the customer is coverable under both
    // radii, so the same seed yields the same placements for both variants
    // and the wider variant's coverage sets contain the narrower one's.
    std::vector<Point> locations;
    locations.reserve(static_cast<std::size_t>(n_cust));
    for (int c = 0; c < n_cust; ++c) {
        std::int64_t attempts = 0;
        while (true) {
            if (++attempts > cfg.resample_limit) {
                out.status = GenerateStatus::resample_limit_exceeded;
                out.detail = "customer " + std::to_string(c) + " exceeded the resampling budget; " +
                             "no location is coverable under both radii";
                return out;
            }
            const Point p{uniform_real(rng, min_x, max_x), uniform_real(rng, min_y, max_y)};
            bool ok1 = false, ok2 = false;
            for (const auto &fp : src.facility_locations) {
                const double dist = euclidean(fp, p);
                ok1 = ok1 || dist <= alpha1;
                ok2 = ok2 || dist <= alpha2;
                if (ok1 && ok2) break;
            }
            if (ok1 && ok2) {
                locations.push_back(p);
                break;
            }
        }
    }

    const std::int64_t demand_hi =
        std::max<std::int64_t>(1, 2 * (src.total_facility_demand() / n_cust));
    std::vector<std::int64_t> demands;
    demands.reserve(static_cast<std::size_t>(n_cust));
    std::int64_t total_demand = 0;
    for (int c = 0; c < n_cust; ++c) {
        demands.push_back(uniform_int(rng, 1, demand_hi));
        total_demand += demands.back();
    }

    std::vector<std::vector<int>> coverage(static_cast<std::size_t>(n_cust));
    std::vector<std::int64_t> coverable_demand(static_cast<std::size_t>(n_fac), 0);
    for (int c = 0; c < n_cust; ++c) {
        coverage[static_cast<std::size_t>(c)] = coverage_set(src.facility_locations, locations[static_cast<std::size_t>(c)], alpha);
        for (int f : coverage[static_cast<std::size_t>(c)])
            coverable_demand[static_cast<std::size_t>(f)] += demands[static_cast<std::size_t>(c)];
    }

    std::vector<Facility> facilities;
    for (int f = 0; f < n_fac; ++f) {
        const double nu = uniform_real(rng, cfg.capacity_noise_lo, cfg.capacity_noise_hi);
        Facility fac;
        fac.id = n_dep + f;
        fac.location = src.facility_locations[static_cast<std::size_t>(f)];
        fac.capacity = std::ceil(static_cast<double>(coverable_demand[static_cast<std::size_t>(f)]) * nu);
        // A facility nobody can reach would violate the positivity invariant;
        // give it a token capacity so it stays representable (it can never be
        // selected anyway).
        if (fac.capacity <= 0) fac.capacity = 1;
        facilities.push_back(fac);
    }

    const FleetPlan fleet = plan_fleet(total_demand, src.vehicle_capacity, cfg.fleet_slack);

    for (int d = 0; d < n_dep; ++d) {
        if (src.depot_capacities[static_cast<std::size_t>(d)] < fleet.capacity_rescaled) {
            out.status = GenerateStatus::depot_support_failure;
            out.detail = "depot " + std::to_string(d) + " cannot support one fully loaded vehicle (" +
                         std::to_string(src.depot_capacities[static_cast<std::size_t>(d)]) + " < " +
                         std::to_string(fleet.capacity_rescaled) + ")";
            return out;
        }
    }

    std::vector<Depot> depots;
    for (int d = 0; d < n_dep; ++d) {
        Depot dep;
        dep.id = d;
        dep.location = src.depot_locations[static_cast<std::size_t>(d)];
        dep.selection_cost = src.depot_costs[static_cast<std::size_t>(d)];
        dep.capacity = src.depot_capacities[static_cast<std::size_t>(d)];
        depots.push_back(dep);
    }
    std::vector<Customer> customers;
    for (int c = 0; c < n_cust; ++c) {
        Customer cust;
        cust.id = n_dep + n_fac + c;
        cust.location = locations[static_cast<std::size_t>(c)];
        cust.demand = demands[static_cast<std::size_t>(c)];
        cust.coverage = coverage[static_cast<std::size_t>(c)];
        customers.push_back(cust);
    }

    out.instance.emplace(std::move(depots), std::move(facilities), std::move(customers),
                         fleet.vehicles_rescaled, fleet.capacity_rescaled);
    return out;
}

} // namespace ctlrp
