#include "ctlrp/depot_assign.hpp"

#include <algorithm>

namespace ctlrp {

namespace {

// Cost of the route obtained by anchoring `stops` at `depot` in gap `g`:
// the stop sequence is treated as a cycle and the depot is spliced between
// cyclic positions g and g+1 (gap n-1 reproduces the given orientation).
double anchored_cost(const Instance &inst, const std::vector<int> &stops, int depot, int gap) {
    const int n = static_cast<int>(stops.size());
    double cost = 0.0;
    const int first = (gap + 1) % n;
    const int last = gap;
    cost += inst.cost_depot_facility(depot, stops[static_cast<std::size_t>(first)]);
    for (int k = 0; k + 1 < n; ++k) {
        const int u = stops[static_cast<std::size_t>((first + k) % n)];
        const int v = stops[static_cast<std::size_t>((first + k + 1) % n)];
        cost += inst.cost_facility_facility(u, v);
    }
    cost += inst.cost_depot_facility(depot, stops[static_cast<std::size_t>(last)]);
    return cost;
}

} // namespace

DepotReassignModel build_depot_model(const Instance &inst, const Solution &sol) {
    DepotReassignModel model;
    const int n_routes = static_cast<int>(sol.routes.size());
    const int n_depots = inst.num_depots();
    const LoadTable loads = LoadTable::build(inst, sol);

    model.delta_cost.assign(static_cast<std::size_t>(n_routes), {});
    model.anchor_gap.assign(static_cast<std::size_t>(n_routes), {});
    model.route_demand.assign(static_cast<std::size_t>(n_routes), 0);

    std::vector<bool> depot_used(static_cast<std::size_t>(n_depots), false);
    for (int r = 0; r < n_routes; ++r) {
        const Route &route = sol.routes[static_cast<std::size_t>(r)];
        if (!route.stops.empty()) depot_used[static_cast<std::size_t>(route.depot)] = true;
        model.route_demand[static_cast<std::size_t>(r)] = loads.route[static_cast<std::size_t>(r)];
        const double current = route_cost(inst, route);
        auto &deltas = model.delta_cost[static_cast<std::size_t>(r)];
        auto &gaps = model.anchor_gap[static_cast<std::size_t>(r)];
        deltas.assign(static_cast<std::size_t>(n_depots), 0.0);
        gaps.assign(static_cast<std::size_t>(n_depots), -1);
        const int n = static_cast<int>(route.stops.size());
        for (int d = 0; d < n_depots; ++d) {
            if (n == 0) continue; // nothing to re-anchor
            double best = 0.0;
            int best_gap = -1;
            for (int g = 0; g < n; ++g) {
                const double c = anchored_cost(inst, route.stops, d, g);
                if (best_gap < 0 || c < best) {
                    best = c;
                    best_gap = g;
                }
            }
            deltas[static_cast<std::size_t>(d)] = best - current;
            gaps[static_cast<std::size_t>(d)] = best_gap;
        }
    }
    for (int d = 0; d < n_depots; ++d)
        if (depot_used[static_cast<std::size_t>(d)])
            model.current_depot_cost += inst.depot(d).selection_cost;

    MilpProblem &p = model.problem;
    p.num_vars = n_routes * n_depots + n_depots;
    p.objective.assign(static_cast<std::size_t>(p.num_vars), 0.0);
    for (int r = 0; r < n_routes; ++r)
        for (int d = 0; d < n_depots; ++d)
            p.objective[static_cast<std::size_t>(model.x_var(r, d, n_depots))] =
                model.delta_cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(d)];
    for (int d = 0; d < n_depots; ++d)
        p.objective[static_cast<std::size_t>(model.y_var(n_routes, n_depots, d))] =
            inst.depot(d).selection_cost;

    for (int r = 0; r < n_routes; ++r) {
        MilpConstraint row;
        for (int d = 0; d < n_depots; ++d) row.terms.push_back({model.x_var(r, d, n_depots), 1.0});
        row.sense = RowSense::eq;
        row.rhs = 1.0;
        p.constraints.push_back(std::move(row));
    }
    for (int d = 0; d < n_depots; ++d) {
        MilpConstraint row;
        for (int r = 0; r < n_routes; ++r)
            row.terms.push_back({model.x_var(r, d, n_depots),
                                 static_cast<double>(model.route_demand[static_cast<std::size_t>(r)])});
        row.terms.push_back({model.y_var(n_routes, n_depots, d), -inst.depot(d).capacity});
        row.sense = RowSense::le;
        row.rhs = 0.0;
        p.constraints.push_back(std::move(row));
    }
    // x <= y rows only strengthen the relaxation; the capacity rows already
    // imply them for positive demands.
    for (int r = 0; r < n_routes; ++r)
        for (int d = 0; d < n_depots; ++d) {
            MilpConstraint row;
            row.terms.push_back({model.x_var(r, d, n_depots), 1.0});
            row.terms.push_back({model.y_var(n_routes, n_depots, d), -1.0});
            row.sense = RowSense::le;
            row.rhs = 0.0;
            p.constraints.push_back(std::move(row));
        }

    std::vector<char> warm(static_cast<std::size_t>(p.num_vars), 0);
    for (int r = 0; r < n_routes; ++r) {
        const int d = sol.routes[static_cast<std::size_t>(r)].depot;
        warm[static_cast<std::size_t>(model.x_var(r, d, n_depots))] = 1;
        warm[static_cast<std::size_t>(model.y_var(n_routes, n_depots, d))] = 1;
    }
    p.warm_start = std::move(warm);
    return model;
}

DepotReassignResult reassign_depots(const Instance &inst, const Solution &sol) {
    DepotReassignResult out;
    out.solution = sol;
    DepotReassignModel model = build_depot_model(inst, sol);
    const int n_depots = inst.num_depots();
    const int n_routes = static_cast<int>(sol.routes.size());
    if (n_depots <= 1) return out;

    MilpResult result = solve(model.problem);
    if (!result.has_solution()) {
        out.timed_out = result.status == MilpStatus::budget_hit_no_solution;
        return out;
    }
    if (result.status == MilpStatus::feasible_budget_hit) out.timed_out = true;
    out.model_objective = result.objective;
    if (result.objective >= model.current_depot_cost - kCostTolerance) return out;

    for (int r = 0; r < n_routes; ++r) {
        int chosen = -1;
        for (int d = 0; d < n_depots; ++d)
            if (result.assignment[static_cast<std::size_t>(model.x_var(r, d, n_depots))]) chosen = d;
        if (chosen < 0) continue;
        Route &route = out.solution.routes[static_cast<std::size_t>(r)];
        const int gap = model.anchor_gap[static_cast<std::size_t>(r)][static_cast<std::size_t>(chosen)];
        if (route.stops.empty() || gap < 0) {
            route.depot = chosen;
            continue;
        }
        // Rotate so the cheapest gap sits at the depot splice point.
        const int n = static_cast<int>(route.stops.size());
        std::vector<int> rotated;
        rotated.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k)
            rotated.push_back(route.stops[static_cast<std::size_t>((gap + 1 + k) % n)]);
        route.depot = chosen;
        route.stops = std::move(rotated);
    }
    out.applied = true;
    return out;
}

} // namespace ctlrp
