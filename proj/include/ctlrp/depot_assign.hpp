#ifndef CTLRP_DEPOT_ASSIGN_HPP
#define CTLRP_DEPOT_ASSIGN_HPP

#include "ctlrp/core.hpp"
#include "ctlrp/milp.hpp"

namespace ctlrp {

// Facility-location style reassignment of depots to fixed routes. delta_cost
// is the routing-cost change of re-anchoring a route at a depot, evaluated
// over every gap of the stop cycle; rotation keeps the cheapest gap.
struct DepotReassignModel {
    std::vector<std::vector<double>> delta_cost;   // [route][depot]
    std::vector<std::vector<int>> anchor_gap;      // argmin gap per (route, depot)
    std::vector<std::int64_t> route_demand;        // d_r
    MilpProblem problem;                           // x vars then y vars
    double current_depot_cost = 0.0;

    int x_var(int route, int depot, int num_depots) const { return route * num_depots + depot; }
    int y_var(int route_count, int num_depots, int depot) const {
        return route_count * num_depots + depot;
    }
};

DepotReassignModel build_depot_model(const Instance &inst, const Solution &sol);

struct DepotReassignResult {
    Solution solution;
    bool applied = false;
    bool timed_out = false;
    double model_objective = 0.0;
};

DepotReassignResult reassign_depots(const Instance &inst, const Solution &sol);

} // namespace ctlrp

#endif
