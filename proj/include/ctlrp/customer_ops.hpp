#ifndef CTLRP_CUSTOMER_OPS_HPP
#define CTLRP_CUSTOMER_OPS_HPP

#include <array>
#include <optional>

#include "ctlrp/core.hpp"
#include "ctlrp/milp.hpp"

namespace ctlrp {

// Wholesale reassignment of one facility's customers to an open neighbor,
// deleting the emptied facility from its route when that pays off.
Solution open_facility_shift(const Instance &inst, const Solution &sol);

// Same idea, but the target facility is currently closed and takes over the
// removed facility's slot in the route.
Solution closed_facility_shift(const Instance &inst, const Solution &sol);

enum class DemandOrder { descending, ascending };

// One replacement sweep: per open facility, cut a string of up to `sl`
// stops, re-place its customers (other routes, same route, then cheapest
// closed-facility insertions into the rebuilt string) and keep the new
// string only when it is cheaper than the old one.
Solution greedy_string_replacement_pass(const Instance &inst, const Solution &sol, int sl,
                                        DemandOrder order);

// Alternates descending/ascending sweeps until neither improves.
Solution greedy_string_replacement(const Instance &inst, const Solution &sol, int sl);

struct RouteAlternative {
    std::vector<int> stops;
    double extension_cost = 0.0; // against the partial route
    bool is_original = false;
};

struct CustomerIpModel {
    int removed_a = -1;
    int removed_b = -1;
    double removal_saving = 0.0; // routing cost drop from the two removals
    std::vector<int> customers;  // unassigned customers C
    std::vector<std::vector<int>> partial_stops;
    std::vector<int> closed_facilities; // F^cl
    std::vector<std::vector<RouteAlternative>> alternatives;

    MilpProblem problem;
    // x variable (c, k, f) triples and y variable (k, alternative) pairs, in
    // the order they occupy the flat variable space (x block first).
    std::vector<std::array<int, 3>> x_vars;
    std::vector<std::pair<int, int>> y_vars;
};

// Builds the restructuring IP around removing open facility `f` and the
// closest eligible open facility; empty when no partner exists.
std::optional<CustomerIpModel> build_customer_ip(const Instance &inst, const Solution &sol, int f,
                                                 int partner);

// Decode a kernel assignment back into a full solution (routes swapped to
// the chosen alternatives, customers in C reassigned, customer-less
// facilities dropped).
Solution decode_customer_ip(const Instance &inst, const Solution &sol, const CustomerIpModel &model,
                            const std::vector<char> &assignment);

struct CustomerIpOptions {
    int iteration_threshold = -1; // < 0: one pass over the open facilities
    std::int64_t node_budget = 1'000'000;
    double time_budget_seconds = 5.0;
};

Solution customer_ip_procedure(const Instance &inst, const Solution &sol,
                               const CustomerIpOptions &opts = {});

} // namespace ctlrp

#endif
