#ifndef CTLRP_MILP_HPP
#define CTLRP_MILP_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctlrp {

class MilpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RowSense { le, eq, ge };

struct LinTerm {
    int var = 0;
    double coef = 0.0;
};

struct MilpConstraint {
    std::vector<LinTerm> terms;
    RowSense sense = RowSense::le;
    double rhs = 0.0;
};

// Small pure-binary program, minimized. Both embedded IPs (depot
// reassignment and the customer restructuring model) compile down to this.
struct MilpProblem {
    int num_vars = 0;
    std::vector<double> objective;
    std::vector<MilpConstraint> constraints;
    std::optional<std::vector<char>> warm_start;
    std::int64_t node_budget = 1'000'000;
    double time_budget_seconds = 5.0;
};

enum class MilpStatus { optimal, feasible_budget_hit, infeasible, budget_hit_no_solution };

struct MilpResult {
    MilpStatus status = MilpStatus::infeasible;
    std::vector<char> assignment; // defined when an incumbent exists
    double objective = 0.0;
    double bound = 0.0;
    std::int64_t nodes = 0;

    bool has_solution() const {
        return status == MilpStatus::optimal || status == MilpStatus::feasible_budget_hit;
    }
};

// Depth-first branch and bound. Nodes are bounded by the LP relaxation
// (dense two-phase simplex over box variables); if the LP stalls the node
// falls back to the unconstrained coefficient bound, which is still valid.
MilpResult solve(const MilpProblem &problem);

} // namespace ctlrp

#endif
