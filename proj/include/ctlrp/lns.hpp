#ifndef CTLRP_LNS_HPP
#define CTLRP_LNS_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "ctlrp/core.hpp"
#include "ctlrp/moves.hpp"
#include "ctlrp/rng.hpp"

namespace ctlrp {

enum class OperatorKind {
    two_opt,
    swap_intra,
    relocate_intra,
    two_opt_star,
    one_point,
    cross_string,
    two_point,
    depot_assignment,
    greedy_string_replacement,
    open_facility_shift,
    closed_facility_shift,
    customer_ip,
};

struct OperatorSpec {
    OperatorKind kind = OperatorKind::two_opt;
    int param = 0; // string length for greedy_string_replacement
};

std::string operator_name(const OperatorSpec &op);
std::optional<OperatorSpec> operator_from_name(const std::string &name);

enum class Iterate { once, repeated };

struct StrategyConfig {
    Accept accept = Accept::best;
    Apply apply = Apply::first;
    Iterate iterate = Iterate::once;
    std::vector<std::vector<OperatorSpec>> layers;
    double time_limit_seconds = 120.0; // per run
    int restarts = 1;
};

// The two operator schedules run in the experiments; O2 appends the
// customer IP as a final layer.
StrategyConfig preset_o1();
StrategyConfig preset_o2();

struct OperatorStats {
    std::int64_t applications = 0;
    std::int64_t improvements = 0;
};

struct RunReport {
    int runs = 0;
    int failed_runs = 0;
    std::vector<double> run_costs;      // indexed by run
    std::vector<std::uint64_t> run_seeds;
    double best_cost = 0.0;             // min over runs
    int best_run = -1;
    double wall_seconds = 0.0;
    std::map<std::string, OperatorStats> operator_stats;
};

// Called after every accepted improvement; instrumentation hook.
using AcceptObserver = std::function<void(const Solution &, double total_cost)>;

// One operator application under the strategy switches; the bool is the
// local_optimal flag (true when nothing improved).
std::pair<Solution, bool> apply_operator(const Instance &inst, const Solution &sol,
                                         const OperatorSpec &op, Accept accept, Apply apply);

struct SingleRunResult {
    std::optional<Solution> solution;
    double cost = 0.0;
    bool hit_time_limit = false;
};

SingleRunResult run_lns_single(const Instance &inst, const StrategyConfig &cfg, std::uint64_t seed,
                               std::map<std::string, OperatorStats> *stats = nullptr,
                               const AcceptObserver &observer = {});

// Restart driver: cfg.restarts seeded runs (seed, seed+1, ...), fanned out
// over CTLRP_THREADS workers when set, merged by run index.
std::pair<std::optional<Solution>, RunReport> run_lns(const Instance &inst,
                                                      const StrategyConfig &cfg,
                                                      std::uint64_t seed);

// 100 (|heuristic/reference| - 1); the reference may be an upper bound or,
// for the LB variant, a lower bound.
double report_gap(double heuristic_cost, double reference_cost);

} // namespace ctlrp

#endif
