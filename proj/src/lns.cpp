#include "ctlrp/lns.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "ctlrp/construction.hpp"
#include "ctlrp/customer_ops.hpp"
#include "ctlrp/depot_assign.hpp"

namespace ctlrp {

std::string operator_name(const OperatorSpec &op) {
    switch (op.kind) {
    case OperatorKind::two_opt: return "2opt";
    case OperatorKind::swap_intra: return "Swap";
    case OperatorKind::relocate_intra: return "Relocate";
    case OperatorKind::two_opt_star: return "2opt*";
    case OperatorKind::one_point: return "1point";
    case OperatorKind::cross_string: return "CrossString";
    case OperatorKind::two_point: return "2point";
    case OperatorKind::depot_assignment: return "DepotAssignment";
    case OperatorKind::greedy_string_replacement:
        return "GreedyStringReplacement" + std::to_string(op.param);
    case OperatorKind::open_facility_shift: return "OpenFacilityShift";
    case OperatorKind::closed_facility_shift: return "ClosedFacilityShift";
    case OperatorKind::customer_ip: return "CustomerIP";
    }
    return "unknown";
}

std::optional<OperatorSpec> operator_from_name(const std::string &name) {
    if (name == "2opt") return OperatorSpec{OperatorKind::two_opt, 0};
    if (name == "Swap") return OperatorSpec{OperatorKind::swap_intra, 0};
    if (name == "Relocate") return OperatorSpec{OperatorKind::relocate_intra, 0};
    if (name == "2opt*") return OperatorSpec{OperatorKind::two_opt_star, 0};
    if (name == "1point") return OperatorSpec{OperatorKind::one_point, 0};
    if (name == "CrossString") return OperatorSpec{OperatorKind::cross_string, 0};
    if (name == "2point") return OperatorSpec{OperatorKind::two_point, 0};
    if (name == "DepotAssignment") return OperatorSpec{OperatorKind::depot_assignment, 0};
    if (name == "OpenFacilityShift") return OperatorSpec{OperatorKind::open_facility_shift, 0};
    if (name == "ClosedFacilityShift") return OperatorSpec{OperatorKind::closed_facility_shift, 0};
    if (name == "CustomerIP") return OperatorSpec{OperatorKind::customer_ip, 0};
    const std::string prefix = "GreedyStringReplacement";
    if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size()) {
        try {
            const int sl = std::stoi(name.substr(prefix.size()));
            if (sl >= 1) return OperatorSpec{OperatorKind::greedy_string_replacement, sl};
        } catch (const std::exception &) {
        }
    }
    return std::nullopt;
}

namespace {

std::vector<std::vector<OperatorSpec>> base_layers() {
    return {
        {{OperatorKind::two_opt, 0}, {OperatorKind::swap_intra, 0}, {OperatorKind::relocate_intra, 0}},
        {{OperatorKind::two_opt_star, 0},
         {OperatorKind::one_point, 0},
         {OperatorKind::cross_string, 0},
         {OperatorKind::two_point, 0}},
        {{OperatorKind::depot_assignment, 0}},
        {{OperatorKind::greedy_string_replacement, 5}},
        {{OperatorKind::greedy_string_replacement, 3}},
        {{OperatorKind::greedy_string_replacement, 1}},
        {{OperatorKind::open_facility_shift, 0}, {OperatorKind::closed_facility_shift, 0}},
    };
}

} // namespace

StrategyConfig preset_o1() {
    StrategyConfig cfg;
    cfg.accept = Accept::best;
    cfg.apply = Apply::first;
    cfg.iterate = Iterate::once;
    cfg.layers = base_layers();
    return cfg;
}

StrategyConfig preset_o2() {
    StrategyConfig cfg = preset_o1();
    cfg.layers.push_back({{OperatorKind::customer_ip, 0}});
    return cfg;
}

std::pair<Solution, bool> apply_operator(const Instance &inst, const Solution &sol,
                                         const OperatorSpec &op, Accept accept, Apply apply) {
    const MoveStrategy strategy{accept, apply};
    auto as_move_kind = [&]() -> std::optional<MoveKind> {
        switch (op.kind) {
        case OperatorKind::two_opt: return MoveKind::two_opt;
        case OperatorKind::swap_intra: return MoveKind::swap_intra;
        case OperatorKind::relocate_intra: return MoveKind::relocate_intra;
        case OperatorKind::two_opt_star: return MoveKind::two_opt_star;
        case OperatorKind::one_point: return MoveKind::one_point;
        case OperatorKind::cross_string: return MoveKind::cross_string;
        case OperatorKind::two_point: return MoveKind::two_point;
        default: return std::nullopt;
        }
    }();

    if (as_move_kind) {
        if (auto move = find_move(inst, sol, *as_move_kind, strategy)) {
            Solution next = sol;
            apply_move(inst, next, *move);
            return {std::move(next), false};
        }
        return {sol, true};
    }

    // Strategy parameters have no effect on the depot and customer
    // operators; each runs to its own contract.
    Solution next;
    switch (op.kind) {
    case OperatorKind::depot_assignment: next = reassign_depots(inst, sol).solution; break;
    case OperatorKind::open_facility_shift: next = open_facility_shift(inst, sol); break;
    case OperatorKind::closed_facility_shift: next = closed_facility_shift(inst, sol); break;
    case OperatorKind::greedy_string_replacement:
        next = greedy_string_replacement(inst, sol, op.param);
        break;
    case OperatorKind::customer_ip: {
        CustomerIpOptions opts;
        opts.iteration_threshold = inst.num_facilities();
        next = customer_ip_procedure(inst, sol, opts);
        break;
    }
    default: return {sol, true};
    }
    const double before = evaluate(inst, sol).total;
    const double after = evaluate(inst, next).total;
    if (after < before - kCostTolerance) return {std::move(next), false};
    return {sol, true};
}

SingleRunResult run_lns_single(const Instance &inst, const StrategyConfig &cfg, std::uint64_t seed,
                               std::map<std::string, OperatorStats> *stats,
                               const AcceptObserver &observer) {
    SingleRunResult out;
    if (cfg.layers.empty()) throw std::invalid_argument("strategy has no operator layers");
    const auto start = std::chrono::steady_clock::now();
    const bool timed = cfg.time_limit_seconds > 0;
    auto expired = [&] {
        if (!timed) return false;
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        return elapsed.count() >= cfg.time_limit_seconds;
    };

    Rng rng(seed);
    auto constructed = construct(inst, rng);
    if (!constructed) return out;
    Solution sol = std::move(*constructed);
    double cost = evaluate(inst, sol).total;

    const std::size_t m = cfg.layers.size();
    std::vector<int> active(m, 0); // AO
    std::vector<std::vector<bool>> locally_optimal(m);
    for (std::size_t k = 0; k < m; ++k)
        locally_optimal[k].assign(cfg.layers[k].size(), false);

    while (true) {
        std::size_t layer = m;
        for (std::size_t k = 0; k < m && layer == m; ++k)
            for (bool flag : locally_optimal[k])
                if (!flag) {
                    layer = k;
                    break;
                }
        if (layer == m) break; // every operator locally optimal
        if (expired()) {
            out.hit_time_limit = true;
            break;
        }

        const int slot = active[layer];
        const OperatorSpec &op = cfg.layers[layer][static_cast<std::size_t>(slot)];
        bool local_optimal;
        if (locally_optimal[layer][static_cast<std::size_t>(slot)]) {
            // Known stale operator; skip the rescan.
            local_optimal = true;
        } else {
            auto [next, lo] = apply_operator(inst, sol, op, cfg.accept, cfg.apply);
            local_optimal = lo;
            if (stats) {
                auto &entry = (*stats)[operator_name(op)];
                ++entry.applications;
                if (!lo) ++entry.improvements;
            }
            if (!lo) {
                const double next_cost = evaluate(inst, next).total;
                if (next_cost < cost - kCostTolerance) {
                    sol = std::move(next);
                    cost = next_cost;
                    // Any change invalidates every local-optimality mark.
                    for (auto &layer_flags : locally_optimal)
                        layer_flags.assign(layer_flags.size(), false);
                    if (observer) observer(sol, cost);
                } else {
                    local_optimal = true;
                }
            }
            if (local_optimal) locally_optimal[layer][static_cast<std::size_t>(slot)] = true;
        }

        if (local_optimal || cfg.iterate == Iterate::once)
            active[layer] = (slot + 1) % static_cast<int>(cfg.layers[layer].size());
    }

    out.solution = std::move(sol);
    out.cost = cost;
    return out;
}

namespace {

int worker_count(int runs) {
    const char *env = std::getenv("CTLRP_THREADS");
    int threads = 1;
    if (env) {
        try {
            threads = std::max(1, std::stoi(env));
        } catch (const std::exception &) {
            threads = 1;
        }
    }
    return std::min(threads, runs);
}

} // namespace

std::pair<std::optional<Solution>, RunReport> run_lns(const Instance &inst,
                                                      const StrategyConfig &cfg,
                                                      std::uint64_t seed) {
    RunReport report;
    const int runs = std::max(1, cfg.restarts);
    report.run_costs.assign(static_cast<std::size_t>(runs), 0.0);
    report.run_seeds.assign(static_cast<std::size_t>(runs), 0);
    std::vector<std::optional<Solution>> solutions(static_cast<std::size_t>(runs));
    std::vector<std::map<std::string, OperatorStats>> stats(static_cast<std::size_t>(runs));

    const auto start = std::chrono::steady_clock::now();
    const int threads = worker_count(runs);
    std::atomic<int> next_run{0};
    auto work = [&] {
        while (true) {
            const int r = next_run.fetch_add(1);
            if (r >= runs) return;
            const std::uint64_t run_seed = seed + static_cast<std::uint64_t>(r);
            report.run_seeds[static_cast<std::size_t>(r)] = run_seed;
            auto result = run_lns_single(inst, cfg, run_seed, &stats[static_cast<std::size_t>(r)]);
            if (result.solution) {
                solutions[static_cast<std::size_t>(r)] = std::move(result.solution);
                report.run_costs[static_cast<std::size_t>(r)] = result.cost;
            }
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto &t : pool) t.join();
    }

    std::optional<Solution> best;
    for (int r = 0; r < runs; ++r) {
        ++report.runs;
        if (!solutions[static_cast<std::size_t>(r)]) {
            ++report.failed_runs;
            continue;
        }
        for (const auto &[name, entry] : stats[static_cast<std::size_t>(r)]) {
            auto &merged = report.operator_stats[name];
            merged.applications += entry.applications;
            merged.improvements += entry.improvements;
        }
        const double cost = report.run_costs[static_cast<std::size_t>(r)];
        if (report.best_run < 0 || cost < report.best_cost) {
            report.best_cost = cost;
            report.best_run = r;
            best = solutions[static_cast<std::size_t>(r)];
        }
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    report.wall_seconds = elapsed.count();
    return {best, report};
}

double report_gap(double heuristic_cost, double reference_cost) {
    if (reference_cost == 0.0) throw std::invalid_argument("reference cost must be nonzero");
    return 100.0 * (std::abs(heuristic_cost / reference_cost) - 1.0);
}

} // namespace ctlrp
