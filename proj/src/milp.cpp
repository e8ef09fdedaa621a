#include "ctlrp/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace ctlrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-7;
constexpr double kIntTol = 1e-7;
constexpr double kPruneTol = 1e-7;

enum class LpStatus { optimal, infeasible, stalled };

struct LpOutcome {
    LpStatus status = LpStatus::stalled;
    double objective = -kInf;
    std::vector<double> x; // structural values
};

// Dense two-phase primal simplex with bounded variables. Structural
// variables carry finite [lo, hi] boxes, slacks are [0, inf). Dantzig
// pricing with a Bland fallback after an iteration threshold, so the method
// always terminates.
class Simplex {
public:
    Simplex(const std::vector<MilpConstraint> &rows, const std::vector<double> &objective,
            const std::vector<double> &lo, const std::vector<double> &hi)
        : m_(static_cast<int>(rows.size())), n_struct_(static_cast<int>(objective.size())) {
        int n_slack = 0;
        for (const auto &r : rows)
            if (r.sense != RowSense::eq) ++n_slack;
        n_total_ = n_struct_ + n_slack + m_; // + artificials, one per row at most
        a_.assign(static_cast<std::size_t>(m_) * n_total_, 0.0);
        rhs_.assign(static_cast<std::size_t>(m_), 0.0);
        lower_.assign(static_cast<std::size_t>(n_total_), 0.0);
        upper_.assign(static_cast<std::size_t>(n_total_), kInf);
        cost_.assign(static_cast<std::size_t>(n_total_), 0.0);
        value_.assign(static_cast<std::size_t>(n_total_), 0.0);
        at_upper_.assign(static_cast<std::size_t>(n_total_), false);
        basis_.assign(static_cast<std::size_t>(m_), -1);
        in_basis_.assign(static_cast<std::size_t>(n_total_), false);

        for (int j = 0; j < n_struct_; ++j) {
            lower_[static_cast<std::size_t>(j)] = lo[static_cast<std::size_t>(j)];
            upper_[static_cast<std::size_t>(j)] = hi[static_cast<std::size_t>(j)];
            cost_[static_cast<std::size_t>(j)] = objective[static_cast<std::size_t>(j)];
            value_[static_cast<std::size_t>(j)] = lo[static_cast<std::size_t>(j)];
        }

        int slack = n_struct_;
        first_artificial_ = n_struct_ + n_slack;
        int artificial = first_artificial_;
        for (int i = 0; i < m_; ++i) {
            const auto &row = rows[static_cast<std::size_t>(i)];
            for (const auto &t : row.terms) at(i, t.var) += t.coef;
            rhs_[static_cast<std::size_t>(i)] = row.rhs;
            double residual = row.rhs;
            for (int j = 0; j < n_struct_; ++j) residual -= at(i, j) * value_[static_cast<std::size_t>(j)];

            if (row.sense == RowSense::le) {
                at(i, slack) = 1.0;
                if (residual >= 0.0) {
                    set_basic(i, slack, residual);
                } else {
                    at(i, artificial) = -1.0;
                    set_basic(i, artificial++, -residual);
                }
                ++slack;
            } else if (row.sense == RowSense::ge) {
                at(i, slack) = -1.0;
                if (residual <= 0.0) {
                    set_basic(i, slack, -residual);
                } else {
                    at(i, artificial) = 1.0;
                    set_basic(i, artificial++, residual);
                }
                ++slack;
            } else {
                at(i, artificial) = residual >= 0.0 ? 1.0 : -1.0;
                set_basic(i, artificial++, std::abs(residual));
            }
        }
        n_used_ = artificial;

        // Flip rows so every basic column reads +1, giving B = I.
        for (int i = 0; i < m_; ++i)
            if (at(i, basis_[static_cast<std::size_t>(i)]) < 0.0)
                for (int j = 0; j < n_used_; ++j) at(i, j) = -at(i, j);
    }

    LpOutcome run() {
        // Phase 1: minimize artificial mass.
        std::vector<double> phase1(static_cast<std::size_t>(n_used_), 0.0);
        for (int j = first_artificial_; j < n_used_; ++j) phase1[static_cast<std::size_t>(j)] = 1.0;
        std::swap(cost_, phase1);
        if (!iterate()) {
            std::swap(cost_, phase1);
            return LpOutcome{};
        }
        double infeasibility = 0.0;
        for (int j = first_artificial_; j < n_used_; ++j)
            infeasibility += value_[static_cast<std::size_t>(j)];
        std::swap(cost_, phase1);
        if (infeasibility > 1e-6) {
            LpOutcome out;
            out.status = LpStatus::infeasible;
            return out;
        }
        // Lock artificials at zero for phase 2; basic ones may stay at 0.
        for (int j = first_artificial_; j < n_used_; ++j) upper_[static_cast<std::size_t>(j)] = 0.0;

        if (!iterate()) return LpOutcome{};

        LpOutcome out;
        out.status = LpStatus::optimal;
        out.x.assign(static_cast<std::size_t>(n_struct_), 0.0);
        out.objective = 0.0;
        for (int j = 0; j < n_struct_; ++j) {
            out.x[static_cast<std::size_t>(j)] = value_[static_cast<std::size_t>(j)];
            out.objective += cost_[static_cast<std::size_t>(j)] * value_[static_cast<std::size_t>(j)];
        }
        return out;
    }

private:
    double &at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_total_ + j]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_total_ + j]; }

    void set_basic(int row, int col, double value) {
        basis_[static_cast<std::size_t>(row)] = col;
        in_basis_[static_cast<std::size_t>(col)] = true;
        value_[static_cast<std::size_t>(col)] = value;
    }

    bool iterate() {
        const long limit = 200L * (m_ + n_used_) + 2000;
        const long bland_after = limit / 2;
        for (long iter = 0; iter < limit; ++iter) {
            std::vector<double> reduced(static_cast<std::size_t>(n_used_), 0.0);
            for (int j = 0; j < n_used_; ++j) {
                if (in_basis_[static_cast<std::size_t>(j)]) continue;
                double d = cost_[static_cast<std::size_t>(j)];
                for (int i = 0; i < m_; ++i) {
                    const double t = at(i, j);
                    if (t != 0.0) d -= cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] * t;
                }
                reduced[static_cast<std::size_t>(j)] = d;
            }

            int entering = -1;
            double best = 1e-9;
            const bool bland = iter >= bland_after;
            for (int j = 0; j < n_used_; ++j) {
                if (in_basis_[static_cast<std::size_t>(j)]) continue;
                if (upper_[static_cast<std::size_t>(j)] - lower_[static_cast<std::size_t>(j)] < 1e-12) continue;
                const double d = reduced[static_cast<std::size_t>(j)];
                const double gain = at_upper_[static_cast<std::size_t>(j)] ? d : -d;
                if (gain > (bland ? 1e-9 : best)) {
                    entering = j;
                    if (bland) break;
                    best = gain;
                }
            }
            if (entering < 0) return true; // optimal

            const double dir = at_upper_[static_cast<std::size_t>(entering)] ? -1.0 : 1.0;
            double step = upper_[static_cast<std::size_t>(entering)] - lower_[static_cast<std::size_t>(entering)];
            int leaving_row = -1;
            bool leaving_to_upper = false;
            for (int i = 0; i < m_; ++i) {
                const double t = dir * at(i, entering);
                const int b = basis_[static_cast<std::size_t>(i)];
                if (t > 1e-10) {
                    const double room = value_[static_cast<std::size_t>(b)] - lower_[static_cast<std::size_t>(b)];
                    const double s = room / t;
                    if (s < step - 1e-12 ||
                        (s < step + 1e-12 && leaving_row >= 0 &&
                         b < basis_[static_cast<std::size_t>(leaving_row)])) {
                        step = s;
                        leaving_row = i;
                        leaving_to_upper = false;
                    }
                } else if (t < -1e-10 && upper_[static_cast<std::size_t>(b)] < kInf) {
                    const double room = upper_[static_cast<std::size_t>(b)] - value_[static_cast<std::size_t>(b)];
                    const double s = room / (-t);
                    if (s < step - 1e-12 ||
                        (s < step + 1e-12 && leaving_row >= 0 &&
                         b < basis_[static_cast<std::size_t>(leaving_row)])) {
                        step = s;
                        leaving_row = i;
                        leaving_to_upper = true;
                    }
                }
            }
            if (step >= kInf) return false; // numerically unbounded; treat as stall

            step = std::max(step, 0.0);
            for (int i = 0; i < m_; ++i) {
                const int b = basis_[static_cast<std::size_t>(i)];
                value_[static_cast<std::size_t>(b)] -= dir * at(i, entering) * step;
            }
            value_[static_cast<std::size_t>(entering)] += dir * step;

            if (leaving_row < 0) {
                // Bound flip, basis unchanged.
                at_upper_[static_cast<std::size_t>(entering)] = !at_upper_[static_cast<std::size_t>(entering)];
                continue;
            }

            const int leaving = basis_[static_cast<std::size_t>(leaving_row)];
            in_basis_[static_cast<std::size_t>(leaving)] = false;
            at_upper_[static_cast<std::size_t>(leaving)] = leaving_to_upper;
            value_[static_cast<std::size_t>(leaving)] =
                leaving_to_upper ? upper_[static_cast<std::size_t>(leaving)] : lower_[static_cast<std::size_t>(leaving)];
            set_basic(leaving_row, entering, value_[static_cast<std::size_t>(entering)]);
            at_upper_[static_cast<std::size_t>(entering)] = false;

            // Gaussian pivot to restore the identity on the entering column.
            const double pivot = at(leaving_row, entering);
            for (int j = 0; j < n_used_; ++j) at(leaving_row, j) /= pivot;
            for (int i = 0; i < m_; ++i) {
                if (i == leaving_row) continue;
                const double factor = at(i, entering);
                if (factor == 0.0) continue;
                for (int j = 0; j < n_used_; ++j) at(i, j) -= factor * at(leaving_row, j);
            }
        }
        return false; // iteration limit
    }

    int m_ = 0;
    int n_struct_ = 0;
    int n_total_ = 0;
    int n_used_ = 0;
    int first_artificial_ = 0;
    std::vector<double> a_;
    std::vector<double> rhs_;
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<double> cost_;
    std::vector<double> value_;
    std::vector<bool> at_upper_;
    std::vector<int> basis_;
    std::vector<bool> in_basis_;
};

struct Search {
    const MilpProblem &p;
    std::chrono::steady_clock::time_point deadline;
    std::int64_t nodes = 0;
    bool budget_hit = false;
    bool have_incumbent = false;
    std::vector<char> incumbent;
    double incumbent_obj = kInf;
    double frontier_bound = kInf;

    explicit Search(const MilpProblem &problem)
        : p(problem),
          deadline(std::chrono::steady_clock::now() +
                   std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                       std::chrono::duration<double>(problem.time_budget_seconds))) {}

    bool out_of_budget() {
        if (budget_hit) return true;
        if (nodes >= p.node_budget || std::chrono::steady_clock::now() >= deadline) budget_hit = true;
        return budget_hit;
    }

    double exact_objective(const std::vector<char> &x) const {
        double obj = 0.0;
        for (int j = 0; j < p.num_vars; ++j)
            if (x[static_cast<std::size_t>(j)]) obj += p.objective[static_cast<std::size_t>(j)];
        return obj;
    }

    bool feasible(const std::vector<char> &x) const {
        for (const auto &row : p.constraints) {
            double lhs = 0.0;
            for (const auto &t : row.terms)
                if (x[static_cast<std::size_t>(t.var)]) lhs += t.coef;
            switch (row.sense) {
            case RowSense::le:
                if (lhs > row.rhs + 1e-6) return false;
                break;
            case RowSense::ge:
                if (lhs < row.rhs - 1e-6) return false;
                break;
            case RowSense::eq:
                if (std::abs(lhs - row.rhs) > 1e-6) return false;
                break;
            }
        }
        return true;
    }

    void offer(const std::vector<char> &x) {
        const double obj = exact_objective(x);
        if (!have_incumbent || obj < incumbent_obj - 1e-12) {
            if (!feasible(x)) return;
            have_incumbent = true;
            incumbent = x;
            incumbent_obj = obj;
        }
    }

    // Interval propagation over the fixed/free pattern: detects dead rows and
    // fixes forced variables. Returns false when some row cannot be met.
    bool propagate(std::vector<signed char> &state) const {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto &row : p.constraints) {
                double lo = 0.0, hi = 0.0;
                for (const auto &t : row.terms) {
                    const auto s = state[static_cast<std::size_t>(t.var)];
                    if (s == 1) {
                        lo += t.coef;
                        hi += t.coef;
                    } else if (s == -1) {
                        if (t.coef > 0)
                            hi += t.coef;
                        else
                            lo += t.coef;
                    }
                }
                const bool need_le = row.sense != RowSense::ge;
                const bool need_ge = row.sense != RowSense::le;
                if (need_le && lo > row.rhs + kFeasTol) return false;
                if (need_ge && hi < row.rhs - kFeasTol) return false;
                for (const auto &t : row.terms) {
                    auto &s = state[static_cast<std::size_t>(t.var)];
                    if (s != -1 || t.coef == 0.0) continue;
                    // Try each value; if it breaks the row interval, force the other.
                    const double lo1 = t.coef > 0 ? lo + t.coef : lo;
                    const double hi0 = t.coef > 0 ? hi - t.coef : hi;
                    if (need_le && lo1 > row.rhs + kFeasTol) {
                        s = 0;
                        changed = true;
                    } else if (need_ge && hi0 < row.rhs - kFeasTol) {
                        s = 1;
                        changed = true;
                    }
                }
            }
        }
        return true;
    }

    // Constraint-free bound: fixed contribution plus every negative
    // coefficient of a free variable. Valid because dropping constraints
    // only enlarges the feasible set.
    double trivial_bound(const std::vector<signed char> &state) const {
        double b = 0.0;
        for (int j = 0; j < p.num_vars; ++j) {
            const auto s = state[static_cast<std::size_t>(j)];
            const double c = p.objective[static_cast<std::size_t>(j)];
            if (s == 1)
                b += c;
            else if (s == -1 && c < 0.0)
                b += c;
        }
        return b;
    }

    void dive(std::vector<signed char> state, double inherited_bound) {
        if (out_of_budget()) {
            frontier_bound = std::min(frontier_bound, inherited_bound);
            return;
        }
        ++nodes;

        if (!propagate(state)) return;

        bool all_fixed = true;
        for (int j = 0; j < p.num_vars && all_fixed; ++j)
            if (state[static_cast<std::size_t>(j)] == -1) all_fixed = false;
        if (all_fixed) {
            std::vector<char> x(static_cast<std::size_t>(p.num_vars), 0);
            for (int j = 0; j < p.num_vars; ++j)
                x[static_cast<std::size_t>(j)] = state[static_cast<std::size_t>(j)] == 1 ? 1 : 0;
            offer(x);
            return;
        }

        std::vector<double> lo(static_cast<std::size_t>(p.num_vars), 0.0);
        std::vector<double> hi(static_cast<std::size_t>(p.num_vars), 1.0);
        for (int j = 0; j < p.num_vars; ++j) {
            const auto s = state[static_cast<std::size_t>(j)];
            if (s == 0) hi[static_cast<std::size_t>(j)] = 0.0;
            if (s == 1) lo[static_cast<std::size_t>(j)] = 1.0;
        }
        Simplex lp(p.constraints, p.objective, lo, hi);
        LpOutcome relax = lp.run();

        double bound;
        int branch_var = -1;
        if (relax.status == LpStatus::infeasible) return;
        if (relax.status == LpStatus::optimal) {
            bound = relax.objective;
            double most_fractional = kIntTol;
            bool integral = true;
            for (int j = 0; j < p.num_vars; ++j) {
                if (state[static_cast<std::size_t>(j)] != -1) continue;
                const double v = relax.x[static_cast<std::size_t>(j)];
                const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
                if (frac > kIntTol) integral = false;
                if (frac > most_fractional) {
                    most_fractional = frac;
                    branch_var = j;
                }
            }
            if (integral) {
                std::vector<char> x(static_cast<std::size_t>(p.num_vars), 0);
                for (int j = 0; j < p.num_vars; ++j) {
                    const auto s = state[static_cast<std::size_t>(j)];
                    x[static_cast<std::size_t>(j)] =
                        s == -1 ? (relax.x[static_cast<std::size_t>(j)] > 0.5 ? 1 : 0) : (s == 1 ? 1 : 0);
                }
                offer(x);
                return;
            }
        } else {
            // LP stalled; fall back to the coefficient bound and branch on the
            // largest free objective weight.
            bound = trivial_bound(state);
            double best = -1.0;
            for (int j = 0; j < p.num_vars; ++j) {
                if (state[static_cast<std::size_t>(j)] != -1) continue;
                const double w = std::abs(p.objective[static_cast<std::size_t>(j)]);
                if (w > best) {
                    best = w;
                    branch_var = j;
                }
            }
        }

        if (have_incumbent && bound >= incumbent_obj - kPruneTol) return;
        if (branch_var < 0) {
            for (int j = 0; j < p.num_vars && branch_var < 0; ++j)
                if (state[static_cast<std::size_t>(j)] == -1) branch_var = j;
        }

        int first_value = 1;
        if (relax.status == LpStatus::optimal &&
            relax.x[static_cast<std::size_t>(branch_var)] < 0.5)
            first_value = 0;
        for (int k = 0; k < 2; ++k) {
            auto child = state;
            child[static_cast<std::size_t>(branch_var)] = static_cast<signed char>(k == 0 ? first_value : 1 - first_value);
            dive(std::move(child), bound);
        }
    }
};

} // namespace

MilpResult solve(const MilpProblem &problem) {
    if (problem.num_vars <= 0) throw MilpError("problem has no variables");
    if (static_cast<int>(problem.objective.size()) != problem.num_vars)
        throw MilpError("objective size does not match variable count");
    std::vector<bool> appears(static_cast<std::size_t>(problem.num_vars), false);
    for (int j = 0; j < problem.num_vars; ++j) {
        if (!std::isfinite(problem.objective[static_cast<std::size_t>(j)]))
            throw MilpError("objective coefficient is not finite");
        if (problem.objective[static_cast<std::size_t>(j)] != 0.0)
            appears[static_cast<std::size_t>(j)] = true;
    }
    for (const auto &row : problem.constraints) {
        if (!std::isfinite(row.rhs)) throw MilpError("constraint rhs is not finite");
        for (const auto &t : row.terms) {
            if (t.var < 0 || t.var >= problem.num_vars) throw MilpError("constraint references unknown variable");
            if (!std::isfinite(t.coef)) throw MilpError("constraint coefficient is not finite");
            if (t.coef != 0.0) appears[static_cast<std::size_t>(t.var)] = true;
        }
    }
    for (int j = 0; j < problem.num_vars; ++j)
        if (!appears[static_cast<std::size_t>(j)])
            throw MilpError("variable " + std::to_string(j) + " appears nowhere in the problem");
    if (problem.warm_start &&
        static_cast<int>(problem.warm_start->size()) != problem.num_vars)
        throw MilpError("warm start size does not match variable count");

    Search search(problem);
    if (problem.warm_start) search.offer(*problem.warm_start);

    std::vector<signed char> root(static_cast<std::size_t>(problem.num_vars), -1);
    search.dive(std::move(root), -kInf);

    MilpResult out;
    out.nodes = search.nodes;
    if (!search.budget_hit) {
        if (search.have_incumbent) {
            out.status = MilpStatus::optimal;
            out.assignment = search.incumbent;
            out.objective = search.incumbent_obj;
            out.bound = search.incumbent_obj;
        } else {
            out.status = MilpStatus::infeasible;
        }
    } else {
        if (search.have_incumbent) {
            out.status = MilpStatus::feasible_budget_hit;
            out.assignment = search.incumbent;
            out.objective = search.incumbent_obj;
            out.bound = std::min(search.frontier_bound, search.incumbent_obj);
        } else {
            out.status = MilpStatus::budget_hit_no_solution;
            out.bound = search.frontier_bound;
        }
    }
    return out;
}

} // namespace ctlrp
