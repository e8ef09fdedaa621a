#include "ctlrp/moves.hpp"

#include <algorithm>
#include <cassert>

namespace ctlrp {

namespace {

// Node id at position k of the route; k == -1 and k == size() give the depot.
int node_at(const Instance &inst, const Route &route, int k) {
    if (k < 0 || k >= static_cast<int>(route.stops.size())) return inst.depot_node(route.depot);
    return inst.facility_node(route.stops[static_cast<std::size_t>(k)]);
}

struct Picker {
    Accept accept;
    std::optional<MoveDelta> chosen;

    // Returns true when the scan can stop early.
    bool offer(const MoveDelta &candidate) {
        if (candidate.delta >= -kCostTolerance) return false;
        if (!chosen || candidate.delta < chosen->delta) chosen = candidate;
        return accept == Accept::first;
    }
};

std::int64_t string_demand(const Route &route, const LoadTable &loads, int from, int len) {
    std::int64_t q = 0;
    for (int k = from; k < from + len; ++k)
        q += loads.facility[static_cast<std::size_t>(route.stops[static_cast<std::size_t>(k)])];
    return q;
}

} // namespace

std::optional<MoveDelta> scan_two_opt(const Instance &inst, const Solution &sol, int route,
                                      Accept accept) {
    const Route &r = sol.routes[static_cast<std::size_t>(route)];
    const int n = static_cast<int>(r.stops.size());
    if (n < 3) return std::nullopt; // needs at least four edges
    Picker pick{accept, {}};
    for (int i = 0; i < n - 1; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double removed = inst.node_cost(node_at(inst, r, i - 1), node_at(inst, r, i)) +
                                   inst.node_cost(node_at(inst, r, j), node_at(inst, r, j + 1));
            const double added = inst.node_cost(node_at(inst, r, i - 1), node_at(inst, r, j)) +
                                 inst.node_cost(node_at(inst, r, i), node_at(inst, r, j + 1));
            MoveDelta move{MoveKind::two_opt, route, -1, i, j, 0, 0, 0, added - removed};
            if (pick.offer(move)) return pick.chosen;
        }
    }
    return pick.chosen;
}

std::optional<MoveDelta> scan_swap_intra(const Instance &inst, const Solution &sol, int route,
                                         Accept accept) {
    const Route &r = sol.routes[static_cast<std::size_t>(route)];
    const int n = static_cast<int>(r.stops.size());
    if (n < 2) return std::nullopt;
    Picker pick{accept, {}};
    for (int i = 0; i < n - 1; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double delta;
            const int pi = node_at(inst, r, i - 1), ni = node_at(inst, r, i + 1);
            const int pj = node_at(inst, r, j - 1), nj = node_at(inst, r, j + 1);
            const int vi = node_at(inst, r, i), vj = node_at(inst, r, j);
            if (j == i + 1) {
                delta = inst.node_cost(pi, vj) + inst.node_cost(vi, nj) -
                        inst.node_cost(pi, vi) - inst.node_cost(vj, nj);
            } else {
                delta = inst.node_cost(pi, vj) + inst.node_cost(vj, ni) + inst.node_cost(pj, vi) +
                        inst.node_cost(vi, nj) - inst.node_cost(pi, vi) - inst.node_cost(vi, ni) -
                        inst.node_cost(pj, vj) - inst.node_cost(vj, nj);
            }
            MoveDelta move{MoveKind::swap_intra, route, -1, i, j, 0, 0, 0, delta};
            if (pick.offer(move)) return pick.chosen;
        }
    }
    return pick.chosen;
}

std::optional<MoveDelta> scan_relocate_intra(const Instance &inst, const Solution &sol, int route,
                                             Accept accept) {
    const Route &r = sol.routes[static_cast<std::size_t>(route)];
    const int n = static_cast<int>(r.stops.size());
    if (n < 2) return std::nullopt;
    Picker pick{accept, {}};
    for (int i = 0; i < n; ++i) {
        const int v = node_at(inst, r, i);
        const double removal = inst.node_cost(node_at(inst, r, i - 1), v) +
                               inst.node_cost(v, node_at(inst, r, i + 1)) -
                               inst.node_cost(node_at(inst, r, i - 1), node_at(inst, r, i + 1));
        // Slot j is the final index of the moved stop; neighbor positions are
        // mapped back through the removal of i.
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const int before = j - 1 < 0 ? -1 : (j - 1 < i ? j - 1 : j);
            const int after = j >= n - 1 ? n : (j < i ? j : j + 1);
            const int u = node_at(inst, r, before);
            const int w = node_at(inst, r, after);
            const double insertion = inst.node_cost(u, v) + inst.node_cost(v, w) - inst.node_cost(u, w);
            MoveDelta move{MoveKind::relocate_intra, route, -1, i, j, 0, 0, 0, insertion - removal};
            if (pick.offer(move)) return pick.chosen;
        }
    }
    return pick.chosen;
}

std::optional<MoveDelta> scan_one_point(const Instance &inst, const Solution &sol,
                                        const LoadTable &loads, int r1, int r2, Accept accept,
                                        const MoveContext &ctx) {
    const Route &from = sol.routes[static_cast<std::size_t>(r1)];
    const Route &to = sol.routes[static_cast<std::size_t>(r2)];
    const int n1 = static_cast<int>(from.stops.size());
    const int n2 = static_cast<int>(to.stops.size());
    if (n1 == 0) return std::nullopt;
    if (!ctx.allow_empty_routes && n1 == 1) return std::nullopt;
    const bool same_depot = from.depot == to.depot;
    Picker pick{accept, {}};
    for (int i = 0; i < n1; ++i) {
        const int f = from.stops[static_cast<std::size_t>(i)];
        const std::int64_t q = loads.facility[static_cast<std::size_t>(f)];
        if (static_cast<double>(loads.route[static_cast<std::size_t>(r2)] + q) > inst.vehicle_capacity())
            continue;
        if (!same_depot &&
            static_cast<double>(loads.depot[static_cast<std::size_t>(to.depot)] + q) >
                inst.depot(to.depot).capacity)
            continue;
        const int v = node_at(inst, from, i);
        const double removal = inst.node_cost(node_at(inst, from, i - 1), v) +
                               inst.node_cost(v, node_at(inst, from, i + 1)) -
                               inst.node_cost(node_at(inst, from, i - 1), node_at(inst, from, i + 1));
        for (int j = 0; j <= n2; ++j) {
            const int u = node_at(inst, to, j - 1);
            const int w = node_at(inst, to, j);
            const double insertion = inst.node_cost(u, v) + inst.node_cost(v, w) - inst.node_cost(u, w);
            MoveDelta move{MoveKind::one_point, r1, r2, i, j, 0, 0, 0, insertion - removal};
            if (pick.offer(move)) return pick.chosen;
        }
    }
    return pick.chosen;
}

std::optional<MoveDelta> scan_two_point(const Instance &inst, const Solution &sol,
                                        const LoadTable &loads, int r1, int r2, Accept accept) {
    const Route &ra = sol.routes[static_cast<std::size_t>(r1)];
    const Route &rb = sol.routes[static_cast<std::size_t>(r2)];
    const int n1 = static_cast<int>(ra.stops.size());
    const int n2 = static_cast<int>(rb.stops.size());
    if (n1 == 0 || n2 == 0) return std::nullopt;
    const bool same_depot = ra.depot == rb.depot;
    Picker pick{accept, {}};
    for (int i = 0; i < n1; ++i) {
        const int fa = ra.stops[static_cast<std::size_t>(i)];
        const std::int64_t qa = loads.facility[static_cast<std::size_t>(fa)];
        for (int j = 0; j < n2; ++j) {
            const int fb = rb.stops[static_cast<std::size_t>(j)];
            const std::int64_t qb = loads.facility[static_cast<std::size_t>(fb)];
            if (static_cast<double>(loads.route[static_cast<std::size_t>(r1)] - qa + qb) >
                inst.vehicle_capacity())
                continue;
            if (static_cast<double>(loads.route[static_cast<std::size_t>(r2)] - qb + qa) >
                inst.vehicle_capacity())
                continue;
            if (!same_depot) {
                if (static_cast<double>(loads.depot[static_cast<std::size_t>(ra.depot)] - qa + qb) >
                    inst.depot(ra.depot).capacity)
                    continue;
                if (static_cast<double>(loads.depot[static_cast<std::size_t>(rb.depot)] - qb + qa) >
                    inst.depot(rb.depot).capacity)
                    continue;
            }
            const int va = node_at(inst, ra, i), vb = node_at(inst, rb, j);
            const double delta = inst.node_cost(node_at(inst, ra, i - 1), vb) +
                                 inst.node_cost(vb, node_at(inst, ra, i + 1)) +
                                 inst.node_cost(node_at(inst, rb, j - 1), va) +
                                 inst.node_cost(va, node_at(inst, rb, j + 1)) -
                                 inst.node_cost(node_at(inst, ra, i - 1), va) -
                                 inst.node_cost(va, node_at(inst, ra, i + 1)) -
                                 inst.node_cost(node_at(inst, rb, j - 1), vb) -
                                 inst.node_cost(vb, node_at(inst, rb, j + 1));
            MoveDelta move{MoveKind::two_point, r1, r2, i, j, 0, 0, 0, delta};
            if (pick.offer(move)) return pick.chosen;
        }
    }
    return pick.chosen;
}

std::optional<MoveDelta> scan_two_opt_star(const Instance &inst, const Solution &sol,
                                           const LoadTable &loads, int r1, int r2, Accept accept,
                                           const MoveContext &ctx) {
    (void)ctx; // orphaning cuts are structurally excluded below
    const Route &ra = sol.routes[static_cast<std::size_t>(r1)];
    const Route &rb = sol.routes[static_cast<std::size_t>(r2)];
    if (ra.depot != rb.depot) return std::nullopt;
    const int n1 = static_cast<int>(ra.stops.size());
    const int n2 = static_cast<int>(rb.stops.size());
    if (n1 == 0 || n2 == 0) return std::nullopt;

    std::vector<std::int64_t> head_a(static_cast<std::size_t>(n1) + 1, 0);
    for (int k = 0; k < n1; ++k)
        head_a[static_cast<std::size_t>(k) + 1] =
            head_a[static_cast<std::size_t>(k)] +
            loads.facility[static_cast<std::size_t>(ra.stops[static_cast<std::size_t>(k)])];
    std::vector<std::int64_t> head_b(static_cast<std::size_t>(n2) + 1, 0);
    for (int k = 0; k < n2; ++k)
        head_b[static_cast<std::size_t>(k) + 1] =
            head_b[static_cast<std::size_t>(k)] +
            loads.facility[static_cast<std::size_t>(rb.stops[static_cast<std::size_t>(k)])];
    const std::int64_t total_a = head_a[static_cast<std::size_t>(n1)];
    const std::int64_t total_b = head_b[static_cast<std::size_t>(n2)];

    Picker pick{accept, {}};
    for (int e1 = 0; e1 <= n1; ++e1) {
        const int a = node_at(inst, ra, e1 - 1);
        const int b = node_at(inst, ra, e1);
        const double removed1 = inst.node_cost(a, b);
        for (int e2 = 0; e2 <= n2; ++e2) {
            const int c = node_at(inst, rb, e2 - 1);
            const int d = node_at(inst, rb, e2);
            const double removed = removed1 + inst.node_cost(c, d);
            // Scenario 0: tails swap, head1+tail2 and head2+tail1. The skipped
            // cut pairs would join two depot ends (and orphan a route).
            if (!(e1 == 0 && e2 == n2) && !(e1 == n1 && e2 == 0)) {
                const std::int64_t q1 = head_a[static_cast<std::size_t>(e1)] + total_b -
                                        head_b[static_cast<std::size_t>(e2)];
                const std::int64_t q2 = head_b[static_cast<std::size_t>(e2)] + total_a -
                                        head_a[static_cast<std::size_t>(e1)];
                if (static_cast<double>(q1) <= inst.vehicle_capacity() &&
                    static_cast<double>(q2) <= inst.vehicle_capacity()) {
                    const double delta = inst.node_cost(a, d) + inst.node_cost(b, c) - removed;
                    MoveDelta move{MoveKind::two_opt_star, r1, r2, e1, e2, 0, 0, 0, delta};
                    if (pick.offer(move)) return pick.chosen;
                }
            }
            // Scenario 1: head1+reversed(head2) and reversed(tail1)+tail2.
            if (!(e1 == 0 && e2 == 0) && !(e1 == n1 && e2 == n2)) {
                const std::int64_t q1 = head_a[static_cast<std::size_t>(e1)] +
                                        head_b[static_cast<std::size_t>(e2)];
                const std::int64_t q2 = total_a - head_a[static_cast<std::size_t>(e1)] + total_b -
                                        head_b[static_cast<std::size_t>(e2)];
                if (static_cast<double>(q1) <= inst.vehicle_capacity() &&
                    static_cast<double>(q2) <= inst.vehicle_capacity()) {
                    const double delta = inst.node_cost(a, c) + inst.node_cost(b, d) - removed;
                    MoveDelta move{MoveKind::two_opt_star, r1, r2, e1, e2, 1, 0, 0, delta};
                    if (pick.offer(move)) return pick.chosen;
                }
            }
        }
    }
    return pick.chosen;
}

std::optional<MoveDelta> scan_cross_string(const Instance &inst, const Solution &sol,
                                           const LoadTable &loads, int r1, int r2, Accept accept,
                                           const MoveContext &ctx) {
    const Route &ra = sol.routes[static_cast<std::size_t>(r1)];
    const Route &rb = sol.routes[static_cast<std::size_t>(r2)];
    const int n1 = static_cast<int>(ra.stops.size());
    const int n2 = static_cast<int>(rb.stops.size());
    if (n1 == 0 || n2 == 0) return std::nullopt;
    const bool same_depot = ra.depot == rb.depot;
    Picker pick{accept, {}};
    for (int l1 = 1; l1 <= std::min(ctx.max_string_length, n1); ++l1) {
        for (int l2 = 1; l2 <= std::min(ctx.max_string_length, n2); ++l2) {
            for (int p1 = 0; p1 + l1 <= n1; ++p1) {
                const std::int64_t q1 = string_demand(ra, loads, p1, l1);
                const int a = node_at(inst, ra, p1 - 1);
                const int b = node_at(inst, ra, p1 + l1);
                const int A = node_at(inst, ra, p1);
                const int B = node_at(inst, ra, p1 + l1 - 1);
                for (int p2 = 0; p2 + l2 <= n2; ++p2) {
                    const std::int64_t q2 = string_demand(rb, loads, p2, l2);
                    if (static_cast<double>(loads.route[static_cast<std::size_t>(r1)] - q1 + q2) >
                        inst.vehicle_capacity())
                        continue;
                    if (static_cast<double>(loads.route[static_cast<std::size_t>(r2)] - q2 + q1) >
                        inst.vehicle_capacity())
                        continue;
                    if (!same_depot) {
                        if (static_cast<double>(loads.depot[static_cast<std::size_t>(ra.depot)] - q1 +
                                                q2) > inst.depot(ra.depot).capacity)
                            continue;
                        if (static_cast<double>(loads.depot[static_cast<std::size_t>(rb.depot)] - q2 +
                                                q1) > inst.depot(rb.depot).capacity)
                            continue;
                    }
                    const int c = node_at(inst, rb, p2 - 1);
                    const int d = node_at(inst, rb, p2 + l2);
                    const int C = node_at(inst, rb, p2);
                    const int D = node_at(inst, rb, p2 + l2 - 1);
                    const double removed = inst.node_cost(a, A) + inst.node_cost(B, b) +
                                           inst.node_cost(c, C) + inst.node_cost(D, d);
                    // Scenario bit 0: incoming string into route1 reversed;
                    // bit 1: incoming string into route2 reversed.
                    for (int scenario = 0; scenario < 4; ++scenario) {
                        const bool rev_into_r1 = scenario & 1;
                        const bool rev_into_r2 = scenario & 2;
                        const double added =
                            (rev_into_r1 ? inst.node_cost(a, D) + inst.node_cost(C, b)
                                         : inst.node_cost(a, C) + inst.node_cost(D, b)) +
                            (rev_into_r2 ? inst.node_cost(c, B) + inst.node_cost(A, d)
                                         : inst.node_cost(c, A) + inst.node_cost(B, d));
                        MoveDelta move{MoveKind::cross_string, r1, r2, p1, l1, p2, l2, scenario,
                                       added - removed};
                        if (pick.offer(move)) return pick.chosen;
                    }
                }
            }
        }
    }
    return pick.chosen;
}

std::optional<MoveDelta> find_move(const Instance &inst, const Solution &sol, MoveKind kind,
                                   MoveStrategy strategy, const MoveContext &ctx) {
    const int n_routes = static_cast<int>(sol.routes.size());
    std::optional<MoveDelta> best;
    auto consider = [&](const std::optional<MoveDelta> &candidate) {
        if (!candidate) return false;
        if (!best || candidate->delta < best->delta) best = candidate;
        return strategy.apply == Apply::first;
    };

    const bool intra = kind == MoveKind::two_opt || kind == MoveKind::swap_intra ||
                       kind == MoveKind::relocate_intra;
    if (intra) {
        for (int r = 0; r < n_routes; ++r) {
            std::optional<MoveDelta> candidate;
            switch (kind) {
            case MoveKind::two_opt: candidate = scan_two_opt(inst, sol, r, strategy.accept); break;
            case MoveKind::swap_intra: candidate = scan_swap_intra(inst, sol, r, strategy.accept); break;
            default: candidate = scan_relocate_intra(inst, sol, r, strategy.accept); break;
            }
            if (consider(candidate)) return best;
        }
        return best;
    }

    const LoadTable loads = LoadTable::build(inst, sol);
    const bool ordered = kind == MoveKind::one_point; // insertion direction matters
    for (int r1 = 0; r1 < n_routes; ++r1) {
        for (int r2 = ordered ? 0 : r1 + 1; r2 < n_routes; ++r2) {
            if (r1 == r2) continue;
            std::optional<MoveDelta> candidate;
            switch (kind) {
            case MoveKind::one_point:
                candidate = scan_one_point(inst, sol, loads, r1, r2, strategy.accept, ctx);
                break;
            case MoveKind::two_point:
                candidate = scan_two_point(inst, sol, loads, r1, r2, strategy.accept);
                break;
            case MoveKind::two_opt_star:
                candidate = scan_two_opt_star(inst, sol, loads, r1, r2, strategy.accept, ctx);
                break;
            default:
                candidate = scan_cross_string(inst, sol, loads, r1, r2, strategy.accept, ctx);
                break;
            }
            if (consider(candidate)) return best;
        }
    }
    return best;
}

void apply_move(const Instance &inst, Solution &sol, const MoveDelta &move) {
    (void)inst;
    auto &stops1 = sol.routes[static_cast<std::size_t>(move.route1)].stops;
    switch (move.kind) {
    case MoveKind::two_opt: {
        std::reverse(stops1.begin() + move.a, stops1.begin() + move.b + 1);
        break;
    }
    case MoveKind::swap_intra: {
        std::swap(stops1[static_cast<std::size_t>(move.a)], stops1[static_cast<std::size_t>(move.b)]);
        break;
    }
    case MoveKind::relocate_intra: {
        const int f = stops1[static_cast<std::size_t>(move.a)];
        stops1.erase(stops1.begin() + move.a);
        stops1.insert(stops1.begin() + move.b, f);
        break;
    }
    case MoveKind::one_point: {
        auto &stops2 = sol.routes[static_cast<std::size_t>(move.route2)].stops;
        const int f = stops1[static_cast<std::size_t>(move.a)];
        stops1.erase(stops1.begin() + move.a);
        stops2.insert(stops2.begin() + move.b, f);
        break;
    }
    case MoveKind::two_point: {
        auto &stops2 = sol.routes[static_cast<std::size_t>(move.route2)].stops;
        std::swap(stops1[static_cast<std::size_t>(move.a)], stops2[static_cast<std::size_t>(move.b)]);
        break;
    }
    case MoveKind::two_opt_star: {
        auto &stops2 = sol.routes[static_cast<std::size_t>(move.route2)].stops;
        std::vector<int> head1(stops1.begin(), stops1.begin() + move.a);
        std::vector<int> tail1(stops1.begin() + move.a, stops1.end());
        std::vector<int> head2(stops2.begin(), stops2.begin() + move.b);
        std::vector<int> tail2(stops2.begin() + move.b, stops2.end());
        if (move.c == 0) {
            stops1 = head1;
            stops1.insert(stops1.end(), tail2.begin(), tail2.end());
            stops2 = head2;
            stops2.insert(stops2.end(), tail1.begin(), tail1.end());
        } else {
            stops1 = head1;
            stops1.insert(stops1.end(), head2.rbegin(), head2.rend());
            stops2.assign(tail1.rbegin(), tail1.rend());
            stops2.insert(stops2.end(), tail2.begin(), tail2.end());
        }
        break;
    }
    case MoveKind::cross_string: {
        auto &stops2 = sol.routes[static_cast<std::size_t>(move.route2)].stops;
        std::vector<int> s1(stops1.begin() + move.a, stops1.begin() + move.a + move.b);
        std::vector<int> s2(stops2.begin() + move.c, stops2.begin() + move.c + move.d);
        const bool rev_into_r1 = move.e & 1;
        const bool rev_into_r2 = move.e & 2;
        std::vector<int> into1 = s2;
        if (rev_into_r1) std::reverse(into1.begin(), into1.end());
        std::vector<int> into2 = s1;
        if (rev_into_r2) std::reverse(into2.begin(), into2.end());
        stops1.erase(stops1.begin() + move.a, stops1.begin() + move.a + move.b);
        stops1.insert(stops1.begin() + move.a, into1.begin(), into1.end());
        stops2.erase(stops2.begin() + move.c, stops2.begin() + move.c + move.d);
        stops2.insert(stops2.begin() + move.c, into2.begin(), into2.end());
        break;
    }
    }
}

} // namespace ctlrp
