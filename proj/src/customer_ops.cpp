#include "ctlrp/customer_ops.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <deque>
#include <map>

namespace ctlrp {

namespace {

struct State {
    std::vector<int> route_of;          // facility -> route, -1 when closed
    std::vector<int> position_of;       // facility -> index within its route
    std::vector<std::vector<int>> by_facility; // facility -> assigned customers
    std::vector<std::int64_t> fac_load;
    std::vector<std::int64_t> route_load;
    std::vector<std::int64_t> depot_load;

    void rebuild(const Instance &inst, const Solution &sol) {
        route_of.assign(static_cast<std::size_t>(inst.num_facilities()), -1);
        position_of.assign(static_cast<std::size_t>(inst.num_facilities()), -1);
        by_facility.assign(static_cast<std::size_t>(inst.num_facilities()), {});
        fac_load.assign(static_cast<std::size_t>(inst.num_facilities()), 0);
        route_load.assign(sol.routes.size(), 0);
        depot_load.assign(static_cast<std::size_t>(inst.num_depots()), 0);
        for (std::size_t r = 0; r < sol.routes.size(); ++r)
            for (std::size_t k = 0; k < sol.routes[r].stops.size(); ++k) {
                const int f = sol.routes[r].stops[k];
                route_of[static_cast<std::size_t>(f)] = static_cast<int>(r);
                position_of[static_cast<std::size_t>(f)] = static_cast<int>(k);
            }
        for (int c = 0; c < inst.num_customers(); ++c) {
            const int f = sol.assignment[static_cast<std::size_t>(c)];
            if (f < 0) continue; // transiently unassigned
            by_facility[static_cast<std::size_t>(f)].push_back(c);
            fac_load[static_cast<std::size_t>(f)] += inst.customer(c).demand;
        }
        for (std::size_t r = 0; r < sol.routes.size(); ++r) {
            for (int f : sol.routes[r].stops)
                route_load[r] += fac_load[static_cast<std::size_t>(f)];
            depot_load[static_cast<std::size_t>(sol.routes[r].depot)] += route_load[r];
        }
    }
};

int route_node(const Instance &inst, const Route &route, int k) {
    if (k < 0 || k >= static_cast<int>(route.stops.size())) return inst.depot_node(route.depot);
    return inst.facility_node(route.stops[static_cast<std::size_t>(k)]);
}

bool covers(const Instance &inst, int customer, int facility) {
    const auto &cov = inst.customer(customer).coverage;
    return std::binary_search(cov.begin(), cov.end(), facility);
}

// FIFO over facility indices without duplicates.
struct UncheckedQueue {
    std::deque<int> queue;
    std::vector<bool> queued;

    explicit UncheckedQueue(int n) : queued(static_cast<std::size_t>(n), false) {}
    void push(int f) {
        if (!queued[static_cast<std::size_t>(f)]) {
            queued[static_cast<std::size_t>(f)] = true;
            queue.push_back(f);
        }
    }
    int pop() {
        const int f = queue.front();
        queue.pop_front();
        queued[static_cast<std::size_t>(f)] = false;
        return f;
    }
    bool empty() const { return queue.empty(); }
};

} // namespace

Solution open_facility_shift(const Instance &inst, const Solution &sol) {
    Solution out = sol;
    State st;
    st.rebuild(inst, out);

    UncheckedQueue unchecked(inst.num_facilities());
    for (int f = 0; f < inst.num_facilities(); ++f)
        if (st.route_of[static_cast<std::size_t>(f)] >= 0) unchecked.push(f);

    while (!unchecked.empty()) {
        const int f = unchecked.pop();
        const int r = st.route_of[static_cast<std::size_t>(f)];
        if (r < 0) continue; // closed by an earlier transfer
        Route &route = out.routes[static_cast<std::size_t>(r)];
        if (route.stops.size() == 1) continue; // would orphan the route

        const auto &customers = st.by_facility[static_cast<std::size_t>(f)];
        const std::int64_t moved = st.fac_load[static_cast<std::size_t>(f)];

        for (int target : inst.facility_neighbors()[static_cast<std::size_t>(f)]) {
            const int tr = st.route_of[static_cast<std::size_t>(target)];
            if (tr < 0) continue; // needs an open target
            bool coverable = true;
            for (int c : customers)
                if (!covers(inst, c, target)) {
                    coverable = false;
                    break;
                }
            if (!coverable) continue;
            if (static_cast<double>(st.fac_load[static_cast<std::size_t>(target)] + moved) >
                inst.facility(target).capacity)
                continue;
            if (tr != r &&
                static_cast<double>(st.route_load[static_cast<std::size_t>(tr)] + moved) >
                    inst.vehicle_capacity())
                continue;
            const int td = out.routes[static_cast<std::size_t>(tr)].depot;
            if (td != route.depot &&
                static_cast<double>(st.depot_load[static_cast<std::size_t>(td)] + moved) >
                    inst.depot(td).capacity)
                continue;
            const int pos = st.position_of[static_cast<std::size_t>(f)];
            const int prev = route_node(inst, route, pos - 1);
            const int next = route_node(inst, route, pos + 1);
            const double delta = inst.node_cost(prev, next) -
                                 inst.node_cost(prev, inst.facility_node(f)) -
                                 inst.node_cost(inst.facility_node(f), next);
            if (delta >= -kCostTolerance) continue;

            for (int c : std::vector<int>(customers))
                out.assignment[static_cast<std::size_t>(c)] = target;
            route.stops.erase(route.stops.begin() + pos);
            st.rebuild(inst, out);
            unchecked.push(target);
            break;
        }
    }
    return out;
}

Solution closed_facility_shift(const Instance &inst, const Solution &sol) {
    Solution out = sol;
    State st;
    st.rebuild(inst, out);

    UncheckedQueue unchecked(inst.num_facilities());
    for (int f = 0; f < inst.num_facilities(); ++f)
        if (st.route_of[static_cast<std::size_t>(f)] >= 0) unchecked.push(f);

    while (!unchecked.empty()) {
        const int f = unchecked.pop();
        const int r = st.route_of[static_cast<std::size_t>(f)];
        if (r < 0) continue;
        Route &route = out.routes[static_cast<std::size_t>(r)];
        if (route.stops.size() == 1) continue;

        const auto &customers = st.by_facility[static_cast<std::size_t>(f)];
        const std::int64_t moved = st.fac_load[static_cast<std::size_t>(f)];

        for (int target : inst.facility_neighbors()[static_cast<std::size_t>(f)]) {
            if (st.route_of[static_cast<std::size_t>(target)] >= 0) continue; // needs a closed target
            bool coverable = true;
            for (int c : customers)
                if (!covers(inst, c, target)) {
                    coverable = false;
                    break;
                }
            if (!coverable) continue;
            // The replacement keeps route and depot loads unchanged, so the
            // full capacity of the incoming facility is the only bound.
            if (static_cast<double>(moved) > inst.facility(target).capacity) continue;
            const int pos = st.position_of[static_cast<std::size_t>(f)];
            const int prev = route_node(inst, route, pos - 1);
            const int next = route_node(inst, route, pos + 1);
            const double delta = inst.node_cost(prev, inst.facility_node(target)) +
                                 inst.node_cost(inst.facility_node(target), next) -
                                 inst.node_cost(prev, inst.facility_node(f)) -
                                 inst.node_cost(inst.facility_node(f), next);
            if (delta >= -kCostTolerance) continue;

            for (int c : std::vector<int>(customers))
                out.assignment[static_cast<std::size_t>(c)] = target;
            route.stops[static_cast<std::size_t>(pos)] = target;
            st.rebuild(inst, out);
            unchecked.push(target);
            break;
        }
    }
    return out;
}

namespace {

double chain_cost(const Instance &inst, int before, const std::vector<int> &stops, int after) {
    if (stops.empty()) return inst.node_cost(before, after);
    double cost = inst.node_cost(before, inst.facility_node(stops.front()));
    for (std::size_t k = 0; k + 1 < stops.size(); ++k)
        cost += inst.cost_facility_facility(stops[k], stops[k + 1]);
    cost += inst.node_cost(inst.facility_node(stops.back()), after);
    return cost;
}

} // namespace

Solution greedy_string_replacement_pass(const Instance &inst, const Solution &sol, int sl,
                                        DemandOrder order) {
    Solution out = sol;
    State st;
    st.rebuild(inst, out);

    UncheckedQueue unchecked(inst.num_facilities());
    for (int f = 0; f < inst.num_facilities(); ++f)
        if (st.route_of[static_cast<std::size_t>(f)] >= 0) unchecked.push(f);

    while (!unchecked.empty()) {
        const int anchor_facility = unchecked.pop();
        const int r = st.route_of[static_cast<std::size_t>(anchor_facility)];
        if (r < 0) continue;
        Route &route = out.routes[static_cast<std::size_t>(r)];
        const int pos = st.position_of[static_cast<std::size_t>(anchor_facility)];
        const int len = std::min(sl, static_cast<int>(route.stops.size()) - pos);

        const Solution snapshot = out;
        const std::vector<int> cut(route.stops.begin() + pos, route.stops.begin() + pos + len);
        const double old_string_cost =
            chain_cost(inst, route_node(inst, route, pos - 1), cut, route_node(inst, route, pos + len));

        std::vector<int> affected;
        for (int f : cut)
            for (int c : st.by_facility[static_cast<std::size_t>(f)]) affected.push_back(c);

        route.stops.erase(route.stops.begin() + pos, route.stops.begin() + pos + len);
        for (int c : affected) out.assignment[static_cast<std::size_t>(c)] = -1;
        st.rebuild(inst, out);

        const int before = route_node(inst, route, pos - 1);
        const int after = route_node(inst, route, pos);

        // Candidate pools: open facilities on other routes, open facilities
        // on this route, closed facilities (string members included).
        std::vector<bool> other_route(static_cast<std::size_t>(inst.num_facilities()), false);
        std::vector<bool> same_route(static_cast<std::size_t>(inst.num_facilities()), false);
        std::vector<bool> closed_pool(static_cast<std::size_t>(inst.num_facilities()), false);
        for (int c : affected)
            for (int g : inst.customer(c).coverage) {
                const int gr = st.route_of[static_cast<std::size_t>(g)];
                if (gr < 0)
                    closed_pool[static_cast<std::size_t>(g)] = true;
                else if (gr == r)
                    same_route[static_cast<std::size_t>(g)] = true;
                else
                    other_route[static_cast<std::size_t>(g)] = true;
            }

        // Fixed facilities are pinned back into the string with their
        // uniquely-covered customers before anything else is replaced.
        std::vector<int> rebuilt;
        for (int f : cut) {
            bool pinned = false;
            for (int c : affected)
                if (inst.customer(c).coverage.size() == 1 && inst.customer(c).coverage.front() == f) {
                    out.assignment[static_cast<std::size_t>(c)] = f;
                    pinned = true;
                }
            if (pinned) {
                rebuilt.push_back(f);
                closed_pool[static_cast<std::size_t>(f)] = false;
                same_route[static_cast<std::size_t>(f)] = true;
            }
        }
        st.rebuild(inst, out);
        // Loads of the rebuilt string count against this route again.
        std::int64_t string_load = 0;
        for (int f : rebuilt) string_load += st.fac_load[static_cast<std::size_t>(f)];

        std::vector<int> pending;
        for (int c : affected)
            if (out.assignment[static_cast<std::size_t>(c)] < 0) pending.push_back(c);
        std::stable_sort(pending.begin(), pending.end(), [&](int a, int b) {
            if (order == DemandOrder::descending) return inst.customer(a).demand > inst.customer(b).demand;
            return inst.customer(a).demand < inst.customer(b).demand;
        });

        bool failed = false;
        for (int c : pending) {
            const std::int64_t q = inst.customer(c).demand;
            int assigned_to = -1;
            for (int g : inst.customer(c).coverage) {
                if (!other_route[static_cast<std::size_t>(g)]) continue;
                const int gr = st.route_of[static_cast<std::size_t>(g)];
                if (gr < 0) continue;
                if (static_cast<double>(st.fac_load[static_cast<std::size_t>(g)] + q) >
                    inst.facility(g).capacity)
                    continue;
                if (static_cast<double>(st.route_load[static_cast<std::size_t>(gr)] + q) >
                    inst.vehicle_capacity())
                    continue;
                const int gd = out.routes[static_cast<std::size_t>(gr)].depot;
                if (static_cast<double>(st.depot_load[static_cast<std::size_t>(gd)] + q) >
                    inst.depot(gd).capacity)
                    continue;
                assigned_to = g;
                break;
            }
            if (assigned_to < 0) {
                for (int g : inst.customer(c).coverage) {
                    if (!same_route[static_cast<std::size_t>(g)]) continue;
                    if (static_cast<double>(st.fac_load[static_cast<std::size_t>(g)] + q) >
                        inst.facility(g).capacity)
                        continue;
                    // Same-route targets re-absorb demand the route already
                    // carried, so the vehicle check cannot fail; the string
                    // members will be re-spliced below.
                    assigned_to = g;
                    break;
                }
            }
            if (assigned_to < 0) {
                // Cheapest insertion of a coverable closed facility into the
                // rebuilt string.
                int best_facility = -1;
                int best_slot = -1;
                double best_cost = 0.0;
                for (int g : inst.customer(c).coverage) {
                    if (!closed_pool[static_cast<std::size_t>(g)]) continue;
                    if (static_cast<double>(q) > inst.facility(g).capacity) continue;
                    for (int slot = 0; slot <= static_cast<int>(rebuilt.size()); ++slot) {
                        const int u = slot == 0 ? before
                                                : inst.facility_node(rebuilt[static_cast<std::size_t>(slot - 1)]);
                        const int v = slot == static_cast<int>(rebuilt.size())
                                          ? after
                                          : inst.facility_node(rebuilt[static_cast<std::size_t>(slot)]);
                        const double cost = inst.node_cost(u, inst.facility_node(g)) +
                                            inst.node_cost(inst.facility_node(g), v) -
                                            inst.node_cost(u, v);
                        if (best_facility < 0 || cost < best_cost) {
                            best_facility = g;
                            best_slot = slot;
                            best_cost = cost;
                        }
                    }
                }
                if (best_facility < 0) {
                    failed = true;
                    break;
                }
                rebuilt.insert(rebuilt.begin() + best_slot, best_facility);
                closed_pool[static_cast<std::size_t>(best_facility)] = false;
                same_route[static_cast<std::size_t>(best_facility)] = true;
                assigned_to = best_facility;
            }
            out.assignment[static_cast<std::size_t>(c)] = assigned_to;
            // Keep aggregates current without a full rebuild.
            st.fac_load[static_cast<std::size_t>(assigned_to)] += q;
            const int ar = st.route_of[static_cast<std::size_t>(assigned_to)];
            if (ar >= 0) {
                st.route_load[static_cast<std::size_t>(ar)] += q;
                st.depot_load[static_cast<std::size_t>(out.routes[static_cast<std::size_t>(ar)].depot)] += q;
            } else {
                string_load += q; // rebuilt-string member, spliced below
            }
        }

        bool keep = !failed;
        if (keep && rebuilt.empty() && route.stops.empty()) keep = false; // would orphan the route
        if (keep) {
            const double new_string_cost = chain_cost(inst, before, rebuilt, after);
            keep = new_string_cost < old_string_cost - kCostTolerance;
        }
        if (keep) {
            route.stops.insert(route.stops.begin() + pos, rebuilt.begin(), rebuilt.end());
            st.rebuild(inst, out);
            for (int f : rebuilt) unchecked.push(f);
        } else {
            out = snapshot;
            st.rebuild(inst, out);
        }
    }
    return out;
}

Solution greedy_string_replacement(const Instance &inst, const Solution &sol, int sl) {
    Solution current = sol;
    double cost = evaluate(inst, current).total;
    while (true) {
        Solution next = greedy_string_replacement_pass(inst, current, sl, DemandOrder::descending);
        next = greedy_string_replacement_pass(inst, next, sl, DemandOrder::ascending);
        const double next_cost = evaluate(inst, next).total;
        if (next_cost >= cost - kCostTolerance) return current;
        current = std::move(next);
        cost = next_cost;
    }
}

std::optional<CustomerIpModel> build_customer_ip(const Instance &inst, const Solution &sol, int f,
                                                 int partner) {
    State st;
    st.rebuild(inst, sol);
    if (st.route_of[static_cast<std::size_t>(f)] < 0 ||
        st.route_of[static_cast<std::size_t>(partner)] < 0 || f == partner)
        return std::nullopt;

    CustomerIpModel model;
    model.removed_a = f;
    model.removed_b = partner;

    const int n_routes = static_cast<int>(sol.routes.size());
    double original_cost = 0.0;
    for (const auto &route : sol.routes) original_cost += route_cost(inst, route);

    model.partial_stops.assign(static_cast<std::size_t>(n_routes), {});
    for (int k = 0; k < n_routes; ++k) {
        for (int g : sol.routes[static_cast<std::size_t>(k)].stops)
            if (g != f && g != partner)
                model.partial_stops[static_cast<std::size_t>(k)].push_back(g);
        if (model.partial_stops[static_cast<std::size_t>(k)].empty()) return std::nullopt;
    }

    double partial_cost = 0.0;
    for (int k = 0; k < n_routes; ++k)
        partial_cost += chain_cost(inst, inst.depot_node(sol.routes[static_cast<std::size_t>(k)].depot),
                                   model.partial_stops[static_cast<std::size_t>(k)],
                                   inst.depot_node(sol.routes[static_cast<std::size_t>(k)].depot));
    model.removal_saving = original_cost - partial_cost;

    for (int c : st.by_facility[static_cast<std::size_t>(f)]) model.customers.push_back(c);
    for (int c : st.by_facility[static_cast<std::size_t>(partner)]) model.customers.push_back(c);
    std::sort(model.customers.begin(), model.customers.end());

    for (int g = 0; g < inst.num_facilities(); ++g)
        if (st.route_of[static_cast<std::size_t>(g)] < 0 || g == f || g == partner)
            model.closed_facilities.push_back(g);

    // Alternative routes: the original first, then single and pair
    // insertions of closed facilities that undercut the original cost.
    model.alternatives.assign(static_cast<std::size_t>(n_routes), {});
    for (int k = 0; k < n_routes; ++k) {
        const auto &partial = model.partial_stops[static_cast<std::size_t>(k)];
        const int depot_node = inst.depot_node(sol.routes[static_cast<std::size_t>(k)].depot);
        const double partial_route_cost = chain_cost(inst, depot_node, partial, depot_node);
        const double original_route_cost = route_cost(inst, sol.routes[static_cast<std::size_t>(k)]);

        RouteAlternative original;
        original.stops = sol.routes[static_cast<std::size_t>(k)].stops;
        original.extension_cost = original_route_cost - partial_route_cost;
        original.is_original = true;
        model.alternatives[static_cast<std::size_t>(k)].push_back(std::move(original));

        std::map<int, std::pair<int, double>> single; // facility -> (slot, chain cost)
        for (int g : model.closed_facilities) {
            int best_slot = -1;
            double best_cost = 0.0;
            for (int slot = 0; slot <= static_cast<int>(partial.size()); ++slot) {
                std::vector<int> stops = partial;
                stops.insert(stops.begin() + slot, g);
                const double cost = chain_cost(inst, depot_node, stops, depot_node);
                if (best_slot < 0 || cost < best_cost) {
                    best_slot = slot;
                    best_cost = cost;
                }
            }
            single[g] = {best_slot, best_cost};
            if (best_cost < original_route_cost - kCostTolerance) {
                RouteAlternative alt;
                alt.stops = partial;
                alt.stops.insert(alt.stops.begin() + best_slot, g);
                alt.extension_cost = best_cost - partial_route_cost;
                model.alternatives[static_cast<std::size_t>(k)].push_back(std::move(alt));
            }
        }
        for (std::size_t i = 0; i < model.closed_facilities.size(); ++i) {
            for (std::size_t j = i + 1; j < model.closed_facilities.size(); ++j) {
                const int g1 = model.closed_facilities[i];
                const int g2 = model.closed_facilities[j];
                const auto [slot1, cost1] = single[g1];
                const auto [slot2, cost2] = single[g2];
                std::vector<int> stops = partial;
                if (slot1 != slot2) {
                    if (slot1 > slot2) {
                        stops.insert(stops.begin() + slot1, g1);
                        stops.insert(stops.begin() + slot2, g2);
                    } else {
                        stops.insert(stops.begin() + slot2, g2);
                        stops.insert(stops.begin() + slot1, g1);
                    }
                } else {
                    std::vector<int> forward = partial;
                    forward.insert(forward.begin() + slot1, g2);
                    forward.insert(forward.begin() + slot1, g1);
                    std::vector<int> backward = partial;
                    backward.insert(backward.begin() + slot1, g1);
                    backward.insert(backward.begin() + slot1, g2);
                    stops = chain_cost(inst, depot_node, forward, depot_node) <=
                                    chain_cost(inst, depot_node, backward, depot_node)
                                ? forward
                                : backward;
                }
                const double cost = chain_cost(inst, depot_node, stops, depot_node);
                if (cost < original_route_cost - kCostTolerance) {
                    RouteAlternative alt;
                    alt.stops = std::move(stops);
                    alt.extension_cost = cost - partial_route_cost;
                    model.alternatives[static_cast<std::size_t>(k)].push_back(std::move(alt));
                }
            }
        }
    }

    // Variable layout: x block then y block.
    std::vector<bool> closed_mark(static_cast<std::size_t>(inst.num_facilities()), false);
    for (int g : model.closed_facilities) closed_mark[static_cast<std::size_t>(g)] = true;

    std::map<std::array<int, 3>, int> x_index;
    for (std::size_t ci = 0; ci < model.customers.size(); ++ci) {
        const int c = model.customers[ci];
        for (int k = 0; k < n_routes; ++k) {
            for (int g : inst.customer(c).coverage) {
                const bool resident =
                    std::find(model.partial_stops[static_cast<std::size_t>(k)].begin(),
                              model.partial_stops[static_cast<std::size_t>(k)].end(),
                              g) != model.partial_stops[static_cast<std::size_t>(k)].end();
                if (!resident && !closed_mark[static_cast<std::size_t>(g)]) continue;
                x_index[{static_cast<int>(ci), k, g}] = static_cast<int>(model.x_vars.size());
                model.x_vars.push_back({static_cast<int>(ci), k, g});
            }
        }
    }
    const int x_count = static_cast<int>(model.x_vars.size());
    std::map<std::pair<int, int>, int> y_index;
    for (int k = 0; k < n_routes; ++k)
        for (std::size_t a = 0; a < model.alternatives[static_cast<std::size_t>(k)].size(); ++a) {
            y_index[{k, static_cast<int>(a)}] = x_count + static_cast<int>(model.y_vars.size());
            model.y_vars.push_back({k, static_cast<int>(a)});
        }

    MilpProblem &p = model.problem;
    p.num_vars = x_count + static_cast<int>(model.y_vars.size());
    p.objective.assign(static_cast<std::size_t>(p.num_vars), 0.0);
    for (std::size_t y = 0; y < model.y_vars.size(); ++y) {
        const auto [k, a] = model.y_vars[y];
        p.objective[static_cast<std::size_t>(x_count) + y] =
            model.alternatives[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)].extension_cost;
    }

    // Covering: every unassigned customer lands somewhere.
    for (std::size_t ci = 0; ci < model.customers.size(); ++ci) {
        MilpConstraint row;
        for (std::size_t xi = 0; xi < model.x_vars.size(); ++xi)
            if (model.x_vars[xi][0] == static_cast<int>(ci)) row.terms.push_back({static_cast<int>(xi), 1.0});
        row.sense = RowSense::eq;
        row.rhs = 1.0;
        p.constraints.push_back(std::move(row));
    }

    auto alternative_contains = [&](int k, int a, int g) {
        const auto &stops = model.alternatives[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)].stops;
        return std::find(stops.begin(), stops.end(), g) != stops.end();
    };

    // Closed facilities consume capacity only inside a selected alternative.
    for (int k = 0; k < n_routes; ++k) {
        for (int g : model.closed_facilities) {
            MilpConstraint row;
            bool any = false;
            for (std::size_t xi = 0; xi < model.x_vars.size(); ++xi) {
                if (model.x_vars[xi][1] != k || model.x_vars[xi][2] != g) continue;
                const int c = model.customers[static_cast<std::size_t>(model.x_vars[xi][0])];
                const double demand = static_cast<double>(inst.customer(c).demand);
                if (demand > 0.0) {
                    row.terms.push_back({static_cast<int>(xi), demand});
                    any = true;
                } else {
                    // Zero-demand customers still need the route link.
                    MilpConstraint link;
                    link.terms.push_back({static_cast<int>(xi), 1.0});
                    for (std::size_t y = 0; y < model.y_vars.size(); ++y)
                        if (model.y_vars[y].first == k && alternative_contains(k, model.y_vars[y].second, g))
                            link.terms.push_back({x_count + static_cast<int>(y), -1.0});
                    link.sense = RowSense::le;
                    link.rhs = 0.0;
                    p.constraints.push_back(std::move(link));
                }
            }
            if (!any) continue;
            for (std::size_t y = 0; y < model.y_vars.size(); ++y)
                if (model.y_vars[y].first == k && alternative_contains(k, model.y_vars[y].second, g))
                    row.terms.push_back({x_count + static_cast<int>(y), -inst.facility(g).capacity});
            row.sense = RowSense::le;
            row.rhs = 0.0;
            p.constraints.push_back(std::move(row));
        }
        // Residents keep their existing load; only the residual is offered.
        for (int g : model.partial_stops[static_cast<std::size_t>(k)]) {
            MilpConstraint row;
            for (std::size_t xi = 0; xi < model.x_vars.size(); ++xi) {
                if (model.x_vars[xi][1] != k || model.x_vars[xi][2] != g) continue;
                const int c = model.customers[static_cast<std::size_t>(model.x_vars[xi][0])];
                row.terms.push_back({static_cast<int>(xi), static_cast<double>(inst.customer(c).demand)});
            }
            if (row.terms.empty()) continue;
            row.sense = RowSense::le;
            row.rhs = inst.facility(g).capacity - static_cast<double>(st.fac_load[static_cast<std::size_t>(g)]);
            p.constraints.push_back(std::move(row));
        }
    }

    // Vehicle residual per partial route.
    std::vector<std::int64_t> partial_load(static_cast<std::size_t>(n_routes), 0);
    for (int k = 0; k < n_routes; ++k)
        for (int g : model.partial_stops[static_cast<std::size_t>(k)])
            partial_load[static_cast<std::size_t>(k)] += st.fac_load[static_cast<std::size_t>(g)];
    for (int k = 0; k < n_routes; ++k) {
        MilpConstraint row;
        for (std::size_t xi = 0; xi < model.x_vars.size(); ++xi) {
            if (model.x_vars[xi][1] != k) continue;
            const int c = model.customers[static_cast<std::size_t>(model.x_vars[xi][0])];
            row.terms.push_back({static_cast<int>(xi), static_cast<double>(inst.customer(c).demand)});
        }
        if (row.terms.empty()) continue;
        row.sense = RowSense::le;
        row.rhs = inst.vehicle_capacity() - static_cast<double>(partial_load[static_cast<std::size_t>(k)]);
        p.constraints.push_back(std::move(row));
    }

    // Depot residual over the selected depots.
    for (int d = 0; d < inst.num_depots(); ++d) {
        std::int64_t existing = 0;
        bool hosts = false;
        for (int k = 0; k < n_routes; ++k)
            if (sol.routes[static_cast<std::size_t>(k)].depot == d) {
                hosts = true;
                existing += partial_load[static_cast<std::size_t>(k)];
            }
        if (!hosts) continue;
        MilpConstraint row;
        for (std::size_t xi = 0; xi < model.x_vars.size(); ++xi) {
            const int k = model.x_vars[xi][1];
            if (sol.routes[static_cast<std::size_t>(k)].depot != d) continue;
            const int c = model.customers[static_cast<std::size_t>(model.x_vars[xi][0])];
            row.terms.push_back({static_cast<int>(xi), static_cast<double>(inst.customer(c).demand)});
        }
        if (row.terms.empty()) continue;
        row.sense = RowSense::le;
        row.rhs = inst.depot(d).capacity - static_cast<double>(existing);
        p.constraints.push_back(std::move(row));
    }

    // At most one alternative per route; partial routes here always keep a
    // facility, so the "exactly one" case for emptied routes cannot arise.
    for (int k = 0; k < n_routes; ++k) {
        MilpConstraint row;
        for (std::size_t y = 0; y < model.y_vars.size(); ++y)
            if (model.y_vars[y].first == k) row.terms.push_back({x_count + static_cast<int>(y), 1.0});
        row.sense = model.partial_stops[static_cast<std::size_t>(k)].empty() ? RowSense::eq : RowSense::le;
        row.rhs = 1.0;
        p.constraints.push_back(std::move(row));
    }
    // Each closed facility may enter at most one selected route.
    for (int g : model.closed_facilities) {
        MilpConstraint row;
        for (std::size_t y = 0; y < model.y_vars.size(); ++y)
            if (alternative_contains(model.y_vars[y].first, model.y_vars[y].second, g))
                row.terms.push_back({x_count + static_cast<int>(y), 1.0});
        if (row.terms.empty()) continue;
        row.sense = RowSense::le;
        row.rhs = 1.0;
        p.constraints.push_back(std::move(row));
    }

    // Warm start: original routes restored, original assignment kept.
    std::vector<char> warm(static_cast<std::size_t>(p.num_vars), 0);
    for (std::size_t ci = 0; ci < model.customers.size(); ++ci) {
        const int c = model.customers[ci];
        const int g = sol.assignment[static_cast<std::size_t>(c)];
        const int k = st.route_of[static_cast<std::size_t>(g)];
        auto it = x_index.find({static_cast<int>(ci), k, g});
        if (it != x_index.end()) warm[static_cast<std::size_t>(it->second)] = 1;
    }
    const int route_f = st.route_of[static_cast<std::size_t>(f)];
    const int route_partner = st.route_of[static_cast<std::size_t>(partner)];
    for (int k : {route_f, route_partner}) {
        auto it = y_index.find({k, 0});
        if (it != y_index.end()) warm[static_cast<std::size_t>(it->second)] = 1;
    }
    p.warm_start = std::move(warm);
    return model;
}

Solution decode_customer_ip(const Instance &inst, const Solution &sol, const CustomerIpModel &model,
                            const std::vector<char> &assignment) {
    Solution out = sol;
    const int x_count = static_cast<int>(model.x_vars.size());
    for (std::size_t k = 0; k < model.partial_stops.size(); ++k)
        out.routes[k].stops = model.partial_stops[k];
    for (std::size_t y = 0; y < model.y_vars.size(); ++y) {
        if (!assignment[static_cast<std::size_t>(x_count) + y]) continue;
        const auto [k, a] = model.y_vars[y];
        out.routes[static_cast<std::size_t>(k)].stops =
            model.alternatives[static_cast<std::size_t>(k)][static_cast<std::size_t>(a)].stops;
    }
    for (std::size_t xi = 0; xi < model.x_vars.size(); ++xi) {
        if (!assignment[xi]) continue;
        const auto [ci, k, g] = model.x_vars[xi];
        (void)k;
        out.assignment[static_cast<std::size_t>(model.customers[static_cast<std::size_t>(ci)])] = g;
    }
    // Postprocessing: drop facilities that ended up with no customers.
    std::vector<bool> used(static_cast<std::size_t>(inst.num_facilities()), false);
    for (int g : out.assignment) used[static_cast<std::size_t>(g)] = true;
    for (auto &route : out.routes) {
        std::vector<int> kept;
        for (int g : route.stops)
            if (used[static_cast<std::size_t>(g)]) kept.push_back(g);
        route.stops = std::move(kept);
    }
    return out;
}

Solution customer_ip_procedure(const Instance &inst, const Solution &sol,
                               const CustomerIpOptions &opts) {
    Solution out = sol;
    State st;
    st.rebuild(inst, out);

    std::vector<int> snapshot;
    for (int f = 0; f < inst.num_facilities(); ++f)
        if (st.route_of[static_cast<std::size_t>(f)] >= 0) snapshot.push_back(f);
    const int threshold = opts.iteration_threshold >= 0 ? opts.iteration_threshold
                                                        : static_cast<int>(snapshot.size());

    std::vector<bool> considered(static_cast<std::size_t>(inst.num_facilities()), false);
    int iterations = 0;
    for (int f : snapshot) {
        if (++iterations > threshold) break;
        if (considered[static_cast<std::size_t>(f)] || inst.facility_fixed(f)) continue;
        st.rebuild(inst, out);
        const int rf = st.route_of[static_cast<std::size_t>(f)];
        if (rf < 0) continue;
        if (out.routes[static_cast<std::size_t>(rf)].stops.size() < 2) continue;

        // Closest open partner whose removal also keeps every route nonempty.
        int partner = -1;
        double partner_cost = 0.0;
        for (int g = 0; g < inst.num_facilities(); ++g) {
            if (g == f || considered[static_cast<std::size_t>(g)] || inst.facility_fixed(g)) continue;
            const int rg = st.route_of[static_cast<std::size_t>(g)];
            if (rg < 0) continue;
            const std::size_t needed = rg == rf ? 3 : 2;
            if (out.routes[static_cast<std::size_t>(rg)].stops.size() < needed) continue;
            const double c = inst.cost_facility_facility(f, g);
            if (partner < 0 || c < partner_cost) {
                partner = g;
                partner_cost = c;
            }
        }
        if (partner < 0) continue;

        auto model = build_customer_ip(inst, out, f, partner);
        if (!model) continue;
        model->problem.node_budget = opts.node_budget;
        model->problem.time_budget_seconds = opts.time_budget_seconds;
        MilpResult result = solve(model->problem);
        considered[static_cast<std::size_t>(f)] = true;
        considered[static_cast<std::size_t>(partner)] = true;
        if (result.status != MilpStatus::optimal) continue; // skip on budget or failure
        const double objective = result.objective - model->removal_saving;
        if (objective < -kCostTolerance)
            out = decode_customer_ip(inst, out, *model, result.assignment);
    }
    return out;
}

} // namespace ctlrp
