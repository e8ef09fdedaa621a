#include "ctlrp/construction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctlrp {

namespace {

// Per-facility room left for new customers; a facility can never take more
// demand than one vehicle carries, so the vehicle capacity caps it too.
double facility_room(const Instance &inst, int f, std::int64_t load) {
    return std::min(inst.facility(f).capacity, inst.vehicle_capacity()) - static_cast<double>(load);
}

std::optional<CustomerAssignment> try_assign_customers(const Instance &inst, Rng &rng) {
    const int n_cust = inst.num_customers();
    const int n_fac = inst.num_facilities();

    std::vector<int> order(static_cast<std::size_t>(n_cust));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return inst.customer(a).coverage.size() < inst.customer(b).coverage.size();
    });

    std::vector<int> assignment(static_cast<std::size_t>(n_cust), -1);
    std::vector<std::int64_t> load(static_cast<std::size_t>(n_fac), 0);
    std::vector<bool> open(static_cast<std::size_t>(n_fac), false);

    int unassigned = n_cust;
    while (unassigned > 0) {
        // Most constrained customer first, random covering facility for it,
        // then greedily pull in everything else that facility can cover.
        int c = -1;
        for (int candidate : order)
            if (assignment[static_cast<std::size_t>(candidate)] < 0) {
                c = candidate;
                break;
            }
        std::vector<int> candidates;
        for (int f : inst.customer(c).coverage)
            if (facility_room(inst, f, load[static_cast<std::size_t>(f)]) >=
                static_cast<double>(inst.customer(c).demand))
                candidates.push_back(f);
        if (candidates.empty()) return std::nullopt;
        const int f = candidates[static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<std::int64_t>(candidates.size()) - 1))];
        open[static_cast<std::size_t>(f)] = true;
        assignment[static_cast<std::size_t>(c)] = f;
        load[static_cast<std::size_t>(f)] += inst.customer(c).demand;
        --unassigned;
        for (int other : order) {
            if (assignment[static_cast<std::size_t>(other)] >= 0) continue;
            const auto &cov = inst.customer(other).coverage;
            if (!std::binary_search(cov.begin(), cov.end(), f)) continue;
            if (facility_room(inst, f, load[static_cast<std::size_t>(f)]) <
                static_cast<double>(inst.customer(other).demand))
                continue;
            assignment[static_cast<std::size_t>(other)] = f;
            load[static_cast<std::size_t>(f)] += inst.customer(other).demand;
            --unassigned;
        }
    }

    // Fewer open facilities than vehicles: shift single customers onto
    // closed facilities until M of them are open.
    auto open_count = [&] { return static_cast<int>(std::count(open.begin(), open.end(), true)); };
    while (open_count() < inst.vehicle_count()) {
        bool shifted = false;
        std::vector<int> customers(static_cast<std::size_t>(n_cust));
        std::iota(customers.begin(), customers.end(), 0);
        shuffle(rng, customers);
        for (int c : customers) {
            const int from = assignment[static_cast<std::size_t>(c)];
            // Moving the last customer away would just close the donor.
            int donors = 0;
            for (int other = 0; other < n_cust; ++other)
                if (assignment[static_cast<std::size_t>(other)] == from) ++donors;
            if (donors < 2) continue;
            for (int f : inst.customer(c).coverage) {
                if (open[static_cast<std::size_t>(f)]) continue;
                if (facility_room(inst, f, load[static_cast<std::size_t>(f)]) <
                    static_cast<double>(inst.customer(c).demand))
                    continue;
                load[static_cast<std::size_t>(from)] -= inst.customer(c).demand;
                load[static_cast<std::size_t>(f)] += inst.customer(c).demand;
                assignment[static_cast<std::size_t>(c)] = f;
                open[static_cast<std::size_t>(f)] = true;
                shifted = true;
                break;
            }
            if (shifted) break;
        }
        if (!shifted) return std::nullopt;
    }

    CustomerAssignment out;
    out.assignment = std::move(assignment);
    for (int f = 0; f < n_fac; ++f)
        if (open[static_cast<std::size_t>(f)]) out.open_facilities.push_back(f);
    return out;
}

struct RouteBuild {
    int depot = 0;
    std::vector<int> stops;
    std::int64_t demand = 0;
};

std::optional<Solution> try_assign_routes(const Instance &inst, const CustomerAssignment &assigned,
                                          Rng &rng) {
    const int n_dep = inst.num_depots();
    std::vector<std::int64_t> fac_load(static_cast<std::size_t>(inst.num_facilities()), 0);
    for (int c = 0; c < inst.num_customers(); ++c)
        fac_load[static_cast<std::size_t>(assigned.assignment[static_cast<std::size_t>(c)])] +=
            inst.customer(c).demand;

    std::vector<int> facilities = assigned.open_facilities;
    shuffle(rng, facilities);

    std::vector<RouteBuild> routes;
    std::vector<std::int64_t> depot_load(static_cast<std::size_t>(n_dep), 0);
    std::vector<bool> depot_open(static_cast<std::size_t>(n_dep), false);

    auto nonempty_routes = [&] {
        int n = 0;
        for (const auto &r : routes)
            if (!r.stops.empty()) ++n;
        return n;
    };

    for (int f : facilities) {
        const std::int64_t q = fac_load[static_cast<std::size_t>(f)];
        std::vector<int> feasible;
        const bool at_route_limit = nonempty_routes() >= inst.vehicle_count();
        for (std::size_t r = 0; r < routes.size(); ++r) {
            if (at_route_limit && routes[r].stops.empty()) continue;
            if (static_cast<double>(routes[r].demand + q) > inst.vehicle_capacity()) continue;
            if (static_cast<double>(depot_load[static_cast<std::size_t>(routes[r].depot)] + q) >
                inst.depot(routes[r].depot).capacity)
                continue;
            feasible.push_back(static_cast<int>(r));
        }
        int target = -1;
        if (!feasible.empty()) {
            target = feasible[static_cast<std::size_t>(
                uniform_int(rng, 0, static_cast<std::int64_t>(feasible.size()) - 1))];
        } else {
            if (at_route_limit) return std::nullopt;
            // Open the closest unopened depot with room and give it a random
            // number of empty routes its capacity could fill.
            int best = -1;
            double best_cost = 0.0;
            for (int d = 0; d < n_dep; ++d) {
                if (depot_open[static_cast<std::size_t>(d)]) continue;
                if (static_cast<double>(depot_load[static_cast<std::size_t>(d)] + q) >
                    inst.depot(d).capacity)
                    continue;
                const double c = inst.cost_depot_facility(d, f);
                if (best < 0 || c < best_cost) {
                    best = d;
                    best_cost = c;
                }
            }
            if (best >= 0) {
                depot_open[static_cast<std::size_t>(best)] = true;
                const auto max_routes = std::max<std::int64_t>(
                    1, static_cast<std::int64_t>(inst.depot(best).capacity / inst.vehicle_capacity()));
                const auto count = uniform_int(rng, 1, max_routes);
                for (std::int64_t k = 0; k < count; ++k) routes.push_back(RouteBuild{best, {}, 0});
                target = static_cast<int>(routes.size() - count);
            } else {
                // Every depot already open: start one more route at the
                // nearest open depot that still has capacity headroom.
                for (int d = 0; d < n_dep; ++d) {
                    if (!depot_open[static_cast<std::size_t>(d)]) continue;
                    if (static_cast<double>(depot_load[static_cast<std::size_t>(d)] + q) >
                        inst.depot(d).capacity)
                        continue;
                    const double c = inst.cost_depot_facility(d, f);
                    if (best < 0 || c < best_cost) {
                        best = d;
                        best_cost = c;
                    }
                }
                if (best < 0) return std::nullopt;
                routes.push_back(RouteBuild{best, {}, 0});
                target = static_cast<int>(routes.size() - 1);
            }
        }
        auto &route = routes[static_cast<std::size_t>(target)];
        route.stops.push_back(f);
        route.demand += q;
        depot_load[static_cast<std::size_t>(route.depot)] += q;
    }

    // Drop routes that never received a stop, then split until M remain.
    std::vector<RouteBuild> kept;
    for (auto &r : routes)
        if (!r.stops.empty()) kept.push_back(std::move(r));
    if (static_cast<int>(kept.size()) > inst.vehicle_count()) return std::nullopt;

    while (static_cast<int>(kept.size()) < inst.vehicle_count()) {
        // Split the route whose best boundary divides demand most evenly.
        int best_route = -1;
        std::size_t best_cut = 0;
        std::int64_t best_gap = 0;
        for (std::size_t r = 0; r < kept.size(); ++r) {
            if (kept[r].stops.size() < 2) continue;
            std::int64_t head = 0;
            for (std::size_t cut = 1; cut < kept[r].stops.size(); ++cut) {
                head += fac_load[static_cast<std::size_t>(kept[r].stops[cut - 1])];
                const std::int64_t gap = std::abs(2 * head - kept[r].demand);
                if (best_route < 0 || gap < best_gap) {
                    best_route = static_cast<int>(r);
                    best_cut = cut;
                    best_gap = gap;
                }
            }
        }
        if (best_route < 0) return std::nullopt;
        auto &src = kept[static_cast<std::size_t>(best_route)];
        RouteBuild tail;
        tail.depot = src.depot;
        tail.stops.assign(src.stops.begin() + static_cast<std::ptrdiff_t>(best_cut), src.stops.end());
        src.stops.resize(best_cut);
        for (int f : tail.stops) {
            tail.demand += fac_load[static_cast<std::size_t>(f)];
        }
        src.demand -= tail.demand;
        kept.push_back(std::move(tail));
    }

    Solution sol;
    sol.assignment = assigned.assignment;
    for (auto &r : kept) sol.routes.push_back(Route{r.depot, std::move(r.stops)});
    return sol;
}

} // namespace

std::optional<CustomerAssignment> assign_customers(const Instance &inst, Rng &rng,
                                                   const ConstructionOptions &opts) {
    for (int attempt = 0; attempt < opts.retries_per_step; ++attempt)
        if (auto result = try_assign_customers(inst, rng)) return result;
    return std::nullopt;
}

std::optional<Solution> assign_routes(const Instance &inst, const CustomerAssignment &assigned,
                                      Rng &rng, const ConstructionOptions &opts) {
    if (static_cast<int>(assigned.open_facilities.size()) < inst.vehicle_count()) return std::nullopt;
    for (int attempt = 0; attempt < opts.retries_per_step; ++attempt)
        if (auto result = try_assign_routes(inst, assigned, rng)) return result;
    return std::nullopt;
}

std::optional<Solution> construct(const Instance &inst, Rng &rng, const ConstructionOptions &opts) {
    auto assigned = assign_customers(inst, rng, opts);
    if (!assigned) return std::nullopt;
    auto sol = assign_routes(inst, *assigned, rng, opts);
    if (sol) return sol;
    // Routing dead-ended for this assignment; retry the whole pipeline with
    // fresh customer choices.
    for (int attempt = 0; attempt < opts.retries_per_step; ++attempt) {
        assigned = assign_customers(inst, rng, opts);
        if (!assigned) return std::nullopt;
        if (auto retry = assign_routes(inst, *assigned, rng, opts)) return retry;
    }
    return std::nullopt;
}

} // namespace ctlrp
