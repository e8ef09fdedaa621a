#ifndef CTLRP_TEST_HELPERS_HPP
#define CTLRP_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "ctlrp/construction.hpp"
#include "ctlrp/core.hpp"
#include "ctlrp/rng.hpp"

namespace ctlrp::testing {

// Fig.-1-shaped fixture: two depots, four facilities (index 1 never used),
// ten unit-demand customers. Costs are pinned via an explicit matrix so the
// documented sums are exact.
inline Instance figure_one_instance() {
    std::vector<Depot> depots{
        {0, 2.0, 10.0, {0.0, 0.0}},
        {1, 3.0, 10.0, {10.0, 0.0}},
    };
    std::vector<Facility> facilities{
        {2, 6.0, {2.0, 0.0}},  // paper facility 2
        {3, 6.0, {1.0, 2.0}},  // paper facility 3
        {4, 6.0, {6.0, 3.0}},  // paper facility 4 (not selected)
        {5, 6.0, {10.0, 2.0}}, // paper facility 5
    };
    // Node order: depot0, depot1, f2, f3, f4, f5.
    std::vector<std::vector<double>> cost{
        {0, 12, 4, 3, 9, 11},
        {12, 0, 9, 10, 5, 4},
        {4, 9, 0, 2, 6, 8},
        {3, 10, 2, 0, 5, 9},
        {9, 5, 6, 5, 0, 4},
        {11, 4, 8, 9, 4, 0},
    };
    std::vector<Customer> customers;
    for (int k = 0; k < 3; ++k) customers.push_back({10 + k, 1, {1.0, 2.0}, {1}});     // facility 3
    for (int k = 0; k < 3; ++k) customers.push_back({13 + k, 1, {2.0, 0.0}, {0}});     // facility 2
    for (int k = 0; k < 4; ++k) customers.push_back({16 + k, 1, {10.0, 2.0}, {3, 2}}); // facility 5
    return Instance(std::move(depots), std::move(facilities), std::move(customers), 2, 6.0,
                    std::move(cost));
}

inline Solution figure_one_solution() {
    Solution sol;
    sol.routes.push_back(Route{0, {1, 0}}); // depot 0: facilities 3 then 2
    sol.routes.push_back(Route{1, {3}});    // depot 1: facility 5
    sol.assignment = {1, 1, 1, 0, 0, 0, 3, 3, 3, 3};
    return sol;
}

struct RandomInstanceParams {
    int min_depots = 1, max_depots = 3;
    int min_facilities = 3, max_facilities = 8;
    int min_customers = 4, max_customers = 16;
    int max_coverage = 3;
    std::int64_t max_demand = 8;
    int min_vehicles = 2, max_vehicles = 4;
};

// Random geometric instance with generous capacities, so construction
// nearly always succeeds.
inline Instance random_instance(Rng &rng, const RandomInstanceParams &p = {}) {
    const int n_dep = static_cast<int>(uniform_int(rng, p.min_depots, p.max_depots));
    const int n_fac = static_cast<int>(uniform_int(rng, std::max(p.min_facilities, p.min_vehicles),
                                                   p.max_facilities));
    const int n_cust = static_cast<int>(uniform_int(rng, std::max(p.min_customers, n_fac),
                                                    p.max_customers));
    const int vehicles =
        static_cast<int>(uniform_int(rng, p.min_vehicles, std::min(p.max_vehicles, n_fac)));

    std::vector<Depot> depots;
    for (int d = 0; d < n_dep; ++d)
        depots.push_back({d, uniform_real(rng, 1.0, 50.0), 0.0,
                          {uniform_real(rng, 0.0, 100.0), uniform_real(rng, 0.0, 100.0)}});
    std::vector<Facility> facilities;
    for (int f = 0; f < n_fac; ++f)
        facilities.push_back({n_dep + f, 0.0,
                              {uniform_real(rng, 0.0, 100.0), uniform_real(rng, 0.0, 100.0)}});

    std::vector<Customer> customers;
    std::int64_t total_demand = 0;
    std::vector<std::int64_t> coverable(static_cast<std::size_t>(n_fac), 0);
    for (int c = 0; c < n_cust; ++c) {
        Customer cust;
        cust.id = n_dep + n_fac + c;
        cust.location = {uniform_real(rng, 0.0, 100.0), uniform_real(rng, 0.0, 100.0)};
        cust.demand = uniform_int(rng, 1, p.max_demand);
        total_demand += cust.demand;
        std::vector<std::pair<double, int>> ranked;
        for (int f = 0; f < n_fac; ++f)
            ranked.push_back({euclidean(cust.location, facilities[static_cast<std::size_t>(f)].location), f});
        std::sort(ranked.begin(), ranked.end());
        const int k = static_cast<int>(uniform_int(rng, 1, p.max_coverage));
        for (int i = 0; i < k && i < n_fac; ++i) cust.coverage.push_back(ranked[static_cast<std::size_t>(i)].second);
        for (int f : cust.coverage) coverable[static_cast<std::size_t>(f)] += cust.demand;
        customers.push_back(std::move(cust));
    }
    for (int f = 0; f < n_fac; ++f)
        facilities[static_cast<std::size_t>(f)].capacity =
            std::max<double>(1.0, static_cast<double>(coverable[static_cast<std::size_t>(f)]));
    const double vehicle_capacity = std::max<double>(
        1.0, std::ceil(1.6 * static_cast<double>(total_demand) / vehicles));
    for (auto &d : depots) d.capacity = static_cast<double>(total_demand) + 10.0;
    return Instance(std::move(depots), std::move(facilities), std::move(customers), vehicles,
                    vehicle_capacity);
}

inline std::optional<Solution> random_feasible_solution(const Instance &inst, Rng &rng) {
    return construct(inst, rng);
}

// Edge-walk recomputation of the objective, structured independently of
// evaluate(): per-route node lists and a set-based depot charge.
inline double naive_total_cost(const Instance &inst, const Solution &sol) {
    double total = 0.0;
    std::set<int> open_depots;
    for (const auto &route : sol.routes) {
        if (route.stops.empty()) continue;
        std::vector<int> nodes;
        nodes.push_back(inst.depot_node(route.depot));
        for (int f : route.stops) nodes.push_back(inst.facility_node(f));
        nodes.push_back(inst.depot_node(route.depot));
        for (std::size_t k = 0; k + 1 < nodes.size(); ++k)
            total += inst.node_cost(nodes[k], nodes[k + 1]);
        open_depots.insert(route.depot);
    }
    for (int d : open_depots) total += inst.depot(d).selection_cost;
    return total;
}

// Second feasibility checker, written against the problem statement rather
// than mirroring validate()'s structure. Returns true when feasible.
inline bool reference_feasible(const Instance &inst, const Solution &sol, bool strict) {
    if (static_cast<int>(sol.routes.size()) != inst.vehicle_count()) return false;
    std::map<int, int> facility_count;
    for (const auto &r : sol.routes) {
        if (r.depot < 0 || r.depot >= inst.num_depots()) return false;
        if (strict && r.stops.empty()) return false;
        std::set<int> within;
        for (int f : r.stops) {
            if (f < 0 || f >= inst.num_facilities()) return false;
            if (!within.insert(f).second) return false;
            ++facility_count[f];
        }
    }
    for (const auto &[f, count] : facility_count)
        if (count > 1) return false;
    if (static_cast<int>(sol.assignment.size()) != inst.num_customers()) return false;
    std::map<int, double> fac_demand;
    for (int c = 0; c < inst.num_customers(); ++c) {
        const int f = sol.assignment[static_cast<std::size_t>(c)];
        if (f < 0 || f >= inst.num_facilities()) return false;
        bool covered = false;
        for (int g : inst.customer(c).coverage) covered = covered || g == f;
        if (!covered) return false;
        fac_demand[f] += static_cast<double>(inst.customer(c).demand);
    }
    for (const auto &[f, demand] : fac_demand) {
        if (demand > inst.facility(f).capacity) return false;
        if (demand > 0 && facility_count.find(f) == facility_count.end()) return false;
    }
    for (const auto &[f, count] : facility_count) {
        auto it = fac_demand.find(f);
        if (it == fac_demand.end() || it->second <= 0) return false;
    }
    std::map<int, double> depot_demand;
    for (const auto &r : sol.routes) {
        double demand = 0.0;
        for (int f : r.stops) {
            auto it = fac_demand.find(f);
            if (it != fac_demand.end()) demand += it->second;
        }
        if (demand > inst.vehicle_capacity()) return false;
        depot_demand[r.depot] += demand;
    }
    for (const auto &[d, demand] : depot_demand)
        if (demand > inst.depot(d).capacity) return false;
    return true;
}

} // namespace ctlrp::testing

#endif
