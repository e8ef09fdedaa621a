#ifndef CTLRP_CORE_HPP
#define CTLRP_CORE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctlrp {

inline constexpr double kCostTolerance = 1e-9;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double euclidean(const Point &a, const Point &b);

struct Depot {
    int id = 0;
    double selection_cost = 0.0;
    double capacity = 0.0;
    Point location{};
};

struct Facility {
    int id = 0;
    double capacity = 0.0;
    Point location{};
};

struct Customer {
    int id = 0;
    std::int64_t demand = 0;
    Point location{};
    std::vector<int> coverage; // facility indices, nonempty
};

class InstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Immutable problem data. Depots, facilities and customers are referenced
// by dense indices everywhere inside the library; external ids only matter
// for I/O. Travel costs live in one symmetric matrix over the node order
// (depot 0..|D|-1, facility |D|..|D|+|F|-1).
class Instance {
public:
    Instance(std::vector<Depot> depots, std::vector<Facility> facilities,
             std::vector<Customer> customers, int vehicle_count, double vehicle_capacity,
             std::optional<std::vector<std::vector<double>>> travel_cost = std::nullopt);

    int num_depots() const { return static_cast<int>(depots_.size()); }
    int num_facilities() const { return static_cast<int>(facilities_.size()); }
    int num_customers() const { return static_cast<int>(customers_.size()); }
    int num_nodes() const { return num_depots() + num_facilities(); }

    const std::vector<Depot> &depots() const { return depots_; }
    const std::vector<Facility> &facilities() const { return facilities_; }
    const std::vector<Customer> &customers() const { return customers_; }
    const Depot &depot(int d) const { return depots_[static_cast<std::size_t>(d)]; }
    const Facility &facility(int f) const { return facilities_[static_cast<std::size_t>(f)]; }
    const Customer &customer(int c) const { return customers_[static_cast<std::size_t>(c)]; }

    int vehicle_count() const { return vehicle_count_; }
    double vehicle_capacity() const { return vehicle_capacity_; }

    int depot_node(int d) const { return d; }
    int facility_node(int f) const { return num_depots() + f; }

    double node_cost(int a, int b) const { return cost_[static_cast<std::size_t>(a) * num_nodes() + b]; }
    double cost_depot_facility(int d, int f) const { return node_cost(depot_node(d), facility_node(f)); }
    double cost_facility_facility(int f, int g) const { return node_cost(facility_node(f), facility_node(g)); }

    std::int64_t total_demand() const { return total_demand_; }
    bool has_explicit_costs() const { return has_explicit_costs_; }

    // Facilities that share at least one coverable customer with f (Alg. 2/3
    // neighborhoods); symmetric, excludes f itself.
    const std::vector<std::vector<int>> &facility_neighbors() const { return facility_neighbors_; }
    const std::vector<std::vector<int>> &customers_coverable_by() const { return coverable_by_; }
    // True when some customer can only be covered by f; such facilities are
    // never removed by the restructuring operators.
    bool facility_fixed(int f) const { return fixed_facility_[static_cast<std::size_t>(f)]; }

private:
    std::vector<Depot> depots_;
    std::vector<Facility> facilities_;
    std::vector<Customer> customers_;
    int vehicle_count_ = 0;
    double vehicle_capacity_ = 0.0;
    bool has_explicit_costs_ = false;
    std::vector<double> cost_;
    std::int64_t total_demand_ = 0;
    std::vector<std::vector<int>> facility_neighbors_;
    std::vector<std::vector<int>> coverable_by_;
    std::vector<bool> fixed_facility_;
};

struct Route {
    int depot = 0;
    std::vector<int> stops; // facility indices, no repeats

    bool empty() const { return stops.empty(); }
};

struct Solution {
    std::vector<Route> routes;
    std::vector<int> assignment; // customer index -> facility index
};

struct CostBreakdown {
    double routing_cost = 0.0;
    double depot_cost = 0.0;
    double total = 0.0;
};

enum class Rule {
    route_count,
    unknown_facility,
    repeated_stop,
    facility_multiply_routed,
    empty_route,
    assignment_out_of_range,
    coverage,
    unrouted_assigned_facility,
    routed_unassigned_facility,
    vehicle_capacity,
    facility_capacity,
    depot_capacity,
};

const char *rule_name(Rule rule);

struct Violation {
    Rule rule;
    int entity = -1; // offending route/facility/depot/customer index
    int other = -1;  // secondary id where relevant
    std::string detail;
};

enum class ValidateMode { strict, relaxed };

CostBreakdown evaluate(const Instance &inst, const Solution &sol);

double route_cost(const Instance &inst, const Route &route);

// Demand assigned to facility f under sol.assignment.
std::int64_t facility_load(const Instance &inst, const Solution &sol, int f);
std::int64_t route_demand(const Instance &inst, const Solution &sol, const Route &route);

// Vehicle load on each traversed edge, starting with the full route demand
// when leaving the depot and ending at zero.
std::vector<std::int64_t> route_loads(const Instance &inst, const Solution &sol, const Route &route);

std::vector<Violation> validate(const Instance &inst, const Solution &sol,
                                ValidateMode mode = ValidateMode::strict);

// Demand aggregates the operators keep consulting; rebuild after structural
// changes or maintain incrementally at the call site.
struct LoadTable {
    std::vector<std::int64_t> facility;
    std::vector<std::int64_t> route;
    std::vector<std::int64_t> depot;

    static LoadTable build(const Instance &inst, const Solution &sol);
};

} // namespace ctlrp

#endif
