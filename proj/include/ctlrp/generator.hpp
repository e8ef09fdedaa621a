#ifndef CTLRP_GENERATOR_HPP
#define CTLRP_GENERATOR_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctlrp/core.hpp"
#include "ctlrp/rng.hpp"

namespace ctlrp {

class LrpParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// LRP benchmark data in the common public text layout: facility count,
// depot count, coordinates, vehicle capacity, depot capacities, facility
// demands, depot opening costs, route opening cost, integer-cost flag.
// The LRP's "customers" act as facilities here.
struct LrpSource {
    std::vector<Point> facility_locations;
    std::vector<std::int64_t> facility_demands;
    std::vector<Point> depot_locations;
    std::vector<double> depot_costs;
    std::vector<double> depot_capacities;
    double vehicle_capacity = 0.0;

    std::int64_t total_facility_demand() const {
        std::int64_t sum = 0;
        for (auto q : facility_demands) sum += q;
        return sum;
    }
};

LrpSource parse_lrp(std::istream &in);
LrpSource load_lrp(const std::string &path);

struct GeneratorConfig {
    int customer_multiplier = 2; // {2, 3, 5}
    int customer_cap = 400;
    int alpha_index = 1; // 1 or 2
    double alpha_factors[2] = {0.10, 0.15};
    double capacity_noise_lo = 0.95;
    double capacity_noise_hi = 1.0;
    double fleet_slack = 1.2;
    std::uint64_t seed = 0;
    std::int64_t resample_limit = 1'000'000;
};

enum class GenerateStatus { ok, depot_support_failure, resample_limit_exceeded };

struct GenerateOutput {
    GenerateStatus status = GenerateStatus::ok;
    std::optional<Instance> instance;
    std::string detail;
};

// Fleet sizing and the coarse-fleet rescale applied afterwards.
struct FleetPlan {
    int vehicles = 0;         // ceil(slack * q(W) / Q)
    int vehicles_rescaled = 0; // max(2, ceil(vehicles / 3))
    double capacity_rescaled = 0.0; // Q * vehicles / vehicles_rescaled
};

FleetPlan plan_fleet(std::int64_t total_demand, double vehicle_capacity, double slack = 1.2);

// Facilities within distance alpha of the location (closed ball).
std::vector<int> coverage_set(const std::vector<Point> &facility_locations, const Point &customer,
                              double alpha);

GenerateOutput generate(const LrpSource &src, const GeneratorConfig &cfg);

} // namespace ctlrp

#endif
