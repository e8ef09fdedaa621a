#ifndef CTLRP_CONSTRUCTION_HPP
#define CTLRP_CONSTRUCTION_HPP

#include <optional>

#include "ctlrp/core.hpp"
#include "ctlrp/rng.hpp"

namespace ctlrp {

struct ConstructionOptions {
    int retries_per_step = 50;
};

struct CustomerAssignment {
    std::vector<int> assignment;   // customer -> facility
    std::vector<int> open_facilities;
};

// Step 1: customers to facilities, most-constrained customers first; opens
// extra facilities afterwards when fewer than M are in use.
std::optional<CustomerAssignment> assign_customers(const Instance &inst, Rng &rng,
                                                   const ConstructionOptions &opts = {});

// Step 2: facilities onto depots and routes, splitting routes until the
// solution holds exactly M of them.
std::optional<Solution> assign_routes(const Instance &inst, const CustomerAssignment &assigned,
                                      Rng &rng, const ConstructionOptions &opts = {});

std::optional<Solution> construct(const Instance &inst, Rng &rng,
                                  const ConstructionOptions &opts = {});

} // namespace ctlrp

#endif
