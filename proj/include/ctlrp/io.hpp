#ifndef CTLRP_IO_HPP
#define CTLRP_IO_HPP

#include <iosfwd>
#include <string>

#include "ctlrp/core.hpp"

namespace ctlrp {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Canonical text schema. Instances carry depots/facilities/customers with
// external ids; costs are recomputed from locations unless an explicit
// "travel_cost" block is present. Solutions reference the same ids.
Instance read_instance_json(std::istream &in);
Instance load_instance(const std::string &path);
void write_instance_json(std::ostream &out, const Instance &inst);
void save_instance(const std::string &path, const Instance &inst);

Solution read_solution_json(std::istream &in, const Instance &inst);
Solution load_solution(const std::string &path, const Instance &inst);
void write_solution_json(std::ostream &out, const Instance &inst, const Solution &sol);
void save_solution(const std::string &path, const Instance &inst, const Solution &sol);

} // namespace ctlrp

#endif
