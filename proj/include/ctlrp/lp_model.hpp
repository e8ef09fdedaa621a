#ifndef CTLRP_LP_MODEL_HPP
#define CTLRP_LP_MODEL_HPP

#include <iosfwd>
#include <limits>
#include <map>
#include <string>

#include "ctlrp/core.hpp"
#include "ctlrp/milp.hpp"

namespace ctlrp {

class LpFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LpVariable {
    std::string name;
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    bool binary = false;
};

struct LpRow {
    std::string name;
    std::vector<LinTerm> terms;
    RowSense sense = RowSense::le;
    double rhs = 0.0;
    std::string tag; // constraint family label
};

// Generic linear program, also the unit the LP text format round-trips
// through.
struct LinearProgram {
    std::vector<LpVariable> variables;
    std::vector<LinTerm> objective;
    std::vector<LpRow> rows;
    std::map<std::string, int> variable_index;

    int add_variable(LpVariable v);
    int find_variable(const std::string &name) const; // -1 when absent
};

void write_lp(std::ostream &out, const LinearProgram &lp);
void export_lp(const LinearProgram &lp, const std::string &path);
LinearProgram parse_lp(std::istream &in);
LinearProgram load_lp(const std::string &path);

struct LpRowViolation {
    int row = -1;          // -1 flags a variable bound violation
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
};

std::vector<LpRowViolation> check_solution(const LinearProgram &lp,
                                           const std::vector<double> &values,
                                           double tolerance = 1e-6);

// Two-commodity flow formulation over the duplicated-depot graph. Nodes use
// the formulation numbering: depots 1..|D|, facilities |D|+1..|D|+|F|, depot
// copies after that; rho(d) = d + |D| + |F|.
struct LpModel {
    LinearProgram program;
    int num_depots = 0;
    int num_facilities = 0;
    int num_customers = 0;
    double vehicle_capacity = 0.0;
    int vehicle_count = 0;
    std::vector<std::pair<int, int>> edges; // node pairs, first < second
    std::map<std::pair<int, int>, int> edge_index;

    int depot_node(int d) const { return d + 1; }
    int facility_node(int f) const { return num_depots + f + 1; }
    int copy_node(int d) const { return num_depots + num_facilities + d + 1; }
    int rho(int depot_node_id) const { return depot_node_id + num_depots + num_facilities; }
    bool is_facility_node(int node) const {
        return node > num_depots && node <= num_depots + num_facilities;
    }

    int xi_var(int u, int v) const;   // edge selection, unordered lookup
    int flow_var(int from, int to) const; // directed load variable
    int y_var(int d) const;
    int z_var(int f) const;
    int tau_var(int f, int c) const; // -1 when f does not cover c
};

LpModel build_model(const Instance &inst, bool with_valid_inequalities = true);

// Variable assignment induced by a feasible solution (M nonempty routes).
std::vector<double> encode_solution(const LpModel &model, const Instance &inst, const Solution &sol);

// One cut per offending route, Lemma-style: X' the start depot, X* all
// copies except the start depot's own.
struct PathCut {
    std::vector<int> facility_nodes; // S
    int first_node = 0;              // i
    int last_node = 0;               // j
    std::vector<int> x_prime;        // X'
    std::vector<int> x_star;         // X*
};

class RouteDecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<PathCut> separate_elementary(const LpModel &model, const std::vector<double> &values);

LpRow cut_to_row(const LpModel &model, const PathCut &cut, const std::string &name);

// LHS and RHS of the path inequality at an assignment (xi(delta(S)) and
// 2(xi({i}:X') + xi({j}:X*))).
std::pair<double, double> cut_values(const LpModel &model, const PathCut &cut,
                                     const std::vector<double> &values);

void append_cuts(LpModel &model, const std::vector<PathCut> &cuts);

} // namespace ctlrp

#endif
