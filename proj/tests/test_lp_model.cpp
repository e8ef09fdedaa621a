#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ctlrp/lp_model.hpp"
#include "helpers.hpp"

using namespace ctlrp;
using namespace ctlrp::testing;

namespace {

int count_rows(const LpModel &model, const std::string &tag) {
    int n = 0;
    for (const auto &row : model.program.rows)
        if (row.tag == tag) ++n;
    return n;
}

} // namespace

TEST_CASE("variable and constraint counts follow the closed forms") {
    const Instance inst = figure_one_instance();
    const LpModel model = build_model(inst);
    const int D = inst.num_depots(), F = inst.num_facilities(), W = inst.num_customers();
    const int E = 2 * D * F + F * (F - 1) / 2;
    int coverage_pairs = 0;
    for (const auto &c : inst.customers()) coverage_pairs += static_cast<int>(c.coverage.size());

    CHECK(static_cast<int>(model.edges.size()) == E);
    CHECK(static_cast<int>(model.program.variables.size()) == 3 * E + D + F + coverage_pairs);
    CHECK(count_rows(model, "2") == F);
    CHECK(count_rows(model, "3") == 1);
    CHECK(count_rows(model, "4") == 1);
    CHECK(count_rows(model, "5") == 1);
    CHECK(count_rows(model, "6") == D * F);
    CHECK(count_rows(model, "7") == D * F);
    CHECK(count_rows(model, "8") == E);
    CHECK(count_rows(model, "9") == F);
    CHECK(count_rows(model, "10") == W);
    CHECK(count_rows(model, "11") == coverage_pairs);
    CHECK(count_rows(model, "12") == F);
    CHECK(count_rows(model, "13") == F);
    CHECK(count_rows(model, "14") == D);
    CHECK(count_rows(model, "15") == D * F);
    CHECK(count_rows(model, "16") == D);
    CHECK(count_rows(model, "17") == D);

    const LpModel lean = build_model(inst, false);
    CHECK(count_rows(lean, "15") == 0);
    CHECK(count_rows(lean, "16") == 0);
    CHECK(count_rows(lean, "17") == 0);
    CHECK(lean.program.rows.size() + static_cast<std::size_t>(D * F + 2 * D) ==
          model.program.rows.size());
}

TEST_CASE("feasible solutions satisfy every emitted constraint") {
    const Instance inst = figure_one_instance();
    const LpModel model = build_model(inst);
    const Solution sol = figure_one_solution();
    const auto values = encode_solution(model, inst, sol);
    CHECK(check_solution(model.program, values).empty());

    // Objective at the encoding equals the evaluator's total.
    double objective = 0.0;
    for (const auto &t : model.program.objective)
        objective += t.coef * values[static_cast<std::size_t>(t.var)];
    CHECK(objective == doctest::Approx(evaluate(inst, sol).total));
}

TEST_CASE("random feasible encodings stay within the formulation") {
    Rng rng(4004);
    int checked = 0;
    while (checked < 40) {
        const Instance inst = random_instance(rng);
        auto sol = random_feasible_solution(inst, rng);
        if (!sol) continue;
        ++checked;
        const LpModel model = build_model(inst);
        const auto values = encode_solution(model, inst, *sol);
        const auto violations = check_solution(model.program, values);
        CHECK(violations.empty());
        CHECK(separate_elementary(model, values).empty());
    }
}

TEST_CASE("selection coupling forces unused edges to carry nothing") {
    const Instance inst = figure_one_instance();
    const LpModel model = build_model(inst);
    std::vector<double> values(model.program.variables.size(), 0.0);
    // Load on an unselected edge violates its coupling row (and only rows
    // containing that variable).
    const int edge_flow = model.flow_var(model.depot_node(0), model.facility_node(0));
    values[static_cast<std::size_t>(edge_flow)] = 2.5;
    const auto violations = check_solution(model.program, values);
    bool coupling_flagged = false;
    for (const auto &v : violations) {
        if (v.row < 0) continue;
        const auto &row = model.program.rows[static_cast<std::size_t>(v.row)];
        if (row.tag == "8") {
            coupling_flagged = true;
            bool contains = false;
            for (const auto &t : row.terms) contains = contains || t.var == edge_flow;
            CHECK(contains);
        }
    }
    CHECK(coupling_flagged);
}

TEST_CASE("all-zero assignment violates unique covering for every customer") {
    const Instance inst = figure_one_instance();
    const LpModel model = build_model(inst);
    const std::vector<double> zero(model.program.variables.size(), 0.0);
    const auto violations = check_solution(model.program, zero);
    int covering = 0;
    for (const auto &v : violations)
        if (v.row >= 0 && model.program.rows[static_cast<std::size_t>(v.row)].tag == "10") ++covering;
    CHECK(covering == inst.num_customers());
}

TEST_CASE("perturbing a feasible point flags only rows touching the variable") {
    const Instance inst = figure_one_instance();
    const LpModel model = build_model(inst);
    auto values = encode_solution(model, inst, figure_one_solution());
    const int var = model.flow_var(model.depot_node(0), model.facility_node(1));
    values[static_cast<std::size_t>(var)] += 0.5;
    const auto violations = check_solution(model.program, values);
    REQUIRE(!violations.empty());
    bool balance = false, coupling = false;
    for (const auto &v : violations) {
        REQUIRE(v.row >= 0);
        const auto &row = model.program.rows[static_cast<std::size_t>(v.row)];
        bool contains = false;
        for (const auto &t : row.terms) contains = contains || t.var == var;
        CHECK(contains);
        balance = balance || row.tag == "2";
        coupling = coupling || row.tag == "8";
    }
    CHECK(balance);
    CHECK(coupling);
}

TEST_CASE("LP text round-trips through the parser byte for byte") {
    const Instance inst = figure_one_instance();
    const LpModel model = build_model(inst);
    std::stringstream first;
    write_lp(first, model.program);
    std::stringstream parsed_in(first.str());
    const LinearProgram parsed = parse_lp(parsed_in);
    std::stringstream second;
    write_lp(second, parsed);
    CHECK(first.str() == second.str());
    CHECK(parsed.variables.size() == model.program.variables.size());
    CHECK(parsed.rows.size() == model.program.rows.size());
}

TEST_CASE("parser handles hand-written fragments and rejects junk") {
    std::stringstream text(R"(\ tiny model
Minimize
 obj: 2 a + 3.5 b - c
Subject To
 r1: a + b <= 4
 r2: - a + 2 c >= -1
 r3: b = 1
Bounds
 c <= 9
Binaries
 a
End
)");
    const LinearProgram lp = parse_lp(text);
    CHECK(lp.variables.size() == 3);
    CHECK(lp.rows.size() == 3);
    CHECK(lp.rows[1].rhs == doctest::Approx(-1.0));
    CHECK(lp.variables[static_cast<std::size_t>(lp.find_variable("a"))].binary);
    CHECK(lp.variables[static_cast<std::size_t>(lp.find_variable("c"))].upper == doctest::Approx(9.0));

    std::stringstream junk("Maximize\n obj: x\nEnd\n");
    CHECK_THROWS_AS(parse_lp(junk), LpFormatError);
}

TEST_CASE("lemma separation on the two-route mismatch example") {
    // Three depots, three facilities; both routes end at a foreign copy.
    std::vector<Depot> depots{{0, 1, 100, {0, 0}}, {1, 1, 100, {10, 0}}, {2, 1, 100, {20, 0}}};
    std::vector<Facility> facilities{{3, 100, {0, 5}}, {4, 100, {10, 5}}, {5, 100, {20, 5}}};
    std::vector<Customer> customers{
        {6, 1, {0, 5}, {0}}, {7, 1, {10, 5}, {1}}, {8, 1, {20, 5}, {2}}};
    const Instance inst(std::move(depots), std::move(facilities), std::move(customers), 2, 3.0);
    const LpModel model = build_model(inst);
    std::vector<double> values(model.program.variables.size(), 0.0);
    auto select = [&](int u, int v) { values[static_cast<std::size_t>(model.xi_var(u, v))] = 1.0; };
    // Route 1: depot 1 -> f1 -> copy of depot 3.
    select(model.depot_node(0), model.facility_node(0));
    select(model.facility_node(0), model.copy_node(2));
    // Route 2: depot 2 -> f2 -> f3 -> copy of depot 1.
    select(model.depot_node(1), model.facility_node(1));
    select(model.facility_node(1), model.facility_node(2));
    select(model.facility_node(2), model.copy_node(0));

    const auto cuts = separate_elementary(model, values);
    REQUIRE(cuts.size() == 2);
    for (const auto &cut : cuts) {
        // Membership conditions of the depot-partition family.
        CHECK(cut.x_prime.size() == 1);
        CHECK(cut.x_prime.front() <= model.num_depots);
        CHECK(cut.x_star.size() == static_cast<std::size_t>(model.num_depots) - 1);
        for (int node : cut.x_star) {
            CHECK(node > model.num_depots + model.num_facilities);
            CHECK(node != model.rho(cut.x_prime.front()));
        }
        const auto [lhs, rhs] = cut_values(model, cut, values);
        CHECK(lhs == doctest::Approx(2.0));
        CHECK(rhs == doctest::Approx(4.0));

        const LpRow row = cut_to_row(model, cut, "cut_test");
        double activity = 0.0;
        for (const auto &t : row.terms) activity += t.coef * values[static_cast<std::size_t>(t.var)];
        CHECK(activity < row.rhs - 0.5); // violated
    }
    CHECK(cuts[0].facility_nodes == std::vector<int>{model.facility_node(0)});
    CHECK(cuts[1].facility_nodes ==
          std::vector<int>{model.facility_node(1), model.facility_node(2)});

    // Appending the cuts makes the point infeasible for the checker.
    LpModel extended = build_model(inst);
    append_cuts(extended, cuts);
    std::vector<double> padded = values;
    const auto violations = check_solution(extended.program, padded);
    int cut_rows_violated = 0;
    for (const auto &v : violations)
        if (v.row >= 0 && extended.program.rows[static_cast<std::size_t>(v.row)].tag == "22")
            ++cut_rows_violated;
    CHECK(cut_rows_violated == 2);
}

TEST_CASE("routes returning to their own copies produce no cuts") {
    const Instance inst = figure_one_instance();
    const LpModel model = build_model(inst);
    const auto values = encode_solution(model, inst, figure_one_solution());
    CHECK(separate_elementary(model, values).empty());
}

TEST_CASE("undecodable selections raise structural errors") {
    const Instance inst = figure_one_instance();
    const LpModel model = build_model(inst);
    std::vector<double> values(model.program.variables.size(), 0.0);
    // A facility with degree one dead-ends the walk.
    values[static_cast<std::size_t>(model.xi_var(model.depot_node(0), model.facility_node(0)))] = 1.0;
    CHECK_THROWS_AS(separate_elementary(model, values), RouteDecodeError);
    // A depot-free facility cycle is selected but unreachable.
    std::vector<double> cycle(model.program.variables.size(), 0.0);
    cycle[static_cast<std::size_t>(model.xi_var(model.facility_node(0), model.facility_node(1)))] = 1.0;
    cycle[static_cast<std::size_t>(model.xi_var(model.facility_node(1), model.facility_node(2)))] = 1.0;
    cycle[static_cast<std::size_t>(model.xi_var(model.facility_node(0), model.facility_node(2)))] = 1.0;
    CHECK_THROWS_AS(separate_elementary(model, cycle), RouteDecodeError);
}

TEST_CASE("exhaustive separation equivalence on tiny graphs") {
    // Two depots, three facilities: enumerate all ways to split a facility
    // subset into one or two routes with arbitrary start/end depots and
    // check the cut count equals the number of mismatched terminals.
    std::vector<Depot> depots{{0, 1, 100, {0, 0}}, {1, 1, 100, {9, 0}}};
    std::vector<Facility> facilities{{2, 100, {0, 4}}, {3, 100, {5, 4}}, {4, 100, {9, 4}}};
    std::vector<Customer> customers{{5, 1, {0, 4}, {0}}, {6, 1, {5, 4}, {1}}, {7, 1, {9, 4}, {2}}};
    const Instance inst(std::move(depots), std::move(facilities), std::move(customers), 2, 3.0);
    const LpModel model = build_model(inst);

    const std::vector<std::vector<std::vector<int>>> splits{
        {{0, 1, 2}},
        {{0}, {1, 2}},
        {{1}, {0, 2}},
        {{2}, {0, 1}},
    };
    int configurations = 0;
    for (const auto &split : splits) {
        const int routes = static_cast<int>(split.size());
        for (int starts = 0; starts < 1 << routes; ++starts) {
            for (int ends = 0; ends < 1 << routes; ++ends) {
                std::vector<double> values(model.program.variables.size(), 0.0);
                int expected = 0;
                bool valid = true;
                std::vector<int> copy_degree(2, 0);
                std::vector<int> start_degree(2, 0);
                for (int r = 0; r < routes; ++r) {
                    const int s = starts >> r & 1;
                    const int e = ends >> r & 1;
                    ++start_degree[static_cast<std::size_t>(s)];
                    ++copy_degree[static_cast<std::size_t>(e)];
                    if (s != e) ++expected;
                    int prev = model.depot_node(s);
                    for (int f : split[static_cast<std::size_t>(r)]) {
                        values[static_cast<std::size_t>(model.xi_var(prev, model.facility_node(f)))] = 1.0;
                        prev = model.facility_node(f);
                    }
                    values[static_cast<std::size_t>(model.xi_var(prev, model.copy_node(e)))] = 1.0;
                }
                if (!valid) continue;
                ++configurations;
                const auto cuts = separate_elementary(model, values);
                CHECK(static_cast<int>(cuts.size()) == expected);
                for (const auto &cut : cuts) {
                    const auto [lhs, rhs] = cut_values(model, cut, values);
                    CHECK(lhs == doctest::Approx(2.0));
                    CHECK(rhs == doctest::Approx(4.0));
                }
            }
        }
    }
    CHECK(configurations == 4 + 3 * 16);
}
