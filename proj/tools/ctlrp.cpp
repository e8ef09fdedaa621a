#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctlrp/construction.hpp"
#include "ctlrp/core.hpp"
#include "ctlrp/generator.hpp"
#include "ctlrp/io.hpp"
#include "ctlrp/lns.hpp"
#include "ctlrp/lp_model.hpp"

namespace {

using nlohmann::json;

void ensure_parent_dir(const std::string &path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

int run_generate(const std::string &lrp_file, int multiplier, int alpha, std::uint64_t seed,
                 int customer_cap, const std::string &out) {
    ctlrp::GeneratorConfig cfg;
    cfg.customer_multiplier = multiplier;
    cfg.alpha_index = alpha;
    cfg.seed = seed;
    cfg.customer_cap = customer_cap;
    const auto src = ctlrp::load_lrp(lrp_file);
    const auto result = ctlrp::generate(src, cfg);
    if (result.status != ctlrp::GenerateStatus::ok) {
        std::cerr << "generate: instance discarded: " << result.detail << '\n';
        return 1;
    }
    ensure_parent_dir(out);
    ctlrp::save_instance(out, *result.instance);
    std::cout << "wrote " << out << " (|F|=" << result.instance->num_facilities()
              << " |D|=" << result.instance->num_depots()
              << " |W|=" << result.instance->num_customers()
              << " M=" << result.instance->vehicle_count() << ")\n";
    return 0;
}

ctlrp::StrategyConfig strategy_from_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ctlrp::IoError("cannot open strategy file: " + path);
    json j;
    in >> j;
    ctlrp::StrategyConfig cfg;
    const auto accept = j.value("accept", "best");
    const auto apply = j.value("apply", "first");
    const auto iterate = j.value("iterate", "once");
    if (accept != "best" && accept != "first") throw ctlrp::IoError("accept must be best|first");
    if (apply != "best" && apply != "first") throw ctlrp::IoError("apply must be best|first");
    if (iterate != "once" && iterate != "repeated") throw ctlrp::IoError("iterate must be once|repeated");
    cfg.accept = accept == "best" ? ctlrp::Accept::best : ctlrp::Accept::first;
    cfg.apply = apply == "best" ? ctlrp::Apply::best : ctlrp::Apply::first;
    cfg.iterate = iterate == "once" ? ctlrp::Iterate::once : ctlrp::Iterate::repeated;
    if (!j.contains("layers")) throw ctlrp::IoError("strategy file needs a layers array");
    for (const auto &layer : j["layers"]) {
        std::vector<ctlrp::OperatorSpec> ops;
        for (const auto &name : layer) {
            auto op = ctlrp::operator_from_name(name.get<std::string>());
            if (!op) throw ctlrp::IoError("unknown operator: " + name.get<std::string>());
            ops.push_back(*op);
        }
        if (ops.empty()) throw ctlrp::IoError("strategy layers must be nonempty");
        cfg.layers.push_back(std::move(ops));
    }
    if (j.contains("time_limit")) cfg.time_limit_seconds = j["time_limit"].get<double>();
    if (j.contains("restarts")) cfg.restarts = j["restarts"].get<int>();
    return cfg;
}

int run_solve(const std::string &instance_path, const std::string &strategy, double time_limit,
              int runs, std::uint64_t seed, const std::string &out, const std::string &report_path) {
    const auto inst = ctlrp::load_instance(instance_path);
    ctlrp::StrategyConfig cfg;
    if (strategy == "O1")
        cfg = ctlrp::preset_o1();
    else if (strategy == "O2")
        cfg = ctlrp::preset_o2();
    else
        cfg = strategy_from_file(strategy);
    if (time_limit > 0) cfg.time_limit_seconds = time_limit;
    if (runs > 0) cfg.restarts = runs;

    auto [best, report] = ctlrp::run_lns(inst, cfg, seed);
    std::cerr << "runs=" << report.runs << " failed=" << report.failed_runs
              << " wall=" << report.wall_seconds << "s\n";
    if (!best) {
        std::cerr << "solve: no feasible solution constructed\n";
        return 1;
    }
    const auto violations = ctlrp::validate(inst, *best, ctlrp::ValidateMode::strict);
    if (!violations.empty()) {
        std::cerr << "solve: internal error, produced solution fails validation\n";
        return 1;
    }
    ensure_parent_dir(out);
    ctlrp::save_solution(out, inst, *best);
    const auto cost = ctlrp::evaluate(inst, *best);
    std::cout << "best_cost=" << cost.total << " routing=" << cost.routing_cost
              << " depots=" << cost.depot_cost << " -> " << out << '\n';

    if (!report_path.empty()) {
        json j;
        j["schema_version"] = 1;
        j["instance"] = std::filesystem::path(instance_path).stem().string();
        j["strategy"] = strategy;
        j["seed"] = seed;
        j["runs"] = report.runs;
        j["failed_runs"] = report.failed_runs;
        j["best_run"] = report.best_run;
        j["best_cost"] = report.best_cost;
        j["run_costs"] = report.run_costs;
        j["run_seeds"] = report.run_seeds;
        auto &stats = j["operator_stats"] = json::object();
        for (const auto &[name, entry] : report.operator_stats)
            stats[name] = {{"applications", entry.applications}, {"improvements", entry.improvements}};
        ensure_parent_dir(report_path);
        std::ofstream rout(report_path);
        if (!rout) throw ctlrp::IoError("cannot write report file: " + report_path);
        rout << j.dump(2) << '\n';
    }
    return 0;
}

int run_validate(const std::string &instance_path, const std::string &solution_path, bool relaxed) {
    const auto inst = ctlrp::load_instance(instance_path);
    const auto sol = ctlrp::load_solution(solution_path, inst);
    const auto violations =
        ctlrp::validate(inst, sol, relaxed ? ctlrp::ValidateMode::relaxed : ctlrp::ValidateMode::strict);
    if (violations.empty()) {
        const auto cost = ctlrp::evaluate(inst, sol);
        std::cout << "valid; total=" << cost.total << " routing=" << cost.routing_cost
                  << " depots=" << cost.depot_cost << '\n';
        return 0;
    }
    for (const auto &v : violations)
        std::cout << ctlrp::rule_name(v.rule) << " entity=" << v.entity << " other=" << v.other << ": "
                  << v.detail << '\n';
    return 1;
}

int run_export(const std::string &instance_path, const std::string &out, bool valid_inequalities) {
    const auto inst = ctlrp::load_instance(instance_path);
    const auto model = ctlrp::build_model(inst, valid_inequalities);
    ensure_parent_dir(out);
    ctlrp::export_lp(model.program, out);
    std::cout << "wrote " << out << " (" << model.program.variables.size() << " vars, "
              << model.program.rows.size() << " rows)\n";
    return 0;
}

int run_separate(const std::string &instance_path, const std::string &values_path,
                 const std::string &out, bool valid_inequalities) {
    const auto inst = ctlrp::load_instance(instance_path);
    auto model = ctlrp::build_model(inst, valid_inequalities);
    std::ifstream in(values_path);
    if (!in) throw ctlrp::IoError("cannot open values file: " + values_path);
    std::vector<double> values(model.program.variables.size(), 0.0);
    std::string name;
    double value;
    while (in >> name >> value) {
        const int var = model.program.find_variable(name);
        if (var >= 0) values[static_cast<std::size_t>(var)] = value;
    }
    const auto cuts = ctlrp::separate_elementary(model, values);
    ctlrp::append_cuts(model, cuts);
    ensure_parent_dir(out);
    ctlrp::export_lp(model.program, out);
    std::cout << "separated " << cuts.size() << " elementary path cut(s); wrote " << out << '\n';
    return 0;
}

int run_report(const std::string &results_dir, const std::string &reference_path,
               const std::string &out, bool lower_bound) {
    std::map<std::string, double> references;
    {
        std::ifstream in(reference_path);
        if (!in) throw ctlrp::IoError("cannot open reference file: " + reference_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            const std::string key = line.substr(0, comma);
            if (key == "instance") continue; // header
            try {
                references[key] = std::stod(line.substr(comma + 1));
            } catch (const std::exception &) {
                throw ctlrp::IoError("bad reference line: " + line);
            }
        }
    }

    std::map<std::string, std::pair<double, int>> results; // instance -> (best, runs)
    for (const auto &entry : std::filesystem::directory_iterator(results_dir)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        json j;
        try {
            in >> j;
        } catch (const json::exception &) {
            continue;
        }
        if (!j.contains("best_cost") || !j.contains("instance")) continue;
        results[j["instance"].get<std::string>()] = {j["best_cost"].get<double>(),
                                                     j.value("runs", 0)};
    }

    std::ostringstream csv;
    const char *gap_label = lower_bound ? "mip_lb_gap_percent" : "gap_percent";
    csv << "instance,runs,h_min,reference," << gap_label << '\n';
    for (const auto &[name, data] : results) {
        auto it = references.find(name);
        csv << name << ',' << data.second << ',' << data.first << ',';
        if (it == references.end()) {
            csv << ",";
        } else {
            csv << it->second << ',' << ctlrp::report_gap(data.first, it->second);
        }
        csv << '\n';
    }
    if (out.empty()) {
        std::cout << csv.str();
    } else {
        ensure_parent_dir(out);
        std::ofstream fout(out);
        if (!fout) throw ctlrp::IoError("cannot write report: " + out);
        fout << csv.str();
        std::cout << "wrote " << out << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Covering tour location routing toolkit"};
    app.require_subcommand(1);

    std::string lrp_file, instance_path, solution_path, out_path, values_path, report_path;
    std::string strategy = "O2";
    std::string results_dir, reference_path;
    int multiplier = 2, alpha = 1, customer_cap = 400, runs = 0;
    std::uint64_t seed = 0;
    double time_limit = 0.0;
    bool relaxed = false, lower_bound = false;
    std::string valid_ineq = "on";

    auto *generate = app.add_subcommand("generate", "derive a scenario from an LRP benchmark file");
    generate->add_option("--lrp-file", lrp_file)->required();
    generate->add_option("--multiplier", multiplier)->check(CLI::IsMember({2, 3, 5}));
    generate->add_option("--alpha", alpha)->check(CLI::IsMember({1, 2}));
    generate->add_option("--seed", seed);
    generate->add_option("--customer-cap", customer_cap);
    generate->add_option("--out", out_path)->required();

    auto *solve = app.add_subcommand("solve", "run the layered neighborhood search");
    solve->add_option("--instance", instance_path)->required();
    solve->add_option("--strategy", strategy, "O1, O2 or a strategy JSON file");
    solve->add_option("--time-limit", time_limit, "per-run seconds");
    solve->add_option("--runs", runs);
    solve->add_option("--seed", seed);
    solve->add_option("--out", out_path)->required();
    solve->add_option("--report", report_path);

    auto *validate = app.add_subcommand("validate", "check a solution against an instance");
    validate->add_option("--instance", instance_path)->required();
    validate->add_option("--solution", solution_path)->required();
    validate->add_flag("--relaxed", relaxed, "permit empty routes");

    auto *exporter = app.add_subcommand("export", "write the flow formulation in LP format");
    exporter->add_option("--instance", instance_path)->required();
    exporter->add_option("--out", out_path)->required();
    exporter->add_option("--with-valid-inequalities", valid_ineq)->check(CLI::IsMember({"on", "off"}));

    auto *separate = app.add_subcommand("separate", "emit elementary path cuts for a solver point");
    separate->add_option("--instance", instance_path)->required();
    separate->add_option("--values", values_path, "file of 'variable value' lines")->required();
    separate->add_option("--out", out_path)->required();
    separate->add_option("--with-valid-inequalities", valid_ineq)->check(CLI::IsMember({"on", "off"}));

    auto *report = app.add_subcommand("report", "gap table over solve reports");
    report->add_option("--results", results_dir)->required();
    report->add_option("--reference", reference_path, "CSV of instance,cost")->required();
    report->add_option("--out", out_path);
    report->add_flag("--lower-bound", lower_bound, "reference values are lower bounds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (generate->parsed())
            return run_generate(lrp_file, multiplier, alpha, seed, customer_cap, out_path);
        if (solve->parsed())
            return run_solve(instance_path, strategy, time_limit, runs, seed, out_path, report_path);
        if (validate->parsed()) return run_validate(instance_path, solution_path, relaxed);
        if (exporter->parsed()) return run_export(instance_path, out_path, valid_ineq == "on");
        if (separate->parsed())
            return run_separate(instance_path, values_path, out_path, valid_ineq == "on");
        if (report->parsed()) return run_report(results_dir, reference_path, out_path, lower_bound);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
