// oranplan: generate, associate, deploy, price, sweep and compare from the command line.
// Exit codes: 0 success, 1 infeasible instance, 2 bad input or I/O error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "oran/assoc.hpp"
#include "oran/cost.hpp"
#include "oran/deploy.hpp"
#include "oran/errors.hpp"
#include "oran/io.hpp"
#include "oran/lagrangian.hpp"
#include "oran/report.hpp"

using namespace oran;

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kError = 2;

struct Options {
    std::string config_path;
    std::string output;
    std::string area = "urban";
    double side = 1.0;
    std::uint64_t seed = 1;
    std::string solver = "heuristic";
    std::string scenario_path;
    std::string assignment_path;
    std::string plan_path;
    std::string runs_path;
    std::string dump_model;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> areas;
    std::vector<double> sides;
    bool serial = false;
};

report::ExperimentConfig load_config(const Options& o) {
    report::ExperimentConfig cfg;
    if (!o.config_path.empty()) cfg = report::config_from_json(io::Json::parse(io::read_file(o.config_path)));
    return cfg;
}

void put(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else io::write_file(path, text);
}

io::Json read_json(const std::string& path, const char* what) {
    if (path.empty()) throw ParameterError(what, "path is required");
    return io::Json::parse(io::read_file(path));
}

scenario::Scenario load_scenario(const Options& o) { return io::scenario_from_json(read_json(o.scenario_path, "--scenario")); }

int cmd_generate(const Options& o) {
    const auto cfg = load_config(o);
    const auto sc = report::scenario_for(cfg, scenario::area_class_from_string(o.area), o.side, o.seed);
    put(o.output, io::canonical(io::to_json(sc)));
    return kOk;
}

int cmd_associate(const Options& o) {
    const auto cfg = load_config(o);
    auto sc = load_scenario(o);
    const auto solver = report::solver_from_string(o.solver);
    bool subsample = false;
    if (solver == report::Solver::exact &&
        (static_cast<int>(sc.ues.size()) > cfg.oracle_max_ues || static_cast<int>(sc.rus.size()) > cfg.oracle_max_rus)) {
        sc = report::p1_oracle_subsample(sc, cfg.oracle_max_rus, cfg.oracle_max_ues);
        subsample = true;
    }
    const auto m = assoc::build_p1(sc);
    if (!o.dump_model.empty()) io::write_file(o.dump_model, io::canonical(io::dump_model(m)));
    io::Json out;
    if (solver == report::Solver::exact) {
        const auto r = assoc::solve_exact(m, {50'000'000, 1e9});
        if (r.status == assoc::SolveStatus::infeasible) {
            std::cerr << "infeasible: associate: no feasible association\n";
            return kInfeasible;
        }
        out = io::to_json(m, r.assignment);
        out["solver"] = "exact";
        out["proven_optimal"] = r.proven_optimal;
    } else {
        const auto r = lagrangian::run_algorithm1(m, cfg.lagrangian);
        if (r.status == assoc::SolveStatus::infeasible) {
            std::cerr << "infeasible: associate: no feasible association\n";
            return kInfeasible;
        }
        out = io::to_json(m, r.assignment);
        out["solver"] = "heuristic";
        out["best_lb"] = r.best_lb;
        out["best_ub"] = r.best_ub;
        out["gap_bound"] = r.trace.gap_bound;
    }
    if (subsample) {
        out["label"] = "oracle subsample";
        out["scenario"] = io::to_json(sc);
    }
    put(o.output, io::canonical(out));
    return kOk;
}

// Scenario the assignment refers to: the embedded subsample when present.
scenario::Scenario assignment_scenario(const Options& o, const io::Json& aj) {
    return aj.contains("scenario") ? io::scenario_from_json(aj.at("scenario")) : load_scenario(o);
}

int cmd_deploy(const Options& o) {
    const auto cfg = load_config(o);
    const auto aj = read_json(o.assignment_path, "--assignment");
    const auto sc = assignment_scenario(o, aj);
    const auto a = io::assignment_from_json(aj);
    const auto solver = report::solver_from_string(o.solver);
    deploy::P2Model m;
    bool subsample = false;
    try {
        if (solver == report::Solver::exact &&
            (static_cast<int>(a.installed.size()) > cfg.oracle_p2_rus)) {
            m = report::p2_oracle_subsample(cfg, sc, a);
            subsample = true;
        } else {
            m = deploy::build_p2(sc, a, cfg.deploy, cfg.prices);
        }
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    }
    if (!o.dump_model.empty()) io::write_file(o.dump_model, io::canonical(io::dump_model(m)));
    deploy::DeploymentPlan plan;
    std::optional<bool> proven;
    if (solver == report::Solver::exact) {
        const auto r = deploy::solve_p2_exact_small(m, {20'000'000, 1e9});
        plan = r.plan;
        proven = r.proven_optimal;
    } else {
        plan = deploy::greedy_deploy(m);
    }
    if (!plan.feasible) {
        std::cerr << "infeasible: deploy: " << plan.status << "\n";
        return kInfeasible;
    }
    const auto violations = deploy::check_plan(m, plan);
    if (!violations.empty()) throw std::logic_error("deploy: plan fails its own checker");
    auto out = io::to_json(m, plan);
    out["solver"] = report::to_string(solver);
    if (proven) out["proven_optimal"] = *proven;
    if (subsample) out["label"] = "oracle subsample";
    put(o.output, io::canonical(out));
    return kOk;
}

int cmd_price(const Options& o) {
    const auto cfg = load_config(o);
    const auto aj = read_json(o.assignment_path, "--assignment");
    const auto sc = assignment_scenario(o, aj);
    const auto a = io::assignment_from_json(aj);
    const auto m = deploy::build_p2(sc, a, cfg.deploy, cfg.prices);
    const auto plan = io::plan_from_json(m, read_json(o.plan_path, "--plan"));
    if (!deploy::check_plan(m, plan).empty()) throw ParameterError("--plan", "plan violates the P2 constraints");
    io::Json out;
    out["twdm"] = io::to_json(cost::price_plan(m, plan));
    const auto otn = cost::price_otn(m, plan, cfg.prices, cfg.otn);
    out["otn"] = io::to_json(otn);
    put(o.output, io::canonical(out));
    return otn.feasible ? kOk : kInfeasible;
}

int cmd_sweep(const Options& o) {
    auto cfg = load_config(o);
    if (!o.seeds.empty()) cfg.seeds = o.seeds;
    if (!o.sides.empty()) cfg.sides = o.sides;
    if (!o.areas.empty()) {
        cfg.areas.clear();
        for (const auto& a : o.areas) cfg.areas.push_back(scenario::area_class_from_string(a));
    }
    if (o.solver != "heuristic") cfg.p1_solver = cfg.p2_solver = report::solver_from_string(o.solver);
    if (o.serial) cfg.parallel = false;
    if (!o.output.empty()) cfg.output_dir = o.output;
    const auto bundle = report::run_pipeline(cfg);
    const auto files = report::emit(bundle, cfg.output_dir);
    int infeasible = 0;
    for (const auto& r : bundle.runs)
        if (!r.feasible) {
            ++infeasible;
            std::cerr << r.status << "\n";
        }
    std::cerr << bundle.runs.size() << " runs, " << infeasible << " infeasible, " << files.size() << " files in "
              << cfg.output_dir << "\n";
    return infeasible > 0 ? kInfeasible : kOk;
}

int cmd_compare(const Options& o) {
    if (o.runs_path.empty()) throw ParameterError("--runs", "path is required");
    const auto runs = report::parse_runs_csv(io::read_file(o.runs_path));
    const auto rows = report::compare_solvers(runs);
    put(o.output, report::gap_csv(rows));
    for (const auto& r : rows)
        if (r.factor_violated) std::cerr << "factor violated: " << r.area << " " << r.side_km << " km seed " << r.seed << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"O-RAN two-stage planning: association, PON deployment and cost"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("-c,--config", o.config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
        c->add_option("-o,--output", o.output, "output file, or directory for sweep");
    };

    auto* gen = app.add_subcommand("generate", "generate a scenario");
    common(gen);
    gen->add_option("--area", o.area, "industrial, urban or rural");
    gen->add_option("--side", o.side, "side of the square area in km");
    gen->add_option("--seed", o.seed, "scenario seed");

    auto* as = app.add_subcommand("associate", "solve UE-RU association");
    common(as);
    as->add_option("-s,--scenario", o.scenario_path, "scenario JSON")->required();
    as->add_option("--solver", o.solver, "heuristic or exact");
    as->add_option("--dump-model", o.dump_model, "write the P1 coefficient tables here");

    auto* dp = app.add_subcommand("deploy", "plan the PON deployment");
    common(dp);
    dp->add_option("-s,--scenario", o.scenario_path, "scenario JSON");
    dp->add_option("-a,--assignment", o.assignment_path, "assignment JSON")->required();
    dp->add_option("--solver", o.solver, "heuristic or exact");
    dp->add_option("--dump-model", o.dump_model, "write the P2 coefficient tables here");

    auto* pr = app.add_subcommand("price", "price a deployment plan");
    common(pr);
    pr->add_option("-s,--scenario", o.scenario_path, "scenario JSON");
    pr->add_option("-a,--assignment", o.assignment_path, "assignment JSON")->required();
    pr->add_option("-p,--plan", o.plan_path, "plan JSON")->required();

    auto* sw = app.add_subcommand("sweep", "run the experiment sweep and write result files");
    common(sw);
    sw->add_option("--seed", o.seeds, "seeds (overrides config)");
    sw->add_option("--area", o.areas, "area classes (overrides config)");
    sw->add_option("--side", o.sides, "sides in km (overrides config)");
    sw->add_option("--solver", o.solver, "heuristic, exact or both");
    sw->add_flag("--serial", o.serial, "run instances one at a time");

    auto* cmp = app.add_subcommand("compare", "heuristic vs exact gap table from runs.csv");
    common(cmp);
    cmp->add_option("-r,--runs", o.runs_path, "runs.csv of a sweep")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kError;
    }

    try {
        if (*gen) return cmd_generate(o);
        if (*as) return cmd_associate(o);
        if (*dp) return cmd_deploy(o);
        if (*pr) return cmd_price(o);
        if (*sw) return cmd_sweep(o);
        if (*cmp) return cmd_compare(o);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
