#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "oran/errors.hpp"
#include "oran/io.hpp"
#include "oran/report.hpp"

using namespace oran;
using namespace oran::report;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.areas = {scenario::AreaClass::industrial};
    c.sides = {1.0};
    c.seeds = {1, 2};
    c.lagrangian.n_max = 40;
    c.scaling_n = {1, 2};
    return c;
}

std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("oran_report_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) { return io::read_file(p.string()); }

}  // namespace

TEST_CASE("fmt is the shortest round trip") {
    CHECK(fmt(0.1) == "0.1");
    CHECK(fmt(60.555e-6) == "6.0555e-05");
    CHECK(std::stod(fmt(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("eMBB largest counts ties as held") {
    CHECK(embb_largest({1, 3, 2}));
    CHECK(embb_largest({3, 3, 3}));
    CHECK_FALSE(embb_largest({4, 3, 2}));
}

TEST_CASE("config round trips through JSON and the hash ignores output_dir") {
    auto c = small_config();
    c.fh_budget = {90e-6, 0, 0};
    c.p1_solver = Solver::both;
    const auto back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    auto moved = c;
    moved.output_dir = "elsewhere";
    CHECK(config_hash(moved) == config_hash(c));
    auto other = c;
    other.seeds = {3};
    CHECK(config_hash(other) != config_hash(c));
    CHECK(config_hash(c).size() == 16);
}

TEST_CASE("bad configuration is rejected with the field name") {
    CHECK_THROWS_AS(config_from_json(Json{{"bogus", 1}}), ParameterError);
    CHECK_THROWS_AS(solver_from_string("magic"), ParameterError);
    auto c = small_config();
    c.seeds.clear();
    CHECK_THROWS_AS(validate(c), ParameterError);
    c = small_config();
    c.sides = {-1.0};
    try {
        validate(c);
        FAIL("expected a throw");
    } catch (const ParameterError& e) {
        CHECK(std::string(e.what()).find("sides") != std::string::npos);
    }
}

TEST_CASE("pipeline is deterministic and its records are consistent") {
    const auto c = small_config();
    const auto a = run_pipeline(c);
    auto serial = c;
    serial.parallel = false;
    const auto b = run_pipeline(serial);
    REQUIRE(a.runs.size() == 2);
    CHECK(runs_csv(a.runs) == runs_csv(b.runs));
    for (const auto& r : a.runs) {
        CAPTURE(r.seed);
        CHECK(r.feasible);
        CHECK(r.status == "ok");
        CHECK(r.violations == 0);
        CHECK(r.config_hash == config_hash(c));
        CHECK(r.rus[0] + r.rus[1] + r.rus[2] > 0);
        CHECK(r.olts > 0);
        CHECK(r.twdm_cost > 0);
        CHECK(r.lag_iters == static_cast<int>(r.trace.size()));
        CHECK(r.scaling_n == std::vector<int>{1, 2});
        for (int s = 0; s < kSlices; ++s) {
            CHECK(r.fh_max[s] <= r.fh_budget[s] + 1e-12);
            CHECK(r.mh_max[s] <= r.mh_budget[s] + 1e-12);
            CHECK(r.bbu_max[s] <= r.bbu_budget[s] + 1e-12);
        }
        CHECK(r.wait_gap_err < 1e-9);
    }
}

TEST_CASE("runs.csv round trips") {
    auto c = small_config();
    c.seeds = {3};
    c.p1_solver = Solver::both;
    c.p2_solver = Solver::exact;
    const auto bundle = run_pipeline(c);
    const auto text = runs_csv(bundle.runs);
    const auto back = parse_runs_csv(text);
    REQUIRE(back.size() == bundle.runs.size());
    CHECK(runs_csv(back) == text);
    CHECK(back[0].scaling_cost == bundle.runs[0].scaling_cost);
    CHECK(back[0].compare.present);
    CHECK_THROWS_AS(parse_runs_csv("wrong,header\n"), ParameterError);
}

TEST_CASE("status with commas survives the CSV") {
    RunRecord r;
    r.status = "infeasible: deploy: \"x\", y";
    const auto back = parse_runs_csv(runs_csv({r}));
    REQUIRE(back.size() == 1);
    CHECK(back[0].status == r.status);
}

TEST_CASE("emitted files match the schema") {
    const auto dir = temp_dir("emit");
    const auto bundle = run_pipeline(small_config());
    const auto files = emit(bundle, dir.string());
    const auto schema = Json::parse(slurp(dir / "schema.json"));
    for (const auto& f : files) {
        REQUIRE(std::filesystem::exists(dir / f));
        if (f.size() < 4 || f.substr(f.size() - 4) != ".csv") continue;
        CAPTURE(f);
        const auto text = slurp(dir / f);
        const auto expected = schema.at(f).size();
        std::size_t start = 0;
        while (start < text.size()) {
            const auto end = text.find('\n', start);
            const auto line = text.substr(start, end - start);
            CHECK(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1 == expected);
            start = end + 1;
        }
    }
    const auto summary = Json::parse(slurp(dir / "summary.json"));
    CHECK(summary.at("config_hash") == config_hash(bundle.config));
    CHECK(summary.at("runs") == 2);
    const auto again = temp_dir("emit_again");
    emit(run_pipeline(small_config()), again.string());
    for (const auto& f : files) CHECK(slurp(dir / f) == slurp(again / f));
}

TEST_CASE("empty bundle writes header-only files") {
    const auto dir = temp_dir("empty");
    ResultBundle empty;
    const auto files = emit(empty, dir.string());
    const auto runs = slurp(dir / "runs.csv");
    CHECK(std::count(runs.begin(), runs.end(), '\n') == 1);
    CHECK(parse_runs_csv(runs).empty());
    for (const auto& f : files) CHECK(std::filesystem::exists(dir / f));
}

TEST_CASE("heuristic never beats the exact solver on the oracle subsample") {
    auto c = small_config();
    c.seeds = {1, 2, 3};
    c.p1_solver = Solver::both;
    c.p2_solver = Solver::both;
    c.scaling_n.clear();
    c.stage_study = false;
    const auto bundle = run_pipeline(c);
    for (const auto& r : bundle.runs) {
        CAPTURE(r.seed);
        REQUIRE(r.compare.present);
        CHECK(r.compare.sub_rus > 0);
        CHECK(r.compare.sub_ues <= c.oracle_max_ues);
        if (r.compare.p1_exact_proven) CHECK(r.compare.p1_heuristic_rus >= r.compare.p1_exact_rus);
        if (r.compare.p2_feasible && r.compare.p2_exact_proven)
            CHECK(r.compare.p2_greedy_cost >= r.compare.p2_exact_cost - 0.01);
    }
    for (const auto& g : compare_solvers(bundle.runs)) CHECK_FALSE(g.factor_violated);
}

TEST_CASE("compare_solvers on identical results reports zero deltas") {
    RunRecord r;
    r.compare.present = true;
    r.compare.p1_heuristic_rus = r.compare.p1_exact_rus = 4;
    r.compare.p2_feasible = true;
    r.compare.p2_greedy_olts = r.compare.p2_exact_olts = 2;
    r.compare.p2_greedy_cost = r.compare.p2_exact_cost = 1000.0;
    r.compare.p2_factor = 2.0;
    const auto g = compare_solvers({r});
    REQUIRE(g.size() == 1);
    CHECK(g[0].ru_delta == 0);
    CHECK(g[0].olt_delta == 0);
    CHECK(g[0].cost_delta == 0.0);
    CHECK(g[0].cost_ratio == 1.0);
    CHECK_FALSE(g[0].factor_violated);
}

TEST_CASE("compare_solvers reports a known gap") {
    RunRecord r;
    r.compare.present = true;
    r.compare.p1_heuristic_rus = 6;
    r.compare.p1_exact_rus = 4;
    r.compare.p2_feasible = true;
    r.compare.p2_greedy_olts = 3;
    r.compare.p2_exact_olts = 2;
    r.compare.p2_greedy_cost = 3000.0;
    r.compare.p2_exact_cost = 1000.0;
    r.compare.p2_factor = 2.0;
    RunRecord skipped;
    const auto g = compare_solvers({r, skipped});
    REQUIRE(g.size() == 1);
    CHECK(g[0].ru_delta == 2);
    CHECK(g[0].olt_delta == 1);
    CHECK(g[0].cost_delta == 2000.0);
    CHECK(g[0].cost_ratio == 3.0);
    CHECK(g[0].factor_violated);
    const auto text = gap_csv(g);
    CHECK(text.find("industrial") == std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("halved study places CUs at Stage-II") {
    ExperimentConfig c;
    c.scaling_n = {1, 2};
    const auto r = run_one(c, scenario::AreaClass::industrial, 2.0, 1);
    REQUIRE(r.feasible);
    REQUIRE(r.halved_feasible);
    CHECK(r.halved_stage2 > 0);
    CHECK(r.halved_cost < r.single_cost);
    REQUIRE(r.scaling_cost.size() == 2);
    CHECK(r.scaling_cost[0] == doctest::Approx(r.halved_cost));
}
