#pragma once

// Experiment harness: runs generate -> associate -> deploy -> price over a
// sweep of (class, side, seed) and emits plot-ready result bundles.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "oran/assoc.hpp"
#include "oran/cost.hpp"
#include "oran/deploy.hpp"
#include "oran/lagrangian.hpp"
#include "oran/scenario.hpp"

namespace oran::report {

using Json = nlohmann::json;
inline constexpr int kSlices = scenario::kSliceCount;

enum class Solver : std::uint8_t { heuristic, exact, both };
std::string to_string(Solver s);
Solver solver_from_string(const std::string& s);

struct ExperimentConfig {
    std::vector<scenario::AreaClass> areas{scenario::AreaClass::industrial, scenario::AreaClass::urban,
                                           scenario::AreaClass::rural};
    std::vector<double> sides{1.0, 2.0};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    Solver p1_solver = Solver::heuristic;  // exact runs on the oracle subsample
    Solver p2_solver = Solver::heuristic;
    // Per-slice overrides; values <= 0 keep the class defaults.
    std::array<double, kSlices> fh_budget{}, mh_budget{}, bbu_budget{};
    cost::PriceBook prices;
    deploy::DeployConfig deploy;              // main two-stage run
    bool stage_study = true;                  // halved two-stage vs full single-stage
    double halved_gops = 0.5e5;
    double halved_share = 1.0;                // Stage-I servers host DUs only; CUs go to Stage-II
    std::vector<int> scaling_n{1, 2, 3, 4};   // on the halved model; empty disables the study
    cost::OtnOptions otn;
    lagrangian::Config lagrangian;
    int oracle_max_ues = 60;
    int oracle_max_rus = 12;
    int oracle_p2_rus = 5;
    int oracle_p2_olts = 3;
    int oracle_p2_stage2 = 2;
    bool parallel = true;
    std::string output_dir = "out";
};

/// Validates and throws ParameterError naming the field.
void validate(const ExperimentConfig& cfg);

Json to_json(const ExperimentConfig& cfg);
/// Applies the keys present in `j` on top of `base`.
ExperimentConfig config_from_json(const Json& j, ExperimentConfig base = {});

/// FNV-1a of the canonical config document without output_dir, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

using SliceStats = std::array<double, kSlices>;

/// Oracle-subsample comparison of heuristic and exact solvers.
struct SolverComparison {
    bool present = false;
    int sub_ues = 0;
    int sub_rus = 0;
    int p1_heuristic_rus = 0;
    int p1_exact_rus = 0;
    bool p1_exact_proven = false;
    int p2_rus = 0;
    bool p2_feasible = false;
    int p2_greedy_olts = 0;
    int p2_exact_olts = 0;
    double p2_greedy_cost = 0.0;
    double p2_exact_cost = 0.0;
    double p2_factor = 0.0;  // ln(O * sum B) of the subsample model
    bool p2_exact_proven = false;
};

struct RunRecord {
    std::string area;
    double side_km = 0.0;
    std::uint64_t seed = 0;
    std::string solver;       // solver labels "p1/p2"
    std::string config_hash;
    std::string status;       // "ok" or the failure message with stage and instance
    bool feasible = false;
    int num_ues = 0;
    int num_candidates = 0;

    std::array<int, kSlices> rus{};
    double lag_lb = 0.0;
    double lag_ub = 0.0;
    int lag_iters = 0;
    double lag_gap_bound = 0.0;

    int olts = 0;
    int stage2_olts = 0;
    int du_at_ru = 0;
    int violations = 0;

    // Averages over the RUs of each slice that use the link (0 when none), seconds.
    SliceStats fh_ul{}, fh_dl{}, mh_ul{}, mh_dl{}, bbu{};
    // Worst case per slice and the budgets they are checked against.
    SliceStats fh_max{}, mh_max{}, bbu_max{};
    SliceStats fh_budget{}, mh_budget{}, bbu_budget{};
    double wait_gap_err = 0.0;  // max |UL - DL - wait| over all links of the plan with DL loads set to UL

    double twdm_cost = 0.0;
    double twdm_fiber = 0.0;
    double twdm_servers = 0.0;
    bool otn_feasible = false;
    double otn_cost = 0.0;
    double savings = 0.0;  // (otn - twdm) / otn

    bool halved_feasible = false;
    double halved_cost = 0.0;
    int halved_stage2 = 0;
    bool single_feasible = false;
    double single_cost = 0.0;

    std::vector<int> scaling_n;
    std::vector<double> scaling_cost;  // -1 when infeasible

    SolverComparison compare;
    std::vector<lagrangian::IterRecord> trace;
};

struct ResultBundle {
    ExperimentConfig config;
    std::vector<RunRecord> runs;
};

/// One (class, side, seed) run. Never throws for infeasible instances; the
/// record's status names the stage instead.
RunRecord run_one(const ExperimentConfig& cfg, scenario::AreaClass area, double side, std::uint64_t seed);

/// Generated scenario with the config's budget overrides applied.
scenario::Scenario scenario_for(const ExperimentConfig& cfg, scenario::AreaClass area, double side,
                                std::uint64_t seed);

/// Oracle subsample for the exact P1 solver: the max_rus candidates nearest
/// the area centre and up to max_ues UEs they cover, nearest first.
scenario::Scenario p1_oracle_subsample(const scenario::Scenario& sc, int max_rus, int max_ues);

/// Oracle subsample for the exact P2 solver: installed RUs nearest the centre,
/// the first of their sites as Stage-I candidates and the nearest Stage-II sites.
deploy::P2Model p2_oracle_subsample(const ExperimentConfig& cfg, const scenario::Scenario& sc,
                                    const assoc::Assignment& a);

/// Deterministic per (config, seed); independent runs execute in a worker pool.
ResultBundle run_pipeline(const ExperimentConfig& cfg);

/// Column names of runs.csv.
std::vector<std::string> run_columns();
std::string runs_csv(const std::vector<RunRecord>& runs);
std::vector<RunRecord> parse_runs_csv(const std::string& text);

/// Writes runs.csv, summary.json and the per-figure files into dir.
/// Returns the written file names in order.
std::vector<std::string> emit(const ResultBundle& bundle, const std::string& dir);

/// Per-run heuristic minus exact deltas on the oracle subsample.
struct GapRow {
    std::string area;
    double side_km = 0.0;
    std::uint64_t seed = 0;
    int ru_delta = 0;
    int olt_delta = 0;
    double cost_delta = 0.0;
    double cost_ratio = 1.0;
    double factor = 0.0;
    bool factor_violated = false;
};

std::vector<GapRow> compare_solvers(const std::vector<RunRecord>& runs);
std::string gap_csv(const std::vector<GapRow>& rows);

/// Byte-identical formatting of a double (shortest round trip).
std::string fmt(double v);

/// eMBB holds at least as many RUs as each other slice (ties count as held).
bool embb_largest(const std::array<int, kSlices>& rus);

}  // namespace oran::report
