#pragma once

// Lagrangian relaxation of P1 over the single-association constraints:
// closed-form subproblem, repair heuristic, subgradient updates and the
// surrounding subgradient loop.

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "oran/assoc.hpp"

namespace oran::lagrangian {

struct R1Options {
    // Replace the per-RU open/attach rule by a fractional knapsack on the
    // summed UL+DL airtime (still a valid lower bound, tighter in practice).
    bool enforce_latency = false;
    bool parallel = true;
};

struct R1Solution {
    std::vector<std::uint8_t> theta;  // per RU
    std::vector<std::uint8_t> x;      // per eligible pair (model.pairs order)
    double lb = 0.0;
    std::int64_t ops = 0;             // coefficient evaluations
};

R1Solution solve_r1(const assoc::P1Model& m, std::span<const double> nu, const R1Options& opt = {});

struct RepairResult {
    bool feasible = false;
    assoc::Assignment assignment;
    int failed_ue = -1;
};

/// Attach every UE to an open RU that keeps all OTA budgets; closes unused RUs.
RepairResult repair_ub(const assoc::P1Model& m, std::span<const std::uint8_t> theta);
/// Backtracking repair over the open RUs, stopped after `node_limit` nodes.
RepairResult repair_search(const assoc::P1Model& m, std::span<const std::uint8_t> theta, std::int64_t node_limit);

/// Local search: empties installed RUs one at a time by moving their UEs to
/// other installed RUs, keeping each move that lowers the objective. Returns
/// the number of RUs closed.
int close_rus(const assoc::P1Model& m, assoc::Assignment& a);

/// Updates `nu` in place and returns the per-slice step sizes.
std::array<double, scenario::kSliceCount> subgradient_step(const assoc::P1Model& m, std::vector<double>& nu,
                                                          std::span<const std::uint8_t> x, double p_opt,
                                                          double p_lb, double lambda);

struct Config {
    int n_max = 200;
    double lambda0 = 2.0;
    int halve_after = 5;
    double tol = 1e-4;
    bool enforce_latency = true;
    bool seed_incumbent = true;  // start from the all-RUs-open repair
    bool close_pass = true;      // run close_rus on every repaired incumbent
    std::int64_t search_nodes = 200000;  // backtracking budget when the seed repair fails
    bool parallel = true;
};

struct IterRecord {
    int n = 0;
    double lb = 0.0;
    double ub = std::numeric_limits<double>::infinity();  // this iteration's repair
    double best_lb = 0.0;
    double best_ub = std::numeric_limits<double>::infinity();
    double lambda = 0.0;
    double step_term = 0.0;  // lambda * (P_opt - P_lb), zero when no update
    std::array<double, scenario::kSliceCount> sigma{};
};

struct GapTrace {
    std::vector<IterRecord> iters;
    double gap_bound = std::numeric_limits<double>::infinity();
};

struct Result {
    assoc::SolveStatus status = assoc::SolveStatus::infeasible;
    assoc::Assignment assignment;
    GapTrace trace;
    double best_lb = -std::numeric_limits<double>::infinity();
    double best_ub = std::numeric_limits<double>::infinity();
};

Result run_algorithm1(const assoc::P1Model& m, const Config& cfg = {});

/// (R^2 + sum s_n^2) / ((2/G) * sum s_n) over the recorded step terms.
double gap_bound(const GapTrace& trace, double R, double G);

/// Upper bound on any feasible P1 objective: every RU open, every UE at its budget.
double trivial_upper_bound(const assoc::P1Model& m);

}  // namespace oran::lagrangian
