#pragma once

// UE-to-RU association (P1): model builder, exact branch-and-bound,
// integrality-relaxation bound and constraint checker.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "oran/scenario.hpp"

namespace oran::assoc {

/// One eligible UE-RU pair with its precomputed coefficients.
struct Pair {
    int ue = 0;
    int ru = 0;
    double dist = 0.0;   // km
    double prop = 0.0;   // D/c, s
    double ul = 0.0;     // W_u^UL * tti / W_b^UL, s
    double dl = 0.0;     // W_u^DL * tti / W_b^DL, s
    double c0 = 0.0;     // 2D/c + U_s (ul + dl): objective coefficient before beta
};

struct P1Model {
    int num_ues = 0;
    int num_rus = 0;
    double alpha = 0.0;  // 1 / sum_s B_s
    double beta = 0.0;   // 1 / sum_s U_s
    double tti = 0.5e-3;
    std::vector<int> ue_slice;
    std::vector<int> ru_slice;
    std::vector<double> ue_ul;   // bit/s
    std::vector<double> ue_dl;
    std::vector<double> ru_ul_cap;
    std::vector<double> ru_dl_cap;
    std::vector<double> slice_budget;  // OTA budget per slice
    std::vector<int> slice_ues;        // U_s
    // Pairs grouped by UE (sorted by distance, then RU index).
    std::vector<Pair> pairs;
    std::vector<int> ue_begin;  // size num_ues + 1
    // Pair indices grouped by RU (ascending UE).
    std::vector<int> ru_pairs;
    std::vector<int> ru_begin;  // size num_rus + 1

    int pair_index(int u, int b) const;  // -1 when not eligible
};

struct BuildOptions {
    double air_speed = 3e8;
    bool parallel = true;
};

/// Throws InfeasibleError (stage "assoc") naming the first UE without an eligible RU.
P1Model build_p1(const scenario::Scenario& sc, const BuildOptions& opt = {});

struct Assignment {
    std::vector<int> attach;     // RU per UE, -1 when unattached
    std::vector<int> installed;  // sorted RU indices
    double objective = 0.0;
};

/// General 0/1 point of P1, able to express duplicate or missing attachments.
struct P1Variables {
    std::vector<std::uint8_t> theta;            // per RU
    std::vector<std::pair<int, int>> x;         // (ue, ru) set to one
};

P1Variables to_variables(const P1Model& m, const Assignment& a);

struct OtaLatency {
    double ul = 0.0;
    double dl = 0.0;
};

/// Uplink/downlink OTA latency of UE u on RU b given everyone attached to b.
OtaLatency ota_latency(const P1Model& m, const Assignment& a, int u, int b);

/// alpha*|installed| + beta * sum of OTA latencies over each slice's UEs.
double objective(const P1Model& m, const P1Variables& v);
double objective(const P1Model& m, const Assignment& a);

/// Fill `installed` from the attachments and recompute the objective.
void finalize(const P1Model& m, Assignment& a);

enum class SolveStatus { optimal, feasible, infeasible, unknown };
std::string to_string(SolveStatus s);

struct ExactLimits {
    std::int64_t max_nodes = 50'000'000;
    double time_limit_s = 60.0;
};

/// Absolute tolerance (s) applied to every latency comparison.
inline constexpr double kLatencyTol = 1e-12;

struct ExactResult {
    SolveStatus status = SolveStatus::unknown;
    Assignment assignment;
    bool proven_optimal = false;
    std::int64_t nodes = 0;
};

ExactResult solve_exact(const P1Model& m, const ExactLimits& limits = {});

struct LpBound {
    double objective = 0.0;
    double installed = 0.0;  // sum of relaxed theta
    bool solved = false;
};

LpBound lp_lower_bound(const P1Model& m);

struct Violation {
    std::string family;
    std::vector<int> indices;
    double slack = 0.0;  // negative amount by which the constraint fails
    std::string detail;
};

std::vector<Violation> check_feasible(const P1Model& m, const P1Variables& v);
std::vector<Violation> check_feasible(const P1Model& m, const Assignment& a);

}  // namespace oran::assoc
