#pragma once

// Front/mid-haul design over two-stage TWDM-PON with DU/CU placement (P2):
// model builder, latency and processing evaluators, greedy deployment,
// small exact solver and constraint checker.

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "oran/assoc.hpp"
#include "oran/price_book.hpp"
#include "oran/scenario.hpp"

namespace oran::deploy {

inline constexpr int kSlices = scenario::kSliceCount;

enum class Dir : std::uint8_t { ul = 0, dl = 1 };

/// Server and PON dimensioning. Totals are split equally between UL and DL.
struct DeployConfig {
    double stage1_rate = 100e9;         // R_o per direction
    double stage2_rate = 100e9;         // R_q per direction
    double stage1_wait = 5e-6;          // delta_{b,o}
    double stage2_wait = 5e-6;          // delta_{o,q}
    double ru_proc_gops = 1e5;          // H_b per direction (RU hardware, not priced)
    double ru_server_gops = 1e5;        // G_b total
    double olt_server_gops = 1e5;       // G_o total
    double stage2_server_gops = 1e5;    // G_q total
    double olt_du_share = 0.5;          // fraction of G_o reserved for DU functions
    int splitter_cap = 64;              // ONUs per PON; <= 0 disables the limit
    bool allow_stage2 = true;           // false forces single-stage designs
    std::array<double, kSlices> bbu_override{};  // > 0 replaces a slice's BBU budget
};

struct P2Model {
    // Installed RUs.
    int num_rus = 0;
    std::vector<int> ru_id;  // index in the scenario
    std::vector<int> ru_slice;
    std::vector<scenario::Point> ru_pos;
    std::vector<std::array<double, 2>> U, V;  // mid-haul / front-haul demand per direction
    std::vector<double> eta, du, cu;          // GOPS/TTI per direction

    // Stage-I candidates (co-located with installed RU sites). The RN of
    // candidate o sits at the centroid of the RU sites within reach of o.
    int num_olts = 0;
    std::vector<scenario::Point> olt_pos;
    std::vector<scenario::Point> rn1;                // per OLT
    std::vector<std::vector<double>> d_ru_rn1;       // D_{b,rI} [b][o]
    std::vector<double> d_rn1_olt;                   // D_{rI,o}
    std::vector<std::vector<std::uint8_t>> reach1;   // [b][o]

    // Stage-II candidates. The RN of q sits at the centroid of the Stage-I
    // candidate sites within reach of q.
    int num_q = 0;
    std::vector<scenario::Point> q_pos;
    std::vector<scenario::Point> rn2;                // per Stage-II OLT
    std::vector<std::vector<double>> d_olt_rn2;      // D_{o,rII} [o][q]
    std::vector<double> d_rn2_q;                     // D_{rII,q}
    std::vector<std::vector<std::uint8_t>> reach2;   // [o][q]

    // Capacities per direction.
    double R1 = 0, R2 = 0, H = 0, GD_b = 0, GD_o = 0, GC_o = 0, GC_q = 0;
    double G_b = 0, G_o = 0, G_q = 0;
    double wait1 = 0, wait2 = 0, tti = 0.5e-3;
    std::array<double, kSlices> fh_budget{}, mh_budget{}, bbu_budget{};
    int splitter_cap = 64;
    bool allow_stage2 = true;
    cost::PriceBook prices;

    double d_ru_olt(int b, int o) const { return d_ru_rn1[b][o] + d_rn1_olt[o]; }
    double d_olt_q(int o, int q) const { return d_olt_rn2[o][q] + d_rn2_q[q]; }
};

/// Throws InfeasibleError (stage "deploy") naming an RU that no OLT candidate reaches.
P2Model build_p2(const scenario::Scenario& sc, const assoc::Assignment& a, const DeployConfig& cfg = {},
                 const cost::PriceBook& prices = {});

/// Same, from explicit site lists (used by small fixtures).
P2Model build_p2(const scenario::Scenario& sc, const std::vector<int>& rus,
                 const std::vector<scenario::Point>& olts, const std::vector<scenario::Point>& stage2,
                 const DeployConfig& cfg = {}, const cost::PriceBook& prices = {});

inline constexpr int kCuLocal = -1;  // CU at the Stage-I OLT

struct DeploymentPlan {
    std::vector<int> olt_of_ru;                  // y
    std::vector<std::uint8_t> du_at_ru;          // omega^d_b (0 means DU at its OLT)
    std::vector<std::array<int, kSlices>> cu;    // per OLT and slice: kCuLocal or Stage-II index
    std::vector<int> q_of_olt;                   // z, -1 when none
    std::vector<std::uint8_t> olt_on, q_on;      // theta_o, theta_q
    bool feasible = false;
    std::string status;

    // Annotations filled by annotate().
    std::vector<double> rho_o, rho_q;
    std::vector<std::array<double, 2>> stage1_lat;  // per RU
    std::vector<std::array<double, 2>> stage2_lat;  // per OLT (0 when no Stage-II link)
    std::vector<std::array<double, 2>> proc;        // per RU, ratio vs budget/tti
};

DeploymentPlan empty_plan(const P2Model& m);

/// Stage-I PON latency of RU b on its OLT (seconds).
double pon_latency_stage1(const P2Model& m, const DeploymentPlan& p, int b, Dir d);
/// Bound that applies: mid-haul if the DU sits at the RU, front-haul otherwise.
double stage1_bound(const P2Model& m, const DeploymentPlan& p, int b);
/// Stage-II PON latency of OLT o towards its Stage-II OLT (seconds).
double pon_latency_stage2(const P2Model& m, const DeploymentPlan& p, int o, Dir d);
/// Processing ratio of RU b (dimensionless, compared with bbu_budget / tti).
double processing_latency(const P2Model& m, const DeploymentPlan& p, int b, Dir d);

/// Fiber length of Stage-I tree o: D_{rI,o} + sum of attached D_{b,rI} (0 when o is off).
double rho_stage1(const P2Model& m, const DeploymentPlan& p, int o);
/// Fiber length of Stage-II tree q: D_{rII,q} + sum of attached D_{o,rII} (0 when q is off).
double rho_stage2(const P2Model& m, const DeploymentPlan& p, int q);

/// Fills rho and latency annotations.
void annotate(const P2Model& m, DeploymentPlan& p);

struct GreedyStats {
    int restarts = 0;
    int stage1_reruns = 0;
};

/// Greedy deployment. Returns a plan with feasible=false and a status message when it gives up.
DeploymentPlan greedy_deploy(const P2Model& m, GreedyStats* stats = nullptr);

struct ExactP2Limits {
    std::int64_t max_nodes = 20'000'000;
    double time_limit_s = 60.0;
};

struct ExactP2Result {
    DeploymentPlan plan;
    bool proven_optimal = false;
    std::int64_t nodes = 0;
    cost::Cents cost = 0;
};

/// Cost-minimal plan by exhaustive branch-and-bound (tiny instances).
ExactP2Result solve_p2_exact_small(const P2Model& m, const ExactP2Limits& limits = {});

/// Raw decision variables of P2, able to express broken plans.
struct P2Variables {
    std::vector<std::vector<std::uint8_t>> y;      // [b][o]
    std::vector<std::vector<std::uint8_t>> z;      // [o][q]
    std::vector<std::uint8_t> theta_o, theta_q;
    std::vector<std::uint8_t> du_ru;               // omega^d_b
    std::vector<std::vector<std::uint8_t>> du_olt; // omega^d_{b,o}
    std::vector<std::array<std::uint8_t, kSlices>> cu_olt;                // omega^c_{o,s}
    std::vector<std::vector<std::array<std::uint8_t, kSlices>>> cu_q;     // omega^c_{o,q,s}
    std::vector<std::vector<std::uint8_t>> chi, ups;                     // linearized products
};

P2Variables to_variables(const P2Model& m, const DeploymentPlan& p);

struct Violation {
    std::string family;
    std::vector<int> indices;
    double slack = 0.0;
    std::string detail;
};

/// Families: reach, installation, ru_attachment, stage2_attachment, du_placement,
/// cu_placement, linearization, splitter, stage1_uplink, stage1_downlink,
/// stage2_uplink, stage2_downlink, processing_uplink, processing_downlink.
std::vector<Violation> check_plan(const P2Model& m, const P2Variables& v);
std::vector<Violation> check_plan(const P2Model& m, const DeploymentPlan& p);

/// Greedy approximation factor ln(O * sum B).
double approximation_factor(const P2Model& m);

}  // namespace oran::deploy
