#pragma once

// Pricing of TWDM-PON plans, the OTN mesh baseline and the Stage-II
// wavelength-aggregation scaling study.

#include <span>
#include <string>
#include <vector>

#include "oran/deploy.hpp"
#include "oran/price_book.hpp"

namespace oran::cost {

struct CostBreakdown {
    Cents olt_onu = 0;
    Cents fiber = 0;
    Cents splitters = 0;
    Cents servers_install = 0;
    Cents servers_gops = 0;
    Cents switching = 0;  // OTN only
    Cents total = 0;

    Cents sum_of_parts() const {
        return olt_onu + fiber + splitters + servers_install + servers_gops + switching;
    }
};

/// Itemized objective of P2 for a plan.
CostBreakdown price_plan(const deploy::P2Model& m, const deploy::DeploymentPlan& p, const PriceBook& book);
inline CostBreakdown price_plan(const deploy::P2Model& m, const deploy::DeploymentPlan& p) {
    return price_plan(m, p, m.prices);
}

struct OtnOptions {
    double link_capacity = 100e9;  // bit/s per fiber and direction
    int knn = 3;                   // nearest-neighbour links added to the spanning tree
    double hop_latency = 1e-6;     // switching delay per traversed node, s
};

struct OtnLink {
    int a = 0;
    int b = 0;
    double km = 0.0;
    int fibers = 1;
    double load = 0.0;  // worst direction, bit/s
};

struct OtnResult {
    bool feasible = false;
    std::string status;
    CostBreakdown cost;
    std::vector<scenario::Point> nodes;
    std::vector<OtnLink> links;
    int direct_links = 0;       // links added because the mesh path broke a budget
    double max_path_latency = 0.0;
};

/// OTN mesh over the plan's RU and server sites, with the same DU/CU placement.
OtnResult price_otn(const deploy::P2Model& m, const deploy::DeploymentPlan& p, const PriceBook& book,
                    const OtnOptions& opt = {});

struct ScalingPoint {
    int n = 1;
    bool feasible = false;
    deploy::DeploymentPlan plan;
    CostBreakdown cost;
};

/// For each N: R_q = N * R_o, Stage-II OLT and ONU prices scaled by N, greedy rerun.
std::vector<ScalingPoint> stage2_scaling(const deploy::P2Model& base, std::span<const int> n_values,
                                         bool parallel = true);

/// Model copy with the scaling of one study point applied.
deploy::P2Model scaled_model(const deploy::P2Model& base, int n);

}  // namespace oran::cost
