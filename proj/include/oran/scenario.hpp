#pragma once

// Synthetic deployment scenarios: UE population per slice, candidate RU
// lattice, Stage-I / Stage-II OLT candidate sites and distance helpers.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "oran/models.hpp"

namespace oran::scenario {

inline constexpr int kSliceCount = 3;
inline constexpr int kHours = 24;

enum class AreaClass : std::uint8_t { industrial, urban, rural };
enum class SliceId : std::uint8_t { urllc = 0, embb = 1, mmtc = 2 };
enum class Placement : std::uint8_t { uniform, clustered };
enum class DemandDraw : std::uint8_t { uniform, low, high };

std::string to_string(AreaClass c);
std::string to_string(SliceId s);
AreaClass area_class_from_string(const std::string& s);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Euclidean distance in km.
double distance(Point a, Point b);
Point centroid(const std::vector<Point>& pts);

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct SliceSpec {
    SliceId id = SliceId::urllc;
    double share = 0.0;        // fraction of UEs
    Range ul_mbps;             // peak uplink demand range
    Range dl_mbps;             // peak downlink demand range
    double ota_budget = 0.0;   // s
    double mh_budget = 0.0;    // s
    double fh_budget = 0.0;    // s
    double bbu_budget = 0.0;   // s
};

struct UE {
    Point pos;
    int slice = 0;
    double ul_demand = 0.0;  // bit/s, averaged over the day
    double dl_demand = 0.0;  // bit/s
    std::uint32_t activity = 0;  // bit h set when active in hour h
};

int active_hours(const UE& ue);

/// Per-RU radio, transport and compute figures shared by every candidate.
struct RuConfig {
    double ul_cap = 28e9;   // W_b^UL
    double dl_cap = 30e9;   // W_b^DL
    double fh_ul = 9.632e9; // V_b (split 7.2)
    double fh_dl = 11.113e9;
    double mh_ul = 1.111e9; // U_b (split 2)
    double mh_dl = 1.111e9;
    double gops_total = 1800.0;  // per direction, per TTI
    models::SplitShares shares{};
    double macro_tx_dbm = 46.0;
    double small_tx_dbm = 30.0;
    double bandwidth_hz = 100e6;
    double noise_dbm_per_hz = -174.0;
};

struct CandidateRU {
    Point pos;
    int slice = 0;
    models::CellKind kind = models::CellKind::macro;
    double coverage = 1.0;  // km
    double ul_cap = 0.0;
    double dl_cap = 0.0;
    double fh_ul = 0.0;
    double fh_dl = 0.0;
    double mh_ul = 0.0;
    double mh_dl = 0.0;
    double eta = 0.0;  // RU function GOPS per direction
    double du = 0.0;   // DU function GOPS per direction
    double cu = 0.0;   // CU function GOPS per direction
};

struct SiteGraph {
    std::vector<Point> stage1_olts;  // co-located with candidate RU sites
    std::vector<Point> stage2_olts;
    double reach_stage1 = 20.0;      // km
    double reach_stage2 = 20.0;      // km
};

struct GenerationConfig {
    AreaClass area = AreaClass::urban;
    double side_km = 1.0;
    std::uint64_t seed = 1;
    double ue_density = -1.0;  // per km^2; negative means the class default
    double ru_density = 15.0;  // max candidate RU sites per km^2
    double stage2_area_per_site = 4.0;  // km^2 per Stage-II candidate
    double coverage_cap = 1.0;
    double coverage_floor = 0.5;
    double jitter = 0.25;      // fraction of lattice pitch
    Placement placement = Placement::uniform;
    int clusters_per_km2 = 4;
    double cluster_radius = 0.15;
    DemandDraw demand = DemandDraw::uniform;
    std::array<SliceSpec, kSliceCount> slices{};
    std::array<double, kHours> profile{};
    RuConfig ru{};
    double reach_stage1 = 20.0;
    double reach_stage2 = 20.0;
};

/// Defaults for a class: densities, slice shares, budgets and activity profile.
GenerationConfig default_config(AreaClass area, double side_km, std::uint64_t seed);

/// Default 24-hour activity fractions (editable).
std::array<double, kHours> default_profile(AreaClass area);
double default_density(AreaClass area);
std::array<SliceSpec, kSliceCount> default_slices(AreaClass area);

struct Scenario {
    AreaClass area = AreaClass::urban;
    double side_km = 1.0;
    std::uint64_t seed = 0;
    std::array<SliceSpec, kSliceCount> slices{};
    std::array<double, kHours> profile{};
    std::vector<UE> ues;
    std::vector<CandidateRU> rus;
    SiteGraph sites;
    double tti = 0.5e-3;
};

/// Build a scenario. Throws ParameterError for out-of-range sides or bad shares.
Scenario generate(const GenerationConfig& cfg);

/// Candidate RU filled from the shared RU configuration and its slice peak rate.
CandidateRU make_candidate(Point pos, int slice, models::CellKind kind, const RuConfig& ru,
                           const SliceSpec& spec, double coverage_cap, double coverage_floor);

/// Number of UEs active in each hour.
std::array<int, kHours> active_counts(const Scenario& sc);

struct DistanceTables {
    std::vector<std::vector<double>> ue_ru;  // [u][b]
};

/// Dense UE x RU distance table.
DistanceTables distances(const Scenario& sc);

}  // namespace oran::scenario
