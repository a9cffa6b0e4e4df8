#include "oran/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "oran/errors.hpp"
#include "oran/rng.hpp"

namespace oran::scenario {

std::string to_string(AreaClass c) {
    switch (c) {
        case AreaClass::industrial: return "industrial";
        case AreaClass::urban: return "urban";
        case AreaClass::rural: return "rural";
    }
    return "unknown";
}

std::string to_string(SliceId s) {
    switch (s) {
        case SliceId::urllc: return "uRLLC";
        case SliceId::embb: return "eMBB";
        case SliceId::mmtc: return "mMTC";
    }
    return "unknown";
}

AreaClass area_class_from_string(const std::string& s) {
    if (s == "industrial") return AreaClass::industrial;
    if (s == "urban") return AreaClass::urban;
    if (s == "rural") return AreaClass::rural;
    throw ParameterError("area", "unknown area class '" + s + "'");
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point centroid(const std::vector<Point>& pts) {
    Point c;
    if (pts.empty()) return c;
    for (const auto& p : pts) {
        c.x += p.x;
        c.y += p.y;
    }
    c.x /= static_cast<double>(pts.size());
    c.y /= static_cast<double>(pts.size());
    return c;
}

int active_hours(const UE& ue) { return std::popcount(ue.activity); }

double default_density(AreaClass area) {
    switch (area) {
        case AreaClass::industrial: return 2000.0;
        case AreaClass::urban: return 1000.0;
        case AreaClass::rural: return 500.0;
    }
    return 0.0;
}

std::array<double, kHours> default_profile(AreaClass area) {
    switch (area) {
        case AreaClass::industrial:
            return {0.10, 0.10, 0.10, 0.10, 0.10, 0.15, 0.30, 0.60, 0.85, 0.90, 0.90, 0.90,
                    0.70, 0.85, 0.90, 0.90, 0.85, 0.60, 0.40, 0.25, 0.20, 0.15, 0.10, 0.10};
        case AreaClass::urban:
            return {0.20, 0.15, 0.10, 0.10, 0.10, 0.15, 0.25, 0.45, 0.55, 0.45, 0.40, 0.40,
                    0.50, 0.45, 0.40, 0.40, 0.50, 0.65, 0.80, 0.90, 0.90, 0.80, 0.60, 0.35};
        case AreaClass::rural:
            return {0.15, 0.10, 0.10, 0.10, 0.10, 0.20, 0.35, 0.45, 0.45, 0.40, 0.40, 0.45,
                    0.50, 0.45, 0.40, 0.40, 0.45, 0.55, 0.60, 0.60, 0.55, 0.45, 0.30, 0.20};
    }
    return {};
}

std::array<SliceSpec, kSliceCount> default_slices(AreaClass area) {
    std::array<SliceSpec, kSliceCount> s{};
    s[0] = {SliceId::urllc, 0.0, {10, 20}, {30, 50}, 200e-6, 100e-6, 100e-6, 50e-6};
    s[1] = {SliceId::embb, 0.0, {50, 80}, {100, 150}, 300e-6, 500e-6, 100e-6, 80e-6};
    s[2] = {SliceId::mmtc, 0.0, {10, 20}, {10, 20}, 400e-6, 1000e-6, 100e-6, 100e-6};
    std::array<double, kSliceCount> shares{};
    switch (area) {
        case AreaClass::industrial: shares = {0.25, 0.25, 0.50}; break;
        case AreaClass::urban: shares = {0.30, 0.50, 0.20}; break;
        case AreaClass::rural: shares = {0.20, 0.60, 0.20}; break;
    }
    for (int i = 0; i < kSliceCount; ++i) s[i].share = shares[i];
    return s;
}

GenerationConfig default_config(AreaClass area, double side_km, std::uint64_t seed) {
    GenerationConfig cfg;
    cfg.area = area;
    cfg.side_km = side_km;
    cfg.seed = seed;
    cfg.slices = default_slices(area);
    cfg.profile = default_profile(area);
    return cfg;
}

CandidateRU make_candidate(Point pos, int slice, models::CellKind kind, const RuConfig& ru,
                           const SliceSpec& spec, double coverage_cap, double coverage_floor) {
    CandidateRU c;
    c.pos = pos;
    c.slice = slice;
    c.kind = kind;
    models::CoverageQuery q;
    q.peak_rate = std::max(spec.dl_mbps.hi, spec.ul_mbps.hi) * 1e6;
    q.bandwidth_hz = ru.bandwidth_hz;
    q.tx_power_dbm = kind == models::CellKind::macro ? ru.macro_tx_dbm : ru.small_tx_dbm;
    q.noise_dbm_per_hz = ru.noise_dbm_per_hz;
    q.kind = kind;
    q.cap_km = coverage_cap;
    c.coverage = models::max_coverage_distance(q);
    if (c.coverage < coverage_floor)
        throw ParameterError("coverage", "link budget gives " + std::to_string(c.coverage) +
                                             " km, below the configured floor");
    c.ul_cap = ru.ul_cap;
    c.dl_cap = ru.dl_cap;
    c.fh_ul = ru.fh_ul;
    c.fh_dl = ru.fh_dl;
    c.mh_ul = ru.mh_ul;
    c.mh_dl = ru.mh_dl;
    const auto g = models::split_gops(ru.gops_total, ru.shares);
    c.eta = g.ru;
    c.du = g.du;
    c.cu = g.cu;
    return c;
}

namespace {

void validate(const GenerationConfig& cfg) {
    if (!(cfg.side_km >= 1.0 && cfg.side_km <= 8.0))
        throw ParameterError("side_km", "must lie in [1, 8]");
    double share_sum = 0.0;
    for (const auto& s : cfg.slices) {
        if (s.share < 0.0) throw ParameterError("share", "must be non-negative");
        share_sum += s.share;
        if (!(s.ota_budget > 0 && s.mh_budget > 0 && s.fh_budget > 0 && s.bbu_budget > 0))
            throw ParameterError("budget", "latency budgets must be positive");
        if (s.ul_mbps.lo < 0 || s.ul_mbps.hi < s.ul_mbps.lo || s.dl_mbps.lo < 0 ||
            s.dl_mbps.hi < s.dl_mbps.lo)
            throw ParameterError("demand_range", "need 0 <= lo <= hi");
    }
    if (std::abs(share_sum - 1.0) > 1e-9) throw ParameterError("share", "must sum to 1");
    if (!(cfg.slices[0].mh_budget <= cfg.slices[1].mh_budget &&
          cfg.slices[1].mh_budget <= cfg.slices[2].mh_budget))
        throw ParameterError("mh_budget", "must be ordered uRLLC <= eMBB <= mMTC");
    for (double p : cfg.profile)
        if (p < 0.0 || p > 1.0) throw ParameterError("profile", "fractions must lie in [0,1]");
    if (std::accumulate(cfg.profile.begin(), cfg.profile.end(), 0.0) <= 0.0)
        throw ParameterError("profile", "at least one hour must be active");
    if (!(cfg.ru_density > 0)) throw ParameterError("ru_density", "must be positive");
    if (!(cfg.stage2_area_per_site > 0))
        throw ParameterError("stage2_area_per_site", "must be positive");
    if (cfg.ue_density == 0.0 || (cfg.ue_density < 0.0 && cfg.ue_density != -1.0))
        throw ParameterError("ue_density", "must be positive (or -1 for the class default)");
}

// Exact per-slice quotas by largest remainder, so shares match the configuration.
std::vector<int> slice_quotas(const std::array<SliceSpec, kSliceCount>& slices, int n) {
    std::vector<int> q(kSliceCount, 0);
    std::vector<std::pair<double, int>> rem;
    int assigned = 0;
    for (int s = 0; s < kSliceCount; ++s) {
        const double exact = slices[s].share * n;
        q[s] = static_cast<int>(std::floor(exact));
        assigned += q[s];
        rem.emplace_back(exact - q[s], s);
    }
    std::stable_sort(rem.begin(), rem.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int i = 0; assigned < n; ++i, ++assigned) q[rem[i % kSliceCount].second] += 1;
    return q;
}

double draw_in(Rng& rng, Range r, DemandDraw mode) {
    switch (mode) {
        case DemandDraw::low: return r.lo;
        case DemandDraw::high: return r.hi;
        case DemandDraw::uniform: break;
    }
    return rng.uniform(r.lo, r.hi);
}

std::uint32_t draw_activity(Rng& rng, const std::array<double, kHours>& profile) {
    std::uint32_t mask = 0;
    for (int h = 0; h < kHours; ++h)
        if (rng.bernoulli(profile[h])) mask |= (1u << h);
    if (mask == 0) {
        // Every UE transmits at least once: pick an hour in proportion to the profile.
        const double total = std::accumulate(profile.begin(), profile.end(), 0.0);
        double u = rng.uniform() * total;
        int h = 0;
        for (; h < kHours - 1; ++h) {
            if (u < profile[h]) break;
            u -= profile[h];
        }
        mask = 1u << h;
    }
    return mask;
}

}  // namespace

Scenario generate(const GenerationConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);
    Scenario sc;
    sc.area = cfg.area;
    sc.side_km = cfg.side_km;
    sc.seed = cfg.seed;
    sc.slices = cfg.slices;
    sc.profile = cfg.profile;
    sc.tti = 0.5e-3;

    const double side = cfg.side_km;
    const double density = cfg.ue_density > 0 ? cfg.ue_density : default_density(cfg.area);
    const int n_ue = static_cast<int>(std::lround(density * side * side));

    // Slice labels: exact quotas, shuffled.
    std::vector<int> labels;
    labels.reserve(n_ue);
    const auto quotas = slice_quotas(cfg.slices, n_ue);
    for (int s = 0; s < kSliceCount; ++s) labels.insert(labels.end(), quotas[s], s);
    for (int i = n_ue - 1; i > 0; --i)
        std::swap(labels[i], labels[rng.index(static_cast<std::uint64_t>(i) + 1)]);

    std::vector<Point> parents;
    if (cfg.placement == Placement::clustered) {
        const int k = std::max(1, static_cast<int>(std::lround(cfg.clusters_per_km2 * side * side)));
        for (int i = 0; i < k; ++i) parents.push_back({rng.uniform(0, side), rng.uniform(0, side)});
    }

    sc.ues.resize(n_ue);
    for (int u = 0; u < n_ue; ++u) {
        UE& ue = sc.ues[u];
        if (cfg.placement == Placement::uniform) {
            ue.pos = {rng.uniform(0, side), rng.uniform(0, side)};
        } else {
            const Point p = parents[rng.index(parents.size())];
            for (;;) {
                const double r = cfg.cluster_radius * std::sqrt(rng.uniform());
                const double a = 2.0 * M_PI * rng.uniform();
                Point q{p.x + r * std::cos(a), p.y + r * std::sin(a)};
                if (q.x >= 0 && q.x <= side && q.y >= 0 && q.y <= side) {
                    ue.pos = q;
                    break;
                }
            }
        }
        ue.slice = labels[u];
        const auto& spec = cfg.slices[ue.slice];
        ue.activity = draw_activity(rng, cfg.profile);
        const double frac = static_cast<double>(active_hours(ue)) / kHours;
        ue.ul_demand = draw_in(rng, spec.ul_mbps, cfg.demand) * 1e6 * frac;
        ue.dl_demand = draw_in(rng, spec.dl_mbps, cfg.demand) * 1e6 * frac;
    }

    // Candidate RU lattice with jitter, serpentine order, deficit-based slice split.
    const int n_axis = std::max(1, static_cast<int>(std::floor(std::sqrt(cfg.ru_density) * side + 1e-9)));
    const double pitch = side / n_axis;
    std::array<int, kSliceCount> count{};
    int k = 0;
    for (int j = 0; j < n_axis; ++j) {
        for (int t = 0; t < n_axis; ++t, ++k) {
            const int i = (j % 2 == 0) ? t : n_axis - 1 - t;
            Point p{(i + 0.5) * pitch + rng.uniform(-cfg.jitter, cfg.jitter) * pitch,
                    (j + 0.5) * pitch + rng.uniform(-cfg.jitter, cfg.jitter) * pitch};
            p.x = std::clamp(p.x, 0.0, side);
            p.y = std::clamp(p.y, 0.0, side);
            int best = 0;
            double best_deficit = -1e300;
            for (int s = 0; s < kSliceCount; ++s) {
                const double deficit = cfg.slices[s].share * (k + 1) - count[s];
                if (deficit > best_deficit + 1e-12) {
                    best_deficit = deficit;
                    best = s;
                }
            }
            count[best] += 1;
            const auto kind = ((i + j) % 2 == 0) ? models::CellKind::macro : models::CellKind::small;
            sc.rus.push_back(make_candidate(p, best, kind, cfg.ru, cfg.slices[best],
                                            cfg.coverage_cap, cfg.coverage_floor));
        }
    }

    sc.sites.reach_stage1 = cfg.reach_stage1;
    sc.sites.reach_stage2 = cfg.reach_stage2;
    for (const auto& r : sc.rus) sc.sites.stage1_olts.push_back(r.pos);
    const int n2 = std::max(2, static_cast<int>(std::lround(side / std::sqrt(cfg.stage2_area_per_site))));
    const double p2 = side / n2;
    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n2; ++i) sc.sites.stage2_olts.push_back({(i + 0.5) * p2, (j + 0.5) * p2});
    return sc;
}

std::array<int, kHours> active_counts(const Scenario& sc) {
    std::array<int, kHours> out{};
    for (const auto& ue : sc.ues)
        for (int h = 0; h < kHours; ++h)
            if (ue.activity & (1u << h)) out[h] += 1;
    return out;
}

DistanceTables distances(const Scenario& sc) {
    DistanceTables t;
    t.ue_ru.assign(sc.ues.size(), std::vector<double>(sc.rus.size(), 0.0));
    for (std::size_t u = 0; u < sc.ues.size(); ++u)
        for (std::size_t b = 0; b < sc.rus.size(); ++b)
            t.ue_ru[u][b] = distance(sc.ues[u].pos, sc.rus[b].pos);
    return t;
}

}  // namespace oran::scenario
