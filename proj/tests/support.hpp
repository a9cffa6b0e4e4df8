#pragma once

// Small hand-sized instances shared by the test binaries.

#include <cstdint>
#include <vector>

#include "oran/deploy.hpp"
#include "oran/models.hpp"
#include "oran/rng.hpp"
#include "oran/scenario.hpp"

namespace testing_support {

using oran::scenario::Scenario;

/// Random association instance on a 1 km square. Every UE is guaranteed at
/// least one covering RU of its own slice.
inline Scenario tiny_p1(std::uint64_t seed, int n_ue, int n_ru, int n_slices = 1, double cap = 4e9) {
    oran::Rng rng(seed * 7919 + 13);
    Scenario sc;
    sc.side_km = 1.0;
    sc.seed = seed;
    sc.slices = oran::scenario::default_slices(oran::scenario::AreaClass::urban);
    for (int b = 0; b < n_ru; ++b) {
        oran::scenario::CandidateRU ru;
        ru.pos = {rng.uniform(), rng.uniform()};
        ru.slice = b % n_slices;
        ru.coverage = rng.uniform(0.3, 0.8);
        ru.ul_cap = cap;
        ru.dl_cap = cap * 30.0 / 28.0;
        sc.rus.push_back(ru);
    }
    for (int u = 0; u < n_ue; ++u) {
        oran::scenario::UE ue;
        ue.slice = static_cast<int>(rng.index(static_cast<std::uint64_t>(std::min(n_slices, n_ru))));
        ue.pos = {rng.uniform(), rng.uniform()};
        ue.ul_demand = rng.uniform(50e6, 500e6);
        ue.dl_demand = rng.uniform(50e6, 500e6);
        ue.activity = 0xFFFFFF;
        bool covered = false;
        for (const auto& ru : sc.rus)
            if (ru.slice == ue.slice && oran::scenario::distance(ru.pos, ue.pos) <= ru.coverage) covered = true;
        if (!covered) {
            // Pull the UE next to a random RU of its slice.
            int b = 0;
            do {
                b = static_cast<int>(rng.index(sc.rus.size()));
            } while (sc.rus[b].slice != ue.slice);
            ue.pos = {sc.rus[b].pos.x + rng.uniform(-0.1, 0.1), sc.rus[b].pos.y + rng.uniform(-0.1, 0.1)};
        }
        sc.ues.push_back(ue);
    }
    return sc;
}

/// RU placed at `pos` with the default RU configuration.
inline oran::scenario::CandidateRU plain_ru(oran::scenario::Point pos, int slice) {
    const oran::scenario::RuConfig cfg;
    oran::scenario::CandidateRU ru;
    ru.pos = pos;
    ru.slice = slice;
    ru.coverage = 1.0;
    ru.ul_cap = cfg.ul_cap;
    ru.dl_cap = cfg.dl_cap;
    ru.fh_ul = cfg.fh_ul;
    ru.fh_dl = cfg.fh_dl;
    ru.mh_ul = cfg.mh_ul;
    ru.mh_dl = cfg.mh_dl;
    const auto g = oran::models::split_gops(cfg.gops_total, cfg.shares);
    ru.eta = g.ru;
    ru.du = g.du;
    ru.cu = g.cu;
    return ru;
}

/// Scenario holding only RUs (no UEs), urban slice table.
inline Scenario ru_only(const std::vector<oran::scenario::CandidateRU>& rus) {
    Scenario sc;
    sc.slices = oran::scenario::default_slices(oran::scenario::AreaClass::urban);
    sc.rus = rus;
    return sc;
}

inline std::vector<int> all_indices(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

struct P2Fixture {
    Scenario sc;
    oran::deploy::P2Model model;
};

/// Random deployment instance: RUs on a `side` km square with random slices,
/// the first `n_olt` RU sites as Stage-I candidates and `n_q` random Stage-II sites.
inline P2Fixture tiny_p2(std::uint64_t seed, int n_ru, int n_olt, int n_q, const oran::deploy::DeployConfig& cfg,
                         double side = 4.0) {
    oran::Rng rng(seed * 104729 + 7);
    std::vector<oran::scenario::CandidateRU> rus;
    for (int b = 0; b < n_ru; ++b)
        rus.push_back(plain_ru({rng.uniform(0, side), rng.uniform(0, side)}, static_cast<int>(rng.index(3))));
    P2Fixture f;
    f.sc = ru_only(rus);
    std::vector<oran::scenario::Point> olts, qs;
    for (int o = 0; o < n_olt; ++o) olts.push_back(rus[o].pos);
    for (int q = 0; q < n_q; ++q) qs.push_back({rng.uniform(0, side), rng.uniform(0, side)});
    f.model = oran::deploy::build_p2(f.sc, all_indices(n_ru), olts, qs, cfg);
    return f;
}

/// Server sizes drawn from a small menu so that some instances need several
/// OLTs, Stage-II sites or a mix of DU placements.
inline oran::deploy::DeployConfig random_tight_config(std::uint64_t seed) {
    oran::Rng rng(seed * 31337 + 1);
    oran::deploy::DeployConfig cfg;
    const double g_b[] = {2.5e4, 5e4, 1e5};
    const double g_o[] = {1.5e4, 3e4, 5e4, 1e5};
    const double g_q[] = {3e4, 5e4, 1e5};
    const double share[] = {0.5, 0.8, 1.0};
    cfg.ru_server_gops = g_b[rng.index(3)];
    cfg.olt_server_gops = g_o[rng.index(4)];
    cfg.stage2_server_gops = g_q[rng.index(3)];
    cfg.olt_du_share = share[rng.index(3)];
    return cfg;
}

}  // namespace testing_support
