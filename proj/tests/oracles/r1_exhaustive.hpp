#pragma once

// Brute-force minimum of the relaxed association objective over every 0/1
// point (x, theta) with x <= theta on eligible pairs.

#include <cstdint>
#include <limits>
#include <vector>

#include "oran/scenario.hpp"

namespace oracle {

inline double r1_exhaustive(const oran::scenario::Scenario& sc, const std::vector<double>& nu) {
    const int nu_n = static_cast<int>(sc.ues.size());
    const int nb = static_cast<int>(sc.rus.size());
    const double alpha = 1.0 / nb;
    const double beta = 1.0 / nu_n;
    std::vector<int> slice_count(3, 0);
    for (const auto& u : sc.ues) ++slice_count[u.slice];
    struct P {
        int u, b;
        double c;
    };
    std::vector<P> pairs;
    for (int u = 0; u < nu_n; ++u)
        for (int b = 0; b < nb; ++b) {
            const auto& ue = sc.ues[u];
            const auto& ru = sc.rus[b];
            const double d = oran::scenario::distance(ue.pos, ru.pos);
            if (ru.slice != ue.slice || d > ru.coverage) continue;
            const double us = slice_count[ue.slice];
            const double c = 2 * beta * d * 1000.0 / 3e8 + beta * us * ue.ul_demand * sc.tti / ru.ul_cap +
                             beta * us * ue.dl_demand * sc.tti / ru.dl_cap - nu[u];
            pairs.push_back({u, b, c});
        }
    const int n = static_cast<int>(pairs.size()) + nb;
    double best = std::numeric_limits<double>::infinity();
    double base = 0.0;
    for (double v : nu) base += v;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        double val = base;
        bool ok = true;
        for (int b = 0; b < nb; ++b)
            if (mask >> (pairs.size() + b) & 1) val += alpha;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            if (!(mask >> p & 1)) continue;
            if (!(mask >> (pairs.size() + pairs[p].b) & 1)) {
                ok = false;
                break;
            }
            val += pairs[p].c;
        }
        if (ok && val < best) best = val;
    }
    return best;
}

}  // namespace oracle
