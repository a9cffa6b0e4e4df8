#pragma once

// Full enumeration reference for the deployment problem. Geometry is rebuilt
// from the raw site positions and every constraint is evaluated literally.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "oran/deploy.hpp"

namespace oracle {

struct P2Candidate {
    std::vector<int> y;                       // OLT per RU
    std::vector<int> du;                      // 1 when the DU sits at the RU
    std::vector<int> z;                       // Stage-II OLT per Stage-I OLT, -1 none
    std::vector<std::array<int, 3>> cu;       // -1 local, else Stage-II index
};

struct P2Geometry {
    std::vector<std::vector<double>> d_b_o;   // RU -> OLT through that OLT's RN
    std::vector<double> d_rn_o;
    std::vector<std::vector<double>> d_b_rn;
    std::vector<std::vector<double>> d_o_q;
    std::vector<double> d_rn_q;
    std::vector<std::vector<double>> d_o_rn;
};

inline double dist(oran::scenario::Point a, oran::scenario::Point b) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline oran::scenario::Point mean_of(const std::vector<oran::scenario::Point>& pts, oran::scenario::Point fallback) {
    if (pts.empty()) return fallback;
    double x = 0, y = 0;
    for (auto p : pts) {
        x += p.x;
        y += p.y;
    }
    return {x / pts.size(), y / pts.size()};
}

inline P2Geometry geometry(const oran::deploy::P2Model& m, double reach1 = 20.0, double reach2 = 20.0) {
    P2Geometry g;
    const int B = m.num_rus, O = m.num_olts, Q = m.num_q;
    g.d_b_o.assign(B, std::vector<double>(O));
    g.d_b_rn.assign(B, std::vector<double>(O));
    for (int o = 0; o < O; ++o) {
        std::vector<oran::scenario::Point> near;
        for (auto p : m.ru_pos)
            if (dist(p, m.olt_pos[o]) <= reach1) near.push_back(p);
        const auto rn = mean_of(near, m.olt_pos[o]);
        g.d_rn_o.push_back(dist(rn, m.olt_pos[o]));
        for (int b = 0; b < B; ++b) {
            g.d_b_rn[b][o] = dist(m.ru_pos[b], rn);
            g.d_b_o[b][o] = g.d_b_rn[b][o] + g.d_rn_o[o];
        }
    }
    g.d_o_q.assign(O, std::vector<double>(Q));
    g.d_o_rn.assign(O, std::vector<double>(Q));
    for (int q = 0; q < Q; ++q) {
        std::vector<oran::scenario::Point> near;
        for (auto p : m.olt_pos)
            if (dist(p, m.q_pos[q]) <= reach2) near.push_back(p);
        const auto rn = mean_of(near, m.q_pos[q]);
        g.d_rn_q.push_back(dist(rn, m.q_pos[q]));
        for (int o = 0; o < O; ++o) {
            g.d_o_rn[o][q] = dist(m.olt_pos[o], rn);
            g.d_o_q[o][q] = g.d_o_rn[o][q] + g.d_rn_q[q];
        }
    }
    return g;
}

inline double part(double load, double cap) {
    if (load <= 0) return 0.0;
    if (cap <= 0) return std::numeric_limits<double>::infinity();
    return load / cap;
}

inline bool p2_feasible_literal(const oran::deploy::P2Model& m, const P2Geometry& g, const P2Candidate& c) {
    const int B = m.num_rus, O = m.num_olts;
    const double v_fiber = 2e8;
    for (int b = 0; b < B; ++b)
        if (g.d_b_o[b][c.y[b]] > 20.0) return false;
    if (m.splitter_cap > 0) {
        std::vector<int> n(O, 0);
        for (int b = 0; b < B; ++b) ++n[c.y[b]];
        for (int k : n)
            if (k > m.splitter_cap) return false;
        std::vector<int> nq(m.num_q, 0);
        for (int o = 0; o < O; ++o)
            if (c.z[o] >= 0) ++nq[c.z[o]];
        for (int k : nq)
            if (k > m.splitter_cap) return false;
    }
    auto cu_of = [&](int k) { return c.cu[c.y[k]][m.ru_slice[k]]; };
    for (int d = 0; d < 2; ++d) {
        for (int b = 0; b < B; ++b) {
            const int o = c.y[b];
            const int s = m.ru_slice[b];
            double load = 0, du_sum = 0, cu_local = 0, cu_q = 0;
            for (int k = 0; k < B; ++k) {
                if (c.y[k] == o) {
                    load += c.du[k] ? m.U[k][d] : m.V[k][d];
                    if (!c.du[k]) du_sum += m.du[k];
                    if (cu_of(k) == -1) cu_local += m.cu[k];
                }
                if (cu_of(b) >= 0 && cu_of(k) == cu_of(b)) cu_q += m.cu[k];
            }
            const double lat = (d == 0 ? m.wait1 : 0.0) + g.d_b_o[b][o] * 1000.0 / v_fiber + load * m.tti / m.R1;
            const double bound = c.du[b] ? m.mh_budget[s] : m.fh_budget[s];
            if (lat > bound + 1e-12) return false;
            double r = part(m.eta[b], m.H);
            r += c.du[b] ? part(m.du[b], m.GD_b) : part(du_sum, m.GD_o);
            r += cu_of(b) == -1 ? part(cu_local, m.GC_o) : part(cu_q, m.GC_q);
            if (r > m.bbu_budget[s] / m.tti * (1 + 1e-12)) return false;
        }
        for (int o = 0; o < O; ++o) {
            const int q = c.z[o];
            if (q < 0) continue;
            double bound = std::numeric_limits<double>::infinity();
            for (int b = 0; b < B; ++b)
                if (c.y[b] == o && c.cu[o][m.ru_slice[b]] == q) bound = std::min(bound, m.mh_budget[m.ru_slice[b]]);
            double load = 0;
            for (int k = 0; k < B; ++k)
                if (cu_of(k) == q) load += m.U[k][d];
            const double lat = (d == 0 ? m.wait2 : 0.0) + g.d_o_q[o][q] * 1000.0 / v_fiber + load * m.tti / m.R2;
            if (lat > bound + 1e-12) return false;
        }
    }
    return true;
}

/// Cost in euros, summed term by term from the objective.
inline double p2_cost_literal(const oran::deploy::P2Model& m, const P2Geometry& g, const P2Candidate& c) {
    const auto& pb = m.prices;
    const double cf = pb.fiber_material_per_km + pb.fiber_install_per_km;
    const int B = m.num_rus, O = m.num_olts, Q = m.num_q;
    double total = 0;
    for (int o = 0; o < O; ++o) {
        double rho = 0;
        bool on = false;
        for (int b = 0; b < B; ++b)
            if (c.y[b] == o) {
                on = true;
                rho += g.d_b_rn[b][o];
            }
        if (!on) continue;
        rho += g.d_rn_o[o];
        total += pb.olt + pb.splitter + cf * rho + pb.server_install + pb.per_gops * m.G_o;
        if (c.z[o] >= 0) total += pb.onu * pb.stage2_onu_factor;
    }
    for (int q = 0; q < Q; ++q) {
        double rho = 0;
        bool on = false;
        for (int o = 0; o < O; ++o)
            if (c.z[o] == q) {
                on = true;
                rho += g.d_o_rn[o][q];
            }
        if (!on) continue;
        rho += g.d_rn_q[q];
        total += pb.olt * pb.stage2_olt_factor + pb.splitter + cf * rho + pb.server_install + pb.per_gops * m.G_q;
    }
    for (int b = 0; b < B; ++b) {
        total += pb.onu;
        if (c.du[b]) total += pb.server_install + pb.per_gops * m.G_b;
    }
    return total;
}

struct P2Optimum {
    bool feasible = false;
    double cost = std::numeric_limits<double>::infinity();
    P2Candidate best;
    long evaluated = 0;
};

inline P2Optimum p2_enumerate(const oran::deploy::P2Model& m) {
    const auto g = geometry(m);
    const int B = m.num_rus, O = m.num_olts, Q = m.num_q;
    P2Optimum out;
    P2Candidate c;
    c.y.assign(B, 0);
    c.du.assign(B, 0);
    c.z.assign(O, -1);
    c.cu.assign(O, {-1, -1, -1});

    std::function<void(int)> stage2 = [&](int o) {
        if (o == O) {
            ++out.evaluated;
            if (!p2_feasible_literal(m, g, c)) return;
            const double cost = p2_cost_literal(m, g, c);
            if (cost < out.cost - 1e-6) {
                out.cost = cost;
                out.best = c;
                out.feasible = true;
            }
            return;
        }
        bool used = false;
        std::array<bool, 3> present{};
        for (int b = 0; b < B; ++b)
            if (c.y[b] == o) {
                used = true;
                present[m.ru_slice[b]] = true;
            }
        c.z[o] = -1;
        c.cu[o] = {-1, -1, -1};
        stage2(o + 1);
        if (!used || !m.allow_stage2) return;
        for (int q = 0; q < Q; ++q) {
            if (g.d_o_q[o][q] > 20.0) continue;
            c.z[o] = q;
            for (int mask = 1; mask < 8; ++mask) {
                bool valid = true;
                for (int s = 0; s < 3; ++s) {
                    const bool to_q = (mask >> s) & 1;
                    if (to_q && !present[s]) valid = false;
                    c.cu[o][s] = to_q ? q : -1;
                }
                if (valid) stage2(o + 1);
            }
        }
        c.z[o] = -1;
        c.cu[o] = {-1, -1, -1};
    };
    std::function<void(int)> stage1 = [&](int b) {
        if (b == B) {
            stage2(0);
            return;
        }
        for (int o = 0; o < O; ++o) {
            c.y[b] = o;
            for (int du = 0; du < 2; ++du) {
                c.du[b] = du;
                stage1(b + 1);
            }
        }
    };
    stage1(0);
    return out;
}

/// Oracle view of a plan from the library.
inline P2Candidate from_plan(const oran::deploy::P2Model& m, const oran::deploy::DeploymentPlan& p) {
    P2Candidate c;
    c.y = p.olt_of_ru;
    c.du.assign(p.du_at_ru.begin(), p.du_at_ru.end());
    c.z = p.q_of_olt;
    c.cu.assign(m.num_olts, {-1, -1, -1});
    for (int o = 0; o < m.num_olts; ++o)
        for (int s = 0; s < 3; ++s) c.cu[o][s] = p.cu[o][s];
    return c;
}

}  // namespace oracle
