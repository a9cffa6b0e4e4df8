#include "oran/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "oran/kernels.hpp"

namespace oran::lagrangian {

using assoc::kLatencyTol;

R1Solution solve_r1(const assoc::P1Model& m, std::span<const double> nu, const R1Options& opt) {
    R1Solution r;
    r.theta.assign(m.num_rus, 0);
    r.x.assign(m.pairs.size(), 0);
    std::vector<double> value(m.num_rus, 0.0);
    kernels::R1ScanInput in{&m, nu, opt.enforce_latency};
    if (opt.parallel)
        kernels::r1_scan_parallel(in, r.x, value);
    else
        kernels::r1_scan_serial(in, r.x, value);
    double lb = 0.0;
    for (int u = 0; u < m.num_ues; ++u) lb += nu[u];
    for (int b = 0; b < m.num_rus; ++b) {
        if (value[b] < 0) {
            r.theta[b] = 1;
            lb += value[b];
        }
    }
    r.lb = lb;
    r.ops = static_cast<std::int64_t>(m.pairs.size()) + m.num_rus;
    return r;
}

namespace {

// Per-RU attachment state used by the repair heuristic.
class RuState {
public:
    RuState(const assoc::P1Model& m, std::span<const std::uint8_t> theta)
        : m_(m), theta_(theta), members_(m.num_rus), ul_(m.num_rus, 0.0), dl_(m.num_rus, 0.0),
          prop_(m.num_rus, 0.0) {}

    bool open(int b) const { return theta_[b] != 0; }

    // Latency sum after adding pair p, or a negative value when a budget breaks.
    double try_add(int p) const {
        const auto& pr = m_.pairs[p];
        const int b = pr.ru;
        const double budget = m_.slice_budget[m_.ue_slice[pr.ue]];
        const double mp = std::max(prop_[b], pr.prop);
        if (mp + ul_[b] + pr.ul > budget + kLatencyTol || mp + dl_[b] + pr.dl > budget + kLatencyTol)
            return -1.0;
        return 2.0 * pr.prop + ul_[b] + pr.ul + dl_[b] + pr.dl;
    }

    // Same check with pair `out` (already on the RU) removed first.
    bool fits_without(int p, int out) const {
        const auto& pr = m_.pairs[p];
        const int b = pr.ru;
        const double budget = m_.slice_budget[m_.ue_slice[pr.ue]];
        double ul = pr.ul, dl = pr.dl, mp = pr.prop;
        for (int q : members_[b]) {
            if (q == out) continue;
            ul += m_.pairs[q].ul;
            dl += m_.pairs[q].dl;
            mp = std::max(mp, m_.pairs[q].prop);
        }
        return mp + ul <= budget + kLatencyTol && mp + dl <= budget + kLatencyTol;
    }

    void add(int p) {
        const auto& pr = m_.pairs[p];
        members_[pr.ru].push_back(p);
        rebuild(pr.ru);
    }

    void remove(int p) {
        auto& v = members_[m_.pairs[p].ru];
        v.erase(std::find(v.begin(), v.end(), p));
        rebuild(m_.pairs[p].ru);
    }

    const std::vector<int>& members(int b) const { return members_[b]; }

private:
    void rebuild(int b) {
        ul_[b] = dl_[b] = prop_[b] = 0.0;
        for (int q : members_[b]) {
            ul_[b] += m_.pairs[q].ul;
            dl_[b] += m_.pairs[q].dl;
            prop_[b] = std::max(prop_[b], m_.pairs[q].prop);
        }
    }

    const assoc::P1Model& m_;
    std::span<const std::uint8_t> theta_;
    std::vector<std::vector<int>> members_;
    std::vector<double> ul_, dl_, prop_;
};

}  // namespace

namespace {

RepairResult repair_in_order(const assoc::P1Model& m, std::span<const std::uint8_t> theta,
                             const std::vector<int>& order) {
    RepairResult r;
    r.assignment.attach.assign(m.num_ues, -1);
    RuState st(m, theta);
    std::vector<int> chosen(m.num_ues, -1);
    for (int u : order) {
        // Delta-w against the budget as the initial latency: largest gain = smallest latency.
        int best = -1;
        double best_t = 0.0;
        for (int p = m.ue_begin[u]; p < m.ue_begin[u + 1]; ++p) {
            if (!st.open(m.pairs[p].ru)) continue;
            const double t = st.try_add(p);
            if (t >= 0 && (best < 0 || t < best_t)) {
                best = p;
                best_t = t;
            }
        }
        if (best < 0) {
            // Make room by moving one attached UE to another open RU.
            for (int p = m.ue_begin[u]; p < m.ue_begin[u + 1] && best < 0; ++p) {
                const int b = m.pairs[p].ru;
                if (!st.open(b)) continue;
                const auto members = st.members(b);
                for (int q : members) {
                    if (!st.fits_without(p, q)) continue;
                    const int v = m.pairs[q].ue;
                    int alt = -1;
                    for (int p2 = m.ue_begin[v]; p2 < m.ue_begin[v + 1]; ++p2) {
                        if (m.pairs[p2].ru == b || !st.open(m.pairs[p2].ru)) continue;
                        if (st.try_add(p2) >= 0) {
                            alt = p2;
                            break;
                        }
                    }
                    if (alt < 0) continue;
                    st.remove(q);
                    st.add(alt);
                    chosen[v] = alt;
                    best = p;
                    break;
                }
            }
        }
        if (best < 0) {
            r.failed_ue = u;
            r.assignment.attach.assign(m.num_ues, -1);
            return r;
        }
        st.add(best);
        chosen[u] = best;
    }
    for (int u = 0; u < m.num_ues; ++u) r.assignment.attach[u] = m.pairs[chosen[u]].ru;
    assoc::finalize(m, r.assignment);
    r.feasible = true;
    return r;
}

}  // namespace

RepairResult repair_ub(const assoc::P1Model& m, std::span<const std::uint8_t> theta) {
    std::vector<int> order(m.num_ues);
    std::iota(order.begin(), order.end(), 0);
    const auto demand = [&](int u) { return m.ue_ul[u] + m.ue_dl[u]; };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return demand(a) > demand(b); });
    auto r = repair_in_order(m, theta, order);
    if (r.feasible) return r;
    // Second try: UEs with the fewest open RUs first.
    std::vector<int> choices(m.num_ues, 0);
    for (int u = 0; u < m.num_ues; ++u)
        for (int p = m.ue_begin[u]; p < m.ue_begin[u + 1]; ++p) choices[u] += theta[m.pairs[p].ru] != 0;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (choices[a] != choices[b]) return choices[a] < choices[b];
        return demand(a) > demand(b);
    });
    auto second = repair_in_order(m, theta, order);
    return second.feasible ? second : r;
}

RepairResult repair_search(const assoc::P1Model& m, std::span<const std::uint8_t> theta, std::int64_t node_limit) {
    RepairResult r;
    r.assignment.attach.assign(m.num_ues, -1);
    std::vector<int> choices(m.num_ues, 0);
    for (int u = 0; u < m.num_ues; ++u)
        for (int p = m.ue_begin[u]; p < m.ue_begin[u + 1]; ++p) choices[u] += theta[m.pairs[p].ru] != 0;
    std::vector<int> order(m.num_ues);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (choices[a] != choices[b]) return choices[a] < choices[b];
        return m.ue_ul[a] + m.ue_dl[a] > m.ue_ul[b] + m.ue_dl[b];
    });
    RuState st(m, theta);
    std::vector<int> chosen(m.num_ues, -1);
    std::int64_t nodes = 0;
    std::function<bool(std::size_t)> dfs = [&](std::size_t k) {
        if (k == order.size()) return true;
        if (++nodes > node_limit) return false;
        const int u = order[k];
        std::vector<std::pair<double, int>> cand;
        for (int p = m.ue_begin[u]; p < m.ue_begin[u + 1]; ++p) {
            if (!st.open(m.pairs[p].ru)) continue;
            const double t = st.try_add(p);
            if (t >= 0) cand.emplace_back(t, p);
        }
        std::sort(cand.begin(), cand.end());
        for (const auto& [t, p] : cand) {
            st.add(p);
            chosen[u] = p;
            if (dfs(k + 1)) return true;
            st.remove(p);
            chosen[u] = -1;
            if (nodes > node_limit) return false;
        }
        return false;
    };
    if (!dfs(0)) {
        r.failed_ue = order.empty() ? -1 : order.front();
        return r;
    }
    for (int u = 0; u < m.num_ues; ++u) r.assignment.attach[u] = m.pairs[chosen[u]].ru;
    assoc::finalize(m, r.assignment);
    r.feasible = true;
    return r;
}

int close_rus(const assoc::P1Model& m, assoc::Assignment& a) {
    std::vector<std::uint8_t> open(m.num_rus, 0);
    for (int b : a.installed) open[b] = 1;
    RuState st(m, open);
    std::vector<int> chosen(m.num_ues, -1);
    for (int u = 0; u < m.num_ues; ++u) {
        chosen[u] = m.pair_index(u, a.attach[u]);
        st.add(chosen[u]);
    }
    int closed = 0;
    for (bool progress = true; progress;) {
        progress = false;
        std::vector<int> order;
        for (int b = 0; b < m.num_rus; ++b)
            if (open[b]) order.push_back(b);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            return st.members(x).size() < st.members(y).size();
        });
        for (int b : order) {
            const std::vector<int> members = st.members(b);
            open[b] = 0;
            std::vector<std::pair<int, int>> moved;  // (old pair, new pair)
            bool ok = true;
            for (int q : members) {
                const int u = m.pairs[q].ue;
                int best = -1;
                double best_t = 0.0;
                for (int p = m.ue_begin[u]; p < m.ue_begin[u + 1]; ++p) {
                    if (!open[m.pairs[p].ru]) continue;
                    const double t = st.try_add(p);
                    if (t >= 0 && (best < 0 || t < best_t)) {
                        best = p;
                        best_t = t;
                    }
                }
                if (best < 0) {
                    ok = false;
                    break;
                }
                st.remove(q);
                st.add(best);
                moved.emplace_back(q, best);
            }
            if (ok) {
                assoc::Assignment trial = a;
                for (const auto& [from, to] : moved) trial.attach[m.pairs[from].ue] = m.pairs[to].ru;
                assoc::finalize(m, trial);
                if (trial.objective < a.objective) {
                    a = std::move(trial);
                    for (const auto& [from, to] : moved) chosen[m.pairs[from].ue] = to;
                    ++closed;
                    progress = true;
                    break;
                }
            }
            for (auto it = moved.rbegin(); it != moved.rend(); ++it) {
                st.remove(it->second);
                st.add(it->first);
            }
            open[b] = 1;
        }
    }
    return closed;
}

std::array<double, scenario::kSliceCount> subgradient_step(const assoc::P1Model& m, std::vector<double>& nu,
                                                          std::span<const std::uint8_t> x, double p_opt,
                                                          double p_lb, double lambda) {
    std::vector<double> g(m.num_ues, 1.0);
    for (int p = 0; p < static_cast<int>(m.pairs.size()); ++p)
        if (x[p]) g[m.pairs[p].ue] -= 1.0;
    std::array<double, scenario::kSliceCount> denom{};
    for (int u = 0; u < m.num_ues; ++u) denom[m.ue_slice[u]] += g[u] * g[u];
    std::array<double, scenario::kSliceCount> sigma{};
    for (int s = 0; s < scenario::kSliceCount; ++s)
        sigma[s] = denom[s] > 0 ? lambda * (p_opt - p_lb) / denom[s] : 0.0;
    for (int u = 0; u < m.num_ues; ++u) nu[u] += sigma[m.ue_slice[u]] * g[u];
    return sigma;
}

double trivial_upper_bound(const assoc::P1Model& m) {
    double lat = 0.0;
    for (int u = 0; u < m.num_ues; ++u) lat += 2.0 * m.slice_budget[m.ue_slice[u]];
    return m.alpha * m.num_rus + m.beta * lat;
}

double gap_bound(const GapTrace& trace, double R, double G) {
    double sum = 0.0;
    double sq = 0.0;
    for (const auto& it : trace.iters) {
        sum += it.step_term;
        sq += it.step_term * it.step_term;
    }
    if (!(sum > 0)) return std::numeric_limits<double>::infinity();
    return (R * R + sq) / ((2.0 / G) * sum);
}

Result run_algorithm1(const assoc::P1Model& m, const Config& cfg) {
    Result res;
    std::vector<double> nu(m.num_ues, 0.0);
    if (cfg.seed_incumbent) {
        std::vector<std::uint8_t> all(m.num_rus, 1);
        auto rep = repair_ub(m, all);
        if (!rep.feasible && cfg.search_nodes > 0) rep = repair_search(m, all, cfg.search_nodes);
        if (rep.feasible && cfg.close_pass) close_rus(m, rep.assignment);
        if (rep.feasible) {
            res.best_ub = rep.assignment.objective;
            res.assignment = std::move(rep.assignment);
            res.status = assoc::SolveStatus::feasible;
        }
    }
    const double fallback = trivial_upper_bound(m);
    double lambda = cfg.lambda0;
    int stall = 0;
    R1Options r1opt{cfg.enforce_latency, cfg.parallel};
    for (int n = 1; n <= cfg.n_max; ++n) {
        const R1Solution r1 = solve_r1(m, nu, r1opt);
        IterRecord rec;
        rec.n = n;
        rec.lb = r1.lb;
        if (!std::isfinite(res.best_lb) || r1.lb > res.best_lb + 1e-12 * std::max(1.0, std::abs(res.best_lb))) {
            res.best_lb = r1.lb;
            stall = 0;
        } else if (++stall >= cfg.halve_after) {
            lambda *= 0.5;
            stall = 0;
        }
        auto rep = repair_ub(m, r1.theta);
        if (rep.feasible && cfg.close_pass) close_rus(m, rep.assignment);
        if (rep.feasible) {
            rec.ub = rep.assignment.objective;
            if (rec.ub < res.best_ub) {
                res.best_ub = rec.ub;
                res.assignment = std::move(rep.assignment);
                res.status = assoc::SolveStatus::feasible;
            }
        }
        rec.best_lb = res.best_lb;
        rec.best_ub = res.best_ub;
        rec.lambda = lambda;
        const bool have_ub = std::isfinite(res.best_ub);
        if (have_ub && (res.best_ub - res.best_lb) / std::max(1.0, res.best_ub) <= cfg.tol) {
            res.trace.iters.push_back(rec);
            break;
        }
        const double p_opt = have_ub ? res.best_ub : fallback;
        rec.sigma = subgradient_step(m, nu, r1.x, p_opt, r1.lb, lambda);
        bool moved = false;
        for (double s : rec.sigma) moved = moved || s != 0.0;
        rec.step_term = moved ? lambda * (p_opt - r1.lb) : 0.0;
        res.trace.iters.push_back(rec);
    }
    int g = 0;
    for (int c : m.slice_ues) g = std::max(g, c);
    res.trace.gap_bound = gap_bound(res.trace, 1.0, std::max(1, g));
    return res;
}

}  // namespace oran::lagrangian
