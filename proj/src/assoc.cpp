#include "oran/assoc.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "oran/errors.hpp"
#include "oran/kernels.hpp"
#include "oran/lp.hpp"

namespace oran::assoc {

int P1Model::pair_index(int u, int b) const {
    if (u < 0 || u >= num_ues) return -1;
    for (int p = ue_begin[u]; p < ue_begin[u + 1]; ++p)
        if (pairs[p].ru == b) return p;
    return -1;
}

P1Model build_p1(const scenario::Scenario& sc, const BuildOptions& opt) {
    if (!(opt.air_speed > 0)) throw ParameterError("air_speed", "must be positive");
    P1Model m;
    m.num_ues = static_cast<int>(sc.ues.size());
    m.num_rus = static_cast<int>(sc.rus.size());
    if (m.num_ues == 0 || m.num_rus == 0) throw ParameterError("scenario", "needs UEs and RUs");
    m.alpha = 1.0 / m.num_rus;
    m.beta = 1.0 / m.num_ues;
    m.tti = sc.tti;
    m.slice_budget.resize(scenario::kSliceCount);
    m.slice_ues.assign(scenario::kSliceCount, 0);
    for (int s = 0; s < scenario::kSliceCount; ++s) m.slice_budget[s] = sc.slices[s].ota_budget;
    for (const auto& ue : sc.ues) {
        m.ue_slice.push_back(ue.slice);
        m.ue_ul.push_back(ue.ul_demand);
        m.ue_dl.push_back(ue.dl_demand);
        ++m.slice_ues[ue.slice];
    }
    for (const auto& ru : sc.rus) {
        m.ru_slice.push_back(ru.slice);
        m.ru_ul_cap.push_back(ru.ul_cap);
        m.ru_dl_cap.push_back(ru.dl_cap);
    }
    const auto lists = opt.parallel ? kernels::eligible_pairs_parallel(sc, opt.air_speed)
                                    : kernels::eligible_pairs_serial(sc, opt.air_speed);
    m.ue_begin.assign(m.num_ues + 1, 0);
    for (int u = 0; u < m.num_ues; ++u) {
        if (lists[u].empty()) {
            std::ostringstream os;
            os << "UE " << u << " (" << scenario::to_string(static_cast<scenario::SliceId>(sc.ues[u].slice))
               << ") has no covering RU";
            throw InfeasibleError("assoc", os.str());
        }
        m.ue_begin[u + 1] = m.ue_begin[u] + static_cast<int>(lists[u].size());
    }
    m.pairs.reserve(m.ue_begin.back());
    for (int u = 0; u < m.num_ues; ++u) {
        const double us = m.slice_ues[m.ue_slice[u]];
        for (auto p : lists[u]) {
            p.c0 = 2.0 * p.prop + us * (p.ul + p.dl);
            m.pairs.push_back(p);
        }
    }
    m.ru_begin.assign(m.num_rus + 1, 0);
    for (const auto& p : m.pairs) ++m.ru_begin[p.ru + 1];
    for (int b = 0; b < m.num_rus; ++b) m.ru_begin[b + 1] += m.ru_begin[b];
    m.ru_pairs.assign(m.pairs.size(), 0);
    std::vector<int> fill(m.ru_begin.begin(), m.ru_begin.end() - 1);
    for (int p = 0; p < static_cast<int>(m.pairs.size()); ++p) m.ru_pairs[fill[m.pairs[p].ru]++] = p;
    return m;
}

P1Variables to_variables(const P1Model& m, const Assignment& a) {
    P1Variables v;
    v.theta.assign(m.num_rus, 0);
    for (int b : a.installed) v.theta[b] = 1;
    for (int u = 0; u < static_cast<int>(a.attach.size()); ++u)
        if (a.attach[u] >= 0) v.x.emplace_back(u, a.attach[u]);
    return v;
}

namespace {

struct RuLoad {
    std::vector<double> ul;
    std::vector<double> dl;
    std::vector<double> max_prop;
};

RuLoad loads(const P1Model& m, const std::vector<std::pair<int, int>>& x) {
    RuLoad l;
    l.ul.assign(m.num_rus, 0.0);
    l.dl.assign(m.num_rus, 0.0);
    l.max_prop.assign(m.num_rus, 0.0);
    for (const auto& [u, b] : x) {
        if (u < 0 || u >= m.num_ues || b < 0 || b >= m.num_rus) continue;
        l.ul[b] += m.ue_ul[u] * m.tti / m.ru_ul_cap[b];
        l.dl[b] += m.ue_dl[u] * m.tti / m.ru_dl_cap[b];
        const int p = m.pair_index(u, b);
        if (p >= 0) l.max_prop[b] = std::max(l.max_prop[b], m.pairs[p].prop);
    }
    return l;
}

}  // namespace

OtaLatency ota_latency(const P1Model& m, const Assignment& a, int u, int b) {
    double ul = 0.0;
    double dl = 0.0;
    for (int v = 0; v < static_cast<int>(a.attach.size()); ++v) {
        if (a.attach[v] != b) continue;
        ul += m.ue_ul[v] * m.tti / m.ru_ul_cap[b];
        dl += m.ue_dl[v] * m.tti / m.ru_dl_cap[b];
    }
    const int p = m.pair_index(u, b);
    const double prop = (p >= 0 && a.attach[u] == b) ? m.pairs[p].prop : 0.0;
    return {prop + ul, prop + dl};
}

double objective(const P1Model& m, const P1Variables& v) {
    double installed = 0.0;
    for (auto t : v.theta) installed += t;
    const RuLoad l = loads(m, v.x);
    double prop = 0.0;
    for (const auto& [u, b] : v.x) {
        const int p = m.pair_index(u, b);
        if (p >= 0) prop += 2.0 * m.pairs[p].prop;
    }
    double load = 0.0;
    for (int b = 0; b < m.num_rus; ++b) load += m.slice_ues[m.ru_slice[b]] * (l.ul[b] + l.dl[b]);
    return m.alpha * installed + m.beta * (prop + load);
}

double objective(const P1Model& m, const Assignment& a) {
    double sum = 0.0;
    for (int u = 0; u < static_cast<int>(a.attach.size()); ++u) {
        if (a.attach[u] < 0) continue;
        const int p = m.pair_index(u, a.attach[u]);
        if (p >= 0) sum += m.pairs[p].c0;
    }
    return m.alpha * static_cast<double>(a.installed.size()) + m.beta * sum;
}

void finalize(const P1Model& m, Assignment& a) {
    std::vector<char> used(m.num_rus, 0);
    for (int b : a.attach)
        if (b >= 0) used[b] = 1;
    a.installed.clear();
    for (int b = 0; b < m.num_rus; ++b)
        if (used[b]) a.installed.push_back(b);
    a.objective = objective(m, a);
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible: return "feasible";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unknown: return "unknown";
    }
    return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

// Depth-first branch-and-bound over the UEs of one slice.
class SliceSearch {
public:
    SliceSearch(const P1Model& m, int slice, const ExactLimits& lim, Clock::time_point start,
                std::int64_t& nodes)
        : m_(m), lim_(lim), start_(start), nodes_(nodes) {
        for (int b = 0; b < m.num_rus; ++b)
            if (m.ru_slice[b] == slice) rus_.push_back(b);
        if (rus_.size() > 64) throw ParameterError("solve_exact", "more than 64 RUs in one slice");
        std::vector<int> local(m.num_rus, -1);
        for (int i = 0; i < static_cast<int>(rus_.size()); ++i) local[rus_[i]] = i;
        for (int u = 0; u < m.num_ues; ++u)
            if (m.ue_slice[u] == slice) ues_.push_back(u);
        auto load = [&](int u) {
            double w = 0.0;
            for (int p = m.ue_begin[u]; p < m.ue_begin[u + 1]; ++p)
                w = std::max(w, m.pairs[p].ul + m.pairs[p].dl);
            return w;
        };
        auto degree = [&](int u) { return m.ue_begin[u + 1] - m.ue_begin[u]; };
        std::stable_sort(ues_.begin(), ues_.end(), [&](int a, int b) {
            const double la = load(a), lb = load(b);
            if (la != lb) return la > lb;
            return degree(a) < degree(b);
        });
        const int n = static_cast<int>(ues_.size());
        elig_.assign(n, 0);
        suffix_.assign(n + 1, 0.0);
        for (int i = 0; i < n; ++i) {
            const int u = ues_[i];
            for (int p = m.ue_begin[u]; p < m.ue_begin[u + 1]; ++p)
                elig_[i] |= std::uint64_t{1} << local[m.pairs[p].ru];
        }
        for (int i = n - 1; i >= 0; --i) {
            double best = std::numeric_limits<double>::infinity();
            const int u = ues_[i];
            for (int p = m.ue_begin[u]; p < m.ue_begin[u + 1]; ++p) best = std::min(best, m.pairs[p].c0);
            suffix_[i] = suffix_[i + 1] + m.beta * best;
        }
        local_ = std::move(local);
        const int nb = static_cast<int>(rus_.size());
        ul_.assign(nb, 0.0);
        dl_.assign(nb, 0.0);
        prop_.assign(nb, 0.0);
        count_.assign(nb, 0);
        choice_.assign(n, -1);
        budget_ = m.slice_budget[slice];
    }

    void run() {
        if (ues_.empty()) {
            found_ = true;
            return;
        }
        dfs(0, 0, 0.0);
    }

    bool found() const { return found_; }
    bool aborted() const { return aborted_; }
    double best_cost() const { return best_; }
    void write(Assignment& a) const {
        for (int i = 0; i < static_cast<int>(ues_.size()); ++i) a.attach[ues_[i]] = best_choice_[i];
    }

private:
    const P1Model& m_;
    const ExactLimits& lim_;
    Clock::time_point start_;
    std::int64_t& nodes_;
    std::vector<int> rus_;
    std::vector<int> local_;
    std::vector<int> ues_;
    std::vector<std::uint64_t> elig_;
    std::vector<double> suffix_;
    std::vector<double> ul_, dl_, prop_;
    std::vector<int> count_;
    std::vector<int> choice_;
    double budget_ = 0.0;
    bool found_ = false;
    bool aborted_ = false;
    double best_ = std::numeric_limits<double>::infinity();
    std::uint64_t best_mask_ = 0;
    std::vector<int> best_choice_;

    static bool lex_less(std::uint64_t a, std::uint64_t b) {
        // Sorted index lists compared lexicographically.
        while (a && b) {
            const int ia = std::countr_zero(a);
            const int ib = std::countr_zero(b);
            if (ia != ib) return ia < ib;
            a &= a - 1;
            b &= b - 1;
        }
        return !a && b;
    }

    int new_ru_bound(int depth, std::uint64_t open) const {
        std::uint64_t used = 0;
        int count = 0;
        for (int i = depth; i < static_cast<int>(ues_.size()); ++i) {
            const std::uint64_t e = elig_[i];
            if ((e & open) == 0 && (e & used) == 0) {
                ++count;
                used |= e;
            }
        }
        return count;
    }

    bool out_of_budget() {
        if (nodes_ >= lim_.max_nodes) return true;
        if ((nodes_ & 4095) == 0) {
            const double el = std::chrono::duration<double>(Clock::now() - start_).count();
            if (el > lim_.time_limit_s) return true;
        }
        return false;
    }

    void dfs(int depth, std::uint64_t open, double cost) {
        if (aborted_) return;
        ++nodes_;
        if (out_of_budget()) {
            aborted_ = true;
            return;
        }
        const double tol = found_ ? 1e-12 * std::max(1.0, std::abs(best_)) : 0.0;
        const int n = static_cast<int>(ues_.size());
        if (depth == n) {
            if (!found_ || cost < best_ - tol || (cost <= best_ + tol && lex_less(open, best_mask_))) {
                best_ = cost;
                best_mask_ = open;
                best_choice_ = choice_;
                found_ = true;
            }
            return;
        }
        const double bound = cost + suffix_[depth] + m_.alpha * new_ru_bound(depth, open);
        if (bound > best_ + tol) return;
        const int u = ues_[depth];
        for (int p = m_.ue_begin[u]; p < m_.ue_begin[u + 1]; ++p) {
            const Pair& pr = m_.pairs[p];
            const int j = local_[pr.ru];
            const double mp = std::max(prop_[j], pr.prop);
            if (mp + ul_[j] + pr.ul > budget_ + kLatencyTol) continue;
            if (mp + dl_[j] + pr.dl > budget_ + kLatencyTol) continue;
            const std::uint64_t bit = std::uint64_t{1} << j;
            const bool opens = (open & bit) == 0;
            const double c = cost + m_.beta * pr.c0 + (opens ? m_.alpha : 0.0);
            const double saved = prop_[j];
            prop_[j] = mp;
            ul_[j] += pr.ul;
            dl_[j] += pr.dl;
            choice_[depth] = pr.ru;
            dfs(depth + 1, open | bit, c);
            ul_[j] -= pr.ul;
            dl_[j] -= pr.dl;
            if (opens) ul_[j] = dl_[j] = 0.0;  // drop rounding residue
            prop_[j] = saved;
            if (aborted_) return;
        }
    }
};

}  // namespace

ExactResult solve_exact(const P1Model& m, const ExactLimits& limits) {
    ExactResult r;
    const auto start = Clock::now();
    r.assignment.attach.assign(m.num_ues, -1);
    bool all_proven = true;
    bool any_infeasible = false;
    bool any_missing = false;
    for (int s = 0; s < scenario::kSliceCount; ++s) {
        SliceSearch search(m, s, limits, start, r.nodes);
        search.run();
        if (search.found()) search.write(r.assignment);
        if (search.aborted()) {
            all_proven = false;
            if (!search.found()) any_missing = true;
        } else if (!search.found()) {
            any_infeasible = true;
        }
    }
    if (any_infeasible) {
        r.status = SolveStatus::infeasible;
        r.proven_optimal = false;
        r.assignment.attach.assign(m.num_ues, -1);
        r.assignment.installed.clear();
        r.assignment.objective = std::numeric_limits<double>::infinity();
        return r;
    }
    if (any_missing) {
        r.status = SolveStatus::unknown;
        r.assignment.objective = std::numeric_limits<double>::infinity();
        return r;
    }
    finalize(m, r.assignment);
    r.proven_optimal = all_proven;
    r.status = all_proven ? SolveStatus::optimal : SolveStatus::feasible;
    return r;
}

LpBound lp_lower_bound(const P1Model& m) {
    LpBound out;
    out.solved = true;
    for (int s = 0; s < scenario::kSliceCount; ++s) {
        lp::Problem pb;
        std::vector<int> theta(m.num_rus, -1);
        for (int b = 0; b < m.num_rus; ++b)
            if (m.ru_slice[b] == s) theta[b] = pb.add_var(m.alpha);
        std::vector<int> xv(m.pairs.size(), -1);
        bool any = false;
        for (int u = 0; u < m.num_ues; ++u) {
            if (m.ue_slice[u] != s) continue;
            any = true;
            lp::Row one;
            one.sense = lp::Sense::eq;
            one.rhs = 1.0;
            for (int p = m.ue_begin[u]; p < m.ue_begin[u + 1]; ++p) {
                xv[p] = pb.add_var(m.beta * m.pairs[p].c0);
                one.coef.emplace_back(xv[p], 1.0);
            }
            pb.rows.push_back(std::move(one));
        }
        if (!any) continue;
        const double budget = m.slice_budget[s];
        for (int b = 0; b < m.num_rus; ++b) {
            if (theta[b] < 0) continue;
            pb.rows.push_back({{{theta[b], 1.0}}, lp::Sense::le, 1.0});
            for (int k = m.ru_begin[b]; k < m.ru_begin[b + 1]; ++k) {
                const int p = m.ru_pairs[k];
                pb.rows.push_back({{{xv[p], 1.0}, {theta[b], -1.0}}, lp::Sense::le, 0.0});
            }
            for (int k = m.ru_begin[b]; k < m.ru_begin[b + 1]; ++k) {
                const int p = m.ru_pairs[k];
                lp::Row ul{{}, lp::Sense::le, budget};
                lp::Row dl{{}, lp::Sense::le, budget};
                for (int k2 = m.ru_begin[b]; k2 < m.ru_begin[b + 1]; ++k2) {
                    const int q = m.ru_pairs[k2];
                    const double extra = (q == p) ? m.pairs[p].prop : 0.0;
                    ul.coef.emplace_back(xv[q], m.pairs[q].ul + extra);
                    dl.coef.emplace_back(xv[q], m.pairs[q].dl + extra);
                }
                pb.rows.push_back(std::move(ul));
                pb.rows.push_back(std::move(dl));
            }
        }
        const auto sol = lp::solve(pb);
        if (sol.status != lp::Status::optimal) {
            out.solved = false;
            out.objective = std::numeric_limits<double>::infinity();
            return out;
        }
        out.objective += sol.objective;
        for (int b = 0; b < m.num_rus; ++b)
            if (theta[b] >= 0) out.installed += sol.x[theta[b]];
    }
    return out;
}

std::vector<Violation> check_feasible(const P1Model& m, const P1Variables& v) {
    std::vector<Violation> out;
    std::vector<int> count(m.num_ues, 0);
    for (const auto& [u, b] : v.x) {
        if (u < 0 || u >= m.num_ues || b < 0 || b >= m.num_rus) {
            out.push_back({"coverage", {u, b}, -1.0, "index out of range"});
            continue;
        }
        ++count[u];
        if (m.pair_index(u, b) < 0)
            out.push_back({"coverage", {u, b}, -1.0, "RU does not cover UE or serves another slice"});
        if (b >= static_cast<int>(v.theta.size()) || !v.theta[b])
            out.push_back({"installation", {u, b}, -1.0, "attached to an RU that is not installed"});
    }
    for (int u = 0; u < m.num_ues; ++u) {
        if (count[u] != 1) {
            std::ostringstream os;
            os << "UE attached to " << count[u] << " RUs";
            out.push_back({"single_association", {u}, -std::abs(count[u] - 1.0), os.str()});
        }
    }
    const RuLoad l = loads(m, v.x);
    for (const auto& [u, b] : v.x) {
        if (u < 0 || u >= m.num_ues || b < 0 || b >= m.num_rus) continue;
        const int p = m.pair_index(u, b);
        const double prop = p >= 0 ? m.pairs[p].prop : 0.0;
        const double budget = m.slice_budget[m.ue_slice[u]];
        const double tu = prop + l.ul[b];
        const double td = prop + l.dl[b];
        if (tu > budget + kLatencyTol)
            out.push_back({"ota_uplink", {u, b}, budget - tu, "uplink OTA latency over budget"});
        if (td > budget + kLatencyTol)
            out.push_back({"ota_downlink", {u, b}, budget - td, "downlink OTA latency over budget"});
    }
    return out;
}

std::vector<Violation> check_feasible(const P1Model& m, const Assignment& a) {
    return check_feasible(m, to_variables(m, a));
}

}  // namespace oran::assoc
