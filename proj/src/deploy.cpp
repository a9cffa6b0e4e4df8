#include "oran/deploy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "oran/cost.hpp"
#include "oran/errors.hpp"

namespace oran::deploy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kCuPending = -3;  // CU not yet placed; contributes no load
constexpr int kCuReserve = -4;  // CU not yet placed; reserves Stage-II server capacity
constexpr int kCuMixed = -5;    // greedy pass id: local or reserved, chosen per slice
constexpr double kRatioTol = 1e-12;

double ratio(double load, double cap) {
    if (load <= 0.0) return 0.0;
    if (cap <= 0.0) return kInf;
    return load / cap;
}

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(field, "must be positive");
}

// Plan plus running aggregates, so that feasibility checks cost O(members).
class Engine {
public:
    explicit Engine(const P2Model& m) : m_(m) { reset(kCuLocal); }

    Engine(const P2Model& m, const DeploymentPlan& p) : m_(m) {
        reset(kCuLocal);
        for (int o = 0; o < m_.num_olts && o < static_cast<int>(p.cu.size()); ++o) plan_.cu[o] = p.cu[o];
        for (int o = 0; o < m_.num_olts && o < static_cast<int>(p.q_of_olt.size()); ++o)
            if (p.q_of_olt[o] >= 0) attach(o, p.q_of_olt[o]);
        for (int b = 0; b < m_.num_rus && b < static_cast<int>(p.olt_of_ru.size()); ++b)
            if (p.olt_of_ru[b] >= 0) add(b, p.olt_of_ru[b], b < static_cast<int>(p.du_at_ru.size()) && p.du_at_ru[b]);
        plan_.olt_on = p.olt_on;
        plan_.q_on = p.q_on;
        plan_.olt_on.resize(m_.num_olts, 0);
        plan_.q_on.resize(m_.num_q, 0);
    }

    void reset(int cu_init) {
        plan_ = empty_plan(m_);
        for (auto& c : plan_.cu) c.fill(cu_init);
        members_.assign(m_.num_olts, {});
        cnt_.assign(m_.num_olts, {});
        load1_.assign(m_.num_olts, {0.0, 0.0});
        du_o_.assign(m_.num_olts, 0.0);
        cu_loc_.assign(m_.num_olts, 0.0);
        cu_res_.assign(m_.num_olts, 0.0);
        load2_.assign(m_.num_q, {0.0, 0.0});
        cu_q_.assign(m_.num_q, 0.0);
        qlist_.assign(m_.num_q, {});
    }

    const DeploymentPlan& plan() const { return plan_; }
    DeploymentPlan& plan() { return plan_; }
    const std::vector<int>& members(int o) const { return members_[o]; }
    int count(int o, int s) const { return cnt_[o][s]; }
    const std::vector<int>& attached(int q) const { return qlist_[q]; }

    void add(int b, int o, bool du_at_ru) {
        plan_.olt_of_ru[b] = o;
        plan_.du_at_ru[b] = du_at_ru ? 1 : 0;
        plan_.olt_on[o] = 1;
        members_[o].push_back(b);
        const int s = m_.ru_slice[b];
        ++cnt_[o][s];
        for (int d = 0; d < 2; ++d) load1_[o][d] += du_at_ru ? m_.U[b][d] : m_.V[b][d];
        if (!du_at_ru) du_o_[o] += m_.du[b];
        cu_contrib(b, o, plan_.cu[o][s], +1.0);
    }

    void remove(int b) {
        const int o = plan_.olt_of_ru[b];
        const int s = m_.ru_slice[b];
        const bool du_at_ru = plan_.du_at_ru[b];
        cu_contrib(b, o, plan_.cu[o][s], -1.0);
        if (!du_at_ru) du_o_[o] -= m_.du[b];
        for (int d = 0; d < 2; ++d) load1_[o][d] -= du_at_ru ? m_.U[b][d] : m_.V[b][d];
        --cnt_[o][s];
        auto& mem = members_[o];
        mem.erase(std::find(mem.begin(), mem.end(), b));
        if (mem.empty()) {
            plan_.olt_on[o] = 0;
            load1_[o] = {0.0, 0.0};
            du_o_[o] = 0.0;
            cu_loc_[o] = 0.0;
            cu_res_[o] = 0.0;
        }
        plan_.olt_of_ru[b] = -1;
        plan_.du_at_ru[b] = 0;
    }

    void set_cu(int o, int s, int target) {
        const int old = plan_.cu[o][s];
        if (old == target) return;
        for (int b : members_[o]) {
            if (m_.ru_slice[b] != s) continue;
            cu_contrib(b, o, old, -1.0);
            cu_contrib(b, o, target, +1.0);
        }
        plan_.cu[o][s] = target;
    }

    void attach(int o, int q) {
        plan_.q_of_olt[o] = q;
        qlist_[q].push_back(o);
        plan_.q_on[q] = 1;
    }

    void detach(int o) {
        const int q = plan_.q_of_olt[o];
        auto& l = qlist_[q];
        l.erase(std::find(l.begin(), l.end(), o));
        if (l.empty()) {
            plan_.q_on[q] = 0;
            load2_[q] = {0.0, 0.0};
            cu_q_[q] = 0.0;
        }
        plan_.q_of_olt[o] = -1;
    }

    double lat1(int b, int d) const {
        const int o = plan_.olt_of_ru[b];
        return (d == 0 ? m_.wait1 : 0.0) + models::fiber_delay(m_.d_ru_olt(b, o)) + load1_[o][d] * m_.tti / m_.R1;
    }

    double bound1(int b) const {
        const int s = m_.ru_slice[b];
        return plan_.du_at_ru[b] ? m_.mh_budget[s] : m_.fh_budget[s];
    }

    double lat2(int o, int d) const {
        const int q = plan_.q_of_olt[o];
        return (d == 0 ? m_.wait2 : 0.0) + models::fiber_delay(m_.d_olt_q(o, q)) + load2_[q][d] * m_.tti / m_.R2;
    }

    double bound2(int o) const {
        const int q = plan_.q_of_olt[o];
        double bound = kInf;
        for (int s = 0; s < kSlices; ++s)
            if (cnt_[o][s] > 0 && plan_.cu[o][s] == q) bound = std::min(bound, m_.mh_budget[s]);
        return bound;
    }

    double proc(int b, int) const {
        const int o = plan_.olt_of_ru[b];
        const int s = m_.ru_slice[b];
        double r = ratio(m_.eta[b], m_.H);
        r += plan_.du_at_ru[b] ? ratio(m_.du[b], m_.GD_b) : ratio(du_o_[o], m_.GD_o);
        const int c = plan_.cu[o][s];
        if (c == kCuLocal) r += ratio(cu_loc_[o], m_.GC_o);
        else if (c == kCuReserve) r += ratio(cu_res_[o], m_.GC_q);
        else if (c >= 0) r += ratio(cu_q_[c], m_.GC_q);
        return r;
    }

    double proc_bound(int b) const { return m_.bbu_budget[m_.ru_slice[b]] / m_.tti; }

    bool ru_ok(int b) const {
        const double lb = bound1(b) + assoc::kLatencyTol;
        const double pb = proc_bound(b) * (1.0 + kRatioTol);
        for (int d = 0; d < 2; ++d)
            if (lat1(b, d) > lb || proc(b, d) > pb) return false;
        return true;
    }

    bool fits1(int o) const {
        if (m_.splitter_cap > 0 && static_cast<int>(members_[o].size()) > m_.splitter_cap) return false;
        for (int b : members_[o])
            if (!ru_ok(b)) return false;
        return true;
    }

    bool fits2(int q) const {
        if (m_.splitter_cap > 0 && static_cast<int>(qlist_[q].size()) > m_.splitter_cap) return false;
        for (int o : qlist_[q]) {
            const double bound = bound2(o) + assoc::kLatencyTol;
            for (int d = 0; d < 2; ++d)
                if (lat2(o, d) > bound) return false;
            for (int b : members_[o])
                if (plan_.cu[o][m_.ru_slice[b]] == q && !ru_ok(b)) return false;
        }
        return true;
    }

    double rho1_partial(int o) const {
        if (members_[o].empty()) return 0.0;
        double r = m_.d_rn1_olt[o];
        for (int b : members_[o]) r += m_.d_ru_rn1[b][o];
        return r;
    }

private:
    void cu_contrib(int b, int o, int where, double sign) {
        if (where == kCuLocal) {
            cu_loc_[o] += sign * m_.cu[b];
        } else if (where == kCuReserve) {
            cu_res_[o] += sign * m_.cu[b];
        } else if (where >= 0) {
            cu_q_[where] += sign * m_.cu[b];
            for (int d = 0; d < 2; ++d) load2_[where][d] += sign * m_.U[b][d];
        }
    }

    const P2Model& m_;
    DeploymentPlan plan_;
    std::vector<std::vector<int>> members_;
    std::vector<std::array<int, kSlices>> cnt_;
    std::vector<std::array<double, 2>> load1_;
    std::vector<double> du_o_, cu_loc_, cu_res_;
    std::vector<std::array<double, 2>> load2_;
    std::vector<double> cu_q_;
    std::vector<std::vector<int>> qlist_;
};

void finalize_plan(const P2Model& m, DeploymentPlan& p) {
    for (int o = 0; o < m.num_olts; ++o) {
        if (!p.olt_on[o]) {
            p.cu[o].fill(kCuLocal);
            p.q_of_olt[o] = -1;
        }
        for (auto& c : p.cu[o])
            if (c == kCuPending || c == kCuReserve) c = kCuLocal;
    }
    std::fill(p.q_on.begin(), p.q_on.end(), 0);
    for (int o = 0; o < m.num_olts; ++o)
        if (p.q_of_olt[o] >= 0) p.q_on[p.q_of_olt[o]] = 1;
    annotate(m, p);
}

std::vector<int> round_robin_order(const P2Model& m) {
    std::array<std::vector<int>, kSlices> per;
    for (int b = 0; b < m.num_rus; ++b) per[m.ru_slice[b]].push_back(b);
    std::vector<int> order;
    order.reserve(m.num_rus);
    for (std::size_t k = 0; order.size() < static_cast<std::size_t>(m.num_rus); ++k)
        for (int s = 0; s < kSlices; ++s)
            if (k < per[s].size()) order.push_back(per[s][k]);
    return order;
}

// Uninstalled candidate reaching `must_reach` (or any RU when -1) that reaches the
// most unassigned RUs, then has the least total distance to them.
int pick_new_olt(const P2Model& m, const std::vector<std::uint8_t>& installed,
                 const std::vector<std::uint8_t>& assigned, int must_reach) {
    int best = -1;
    int best_cnt = -1;
    double best_dist = kInf;
    for (int o = 0; o < m.num_olts; ++o) {
        if (installed[o]) continue;
        if (must_reach >= 0 && !m.reach1[must_reach][o]) continue;
        int cnt = 0;
        double dist = 0.0;
        for (int b = 0; b < m.num_rus; ++b) {
            if (assigned[b] || !m.reach1[b][o]) continue;
            ++cnt;
            dist += m.d_ru_olt(b, o);
        }
        if (cnt > best_cnt || (cnt == best_cnt && dist < best_dist)) {
            best = o;
            best_cnt = cnt;
            best_dist = dist;
        }
    }
    return best;
}

cost::Cents case1_cents(const P2Model& m) {
    return cost::to_cents(m.prices.per_gops * m.G_b) + cost::to_cents(m.prices.server_install);
}

// Stage-I sweep with a fixed installed set. Returns the first unplaceable RU or -1.
// With `mixed`, the first RU of a slice on an OLT picks the slice's CU state:
// local when it fits, otherwise reserved for Stage-II.
int stage1_sweep(const P2Model& m, Engine& e, const std::vector<std::uint8_t>& installed,
                 const std::vector<int>& order, std::vector<std::uint8_t>& assigned, bool mixed) {
    const cost::Cents c1 = case1_cents(m);
    std::vector<int> olts;
    for (int b : order) {
        olts.clear();
        for (int o = 0; o < m.num_olts; ++o)
            if (installed[o] && m.reach1[b][o]) olts.push_back(o);
        std::sort(olts.begin(), olts.end(), [&](int a, int c) {
            const double da = m.d_ru_olt(b, a), dc = m.d_ru_olt(b, c);
            return da != dc ? da < dc : a < c;
        });
        const int s = m.ru_slice[b];
        bool placed = false;
        for (int o : olts) {
            const int prev = e.plan().cu[o][s];
            std::vector<int> states{prev};
            if (mixed && e.count(o, s) == 0) states = {kCuLocal, kCuReserve};
            int pick = -1, pick_state = prev;
            cost::Cents pick_cost = 0;
            for (int c = 0; c < 2; ++c) {  // c == 0: DU at OLT, c == 1: DU at RU
                for (int state : states) {
                    e.set_cu(o, s, state);
                    e.add(b, o, c == 1);
                    const bool ok = e.fits1(o);
                    e.remove(b);
                    e.set_cu(o, s, prev);
                    if (!ok) continue;
                    const cost::Cents cc = c == 1 ? c1 : 0;
                    if (pick < 0 || cc < pick_cost) {
                        pick = c;
                        pick_state = state;
                        pick_cost = cc;
                    }
                    break;
                }
            }
            if (pick >= 0) {
                e.set_cu(o, s, pick_state);
                e.add(b, o, pick == 1);
                assigned[b] = 1;
                placed = true;
                break;
            }
        }
        if (!placed) return b;
    }
    return -1;
}

bool stage2_place(const P2Model& m, Engine& e) {
    for (int o = 0; o < m.num_olts; ++o) {
        if (e.members(o).empty()) continue;
        for (int s = 0; s < kSlices; ++s) {
            if (e.count(o, s) == 0) {
                e.set_cu(o, s, kCuLocal);
                continue;
            }
            e.set_cu(o, s, kCuLocal);
            if (e.fits1(o)) continue;
            e.set_cu(o, s, kCuPending);
            if (!m.allow_stage2) return false;
            const int cur = e.plan().q_of_olt[o];
            std::vector<int> on, off;
            for (int q = 0; q < m.num_q; ++q) {
                if (q == cur || !m.reach2[o][q]) continue;
                (e.plan().q_on[q] ? on : off).push_back(q);
            }
            auto by_dist = [&](int a, int c) {
                const double da = m.d_olt_q(o, a), dc = m.d_olt_q(o, c);
                return da != dc ? da < dc : a < c;
            };
            std::sort(on.begin(), on.end(), by_dist);
            std::sort(off.begin(), off.end(), by_dist);
            std::vector<int> cand;
            if (cur >= 0) cand.push_back(cur);
            cand.insert(cand.end(), on.begin(), on.end());
            cand.insert(cand.end(), off.begin(), off.end());
            // Slices already sent to `cur` move along when the OLT changes Stage-II site.
            std::vector<int> moved;
            for (int t = 0; t < s; ++t)
                if (cur >= 0 && e.plan().cu[o][t] == cur) moved.push_back(t);
            bool done = false;
            for (int q : cand) {
                const bool fresh = e.plan().q_of_olt[o] != q;
                if (fresh) {
                    for (int t : moved) e.set_cu(o, t, kCuPending);
                    if (cur >= 0) e.detach(o);
                    e.attach(o, q);
                    for (int t : moved) e.set_cu(o, t, q);
                }
                e.set_cu(o, s, q);
                if (e.fits2(q) && e.fits1(o)) {
                    done = true;
                    break;
                }
                e.set_cu(o, s, kCuPending);
                if (fresh) {
                    for (int t : moved) e.set_cu(o, t, kCuPending);
                    e.detach(o);
                    if (cur >= 0) {
                        e.attach(o, cur);
                        for (int t : moved) e.set_cu(o, t, cur);
                    }
                }
            }
            if (!done) return false;
        }
    }
    return true;
}

}  // namespace

P2Model build_p2(const scenario::Scenario& sc, const std::vector<int>& rus,
                 const std::vector<scenario::Point>& olts, const std::vector<scenario::Point>& stage2,
                 const DeployConfig& cfg, const cost::PriceBook& prices) {
    require_positive(cfg.stage1_rate, "stage1_rate");
    require_positive(cfg.stage2_rate, "stage2_rate");
    require_positive(cfg.ru_proc_gops, "ru_proc_gops");
    if (cfg.stage1_wait < 0) throw ParameterError("stage1_wait", "must be non-negative");
    if (cfg.stage2_wait < 0) throw ParameterError("stage2_wait", "must be non-negative");
    if (cfg.ru_server_gops < 0 || cfg.olt_server_gops < 0 || cfg.stage2_server_gops < 0)
        throw ParameterError("server_gops", "must be non-negative");
    if (!(cfg.olt_du_share >= 0 && cfg.olt_du_share <= 1))
        throw ParameterError("olt_du_share", "must lie in [0, 1]");
    if (rus.empty()) throw ParameterError("assignment", "no installed RU");
    if (olts.empty()) throw ParameterError("stage1_olts", "no Stage-I candidate");

    P2Model m;
    m.num_rus = static_cast<int>(rus.size());
    for (int id : rus) {
        if (id < 0 || id >= static_cast<int>(sc.rus.size())) throw ParameterError("assignment", "RU index out of range");
        const auto& ru = sc.rus[id];
        m.ru_id.push_back(id);
        m.ru_slice.push_back(ru.slice);
        m.ru_pos.push_back(ru.pos);
        m.U.push_back({ru.mh_ul, ru.mh_dl});
        m.V.push_back({ru.fh_ul, ru.fh_dl});
        m.eta.push_back(ru.eta);
        m.du.push_back(ru.du);
        m.cu.push_back(ru.cu);
    }
    m.num_olts = static_cast<int>(olts.size());
    m.olt_pos = olts;
    const double reach1 = sc.sites.reach_stage1;
    const double reach2 = sc.sites.reach_stage2;
    m.d_ru_rn1.assign(m.num_rus, std::vector<double>(m.num_olts, 0.0));
    for (int o = 0; o < m.num_olts; ++o) {
        std::vector<scenario::Point> near;
        for (const auto& p : m.ru_pos)
            if (scenario::distance(p, olts[o]) <= reach1) near.push_back(p);
        const auto rn = near.empty() ? olts[o] : scenario::centroid(near);
        m.rn1.push_back(rn);
        m.d_rn1_olt.push_back(scenario::distance(rn, olts[o]));
        for (int b = 0; b < m.num_rus; ++b) m.d_ru_rn1[b][o] = scenario::distance(m.ru_pos[b], rn);
    }
    m.reach1.assign(m.num_rus, std::vector<std::uint8_t>(m.num_olts, 0));
    for (int b = 0; b < m.num_rus; ++b) {
        bool any = false;
        for (int o = 0; o < m.num_olts; ++o) {
            m.reach1[b][o] = m.d_ru_olt(b, o) <= reach1 ? 1 : 0;
            any = any || m.reach1[b][o];
        }
        if (!any) {
            std::ostringstream os;
            os << "RU " << m.ru_id[b] << " is beyond " << reach1 << " km of every Stage-I OLT";
            throw InfeasibleError("deploy", os.str());
        }
    }
    m.num_q = static_cast<int>(stage2.size());
    m.q_pos = stage2;
    m.d_olt_rn2.assign(m.num_olts, std::vector<double>(m.num_q, 0.0));
    for (int q = 0; q < m.num_q; ++q) {
        std::vector<scenario::Point> near;
        for (const auto& p : olts)
            if (scenario::distance(p, stage2[q]) <= reach2) near.push_back(p);
        const auto rn = near.empty() ? stage2[q] : scenario::centroid(near);
        m.rn2.push_back(rn);
        m.d_rn2_q.push_back(scenario::distance(rn, stage2[q]));
        for (int o = 0; o < m.num_olts; ++o) m.d_olt_rn2[o][q] = scenario::distance(olts[o], rn);
    }
    m.reach2.assign(m.num_olts, std::vector<std::uint8_t>(m.num_q, 0));
    for (int o = 0; o < m.num_olts; ++o)
        for (int q = 0; q < m.num_q; ++q) m.reach2[o][q] = m.d_olt_q(o, q) <= reach2 ? 1 : 0;

    m.R1 = cfg.stage1_rate;
    m.R2 = cfg.stage2_rate;
    m.H = cfg.ru_proc_gops;
    m.G_b = cfg.ru_server_gops;
    m.G_o = cfg.olt_server_gops;
    m.G_q = cfg.stage2_server_gops;
    m.GD_b = m.G_b / 2.0;
    m.GD_o = m.G_o * cfg.olt_du_share / 2.0;
    m.GC_o = m.G_o * (1.0 - cfg.olt_du_share) / 2.0;
    m.GC_q = m.G_q / 2.0;
    m.wait1 = cfg.stage1_wait;
    m.wait2 = cfg.stage2_wait;
    m.tti = sc.tti;
    for (int s = 0; s < kSlices; ++s) {
        m.fh_budget[s] = sc.slices[s].fh_budget;
        m.mh_budget[s] = sc.slices[s].mh_budget;
        m.bbu_budget[s] = cfg.bbu_override[s] > 0 ? cfg.bbu_override[s] : sc.slices[s].bbu_budget;
    }
    m.splitter_cap = cfg.splitter_cap;
    m.allow_stage2 = cfg.allow_stage2 && m.num_q > 0;
    m.prices = prices;
    return m;
}

P2Model build_p2(const scenario::Scenario& sc, const assoc::Assignment& a, const DeployConfig& cfg,
                 const cost::PriceBook& prices) {
    std::vector<scenario::Point> olts;
    for (int b : a.installed) {
        if (b < 0 || b >= static_cast<int>(sc.rus.size())) throw ParameterError("assignment", "RU index out of range");
        olts.push_back(sc.rus[b].pos);
    }
    return build_p2(sc, a.installed, olts, sc.sites.stage2_olts, cfg, prices);
}

DeploymentPlan empty_plan(const P2Model& m) {
    DeploymentPlan p;
    p.olt_of_ru.assign(m.num_rus, -1);
    p.du_at_ru.assign(m.num_rus, 0);
    p.cu.assign(m.num_olts, {});
    for (auto& c : p.cu) c.fill(kCuLocal);
    p.q_of_olt.assign(m.num_olts, -1);
    p.olt_on.assign(m.num_olts, 0);
    p.q_on.assign(m.num_q, 0);
    return p;
}

double pon_latency_stage1(const P2Model& m, const DeploymentPlan& p, int b, Dir d) {
    if (p.olt_of_ru.at(b) < 0) throw ParameterError("plan", "RU is not attached");
    return Engine(m, p).lat1(b, static_cast<int>(d));
}

double stage1_bound(const P2Model& m, const DeploymentPlan& p, int b) {
    const int s = m.ru_slice.at(b);
    return p.du_at_ru.at(b) ? m.mh_budget[s] : m.fh_budget[s];
}

double pon_latency_stage2(const P2Model& m, const DeploymentPlan& p, int o, Dir d) {
    if (p.q_of_olt.at(o) < 0) throw ParameterError("plan", "OLT has no Stage-II attachment");
    return Engine(m, p).lat2(o, static_cast<int>(d));
}

double processing_latency(const P2Model& m, const DeploymentPlan& p, int b, Dir d) {
    if (p.olt_of_ru.at(b) < 0) throw ParameterError("plan", "RU is not attached");
    return Engine(m, p).proc(b, static_cast<int>(d));
}

double rho_stage1(const P2Model& m, const DeploymentPlan& p, int o) {
    if (!p.olt_on.at(o)) return 0.0;
    double r = m.d_rn1_olt[o];
    for (int b = 0; b < m.num_rus; ++b)
        if (p.olt_of_ru[b] == o) r += m.d_ru_rn1[b][o];
    return r;
}

double rho_stage2(const P2Model& m, const DeploymentPlan& p, int q) {
    if (!p.q_on.at(q)) return 0.0;
    double r = m.d_rn2_q[q];
    for (int o = 0; o < m.num_olts; ++o)
        if (p.q_of_olt[o] == q) r += m.d_olt_rn2[o][q];
    return r;
}

void annotate(const P2Model& m, DeploymentPlan& p) {
    const Engine e(m, p);
    p.rho_o.assign(m.num_olts, 0.0);
    p.rho_q.assign(m.num_q, 0.0);
    for (int o = 0; o < m.num_olts; ++o) p.rho_o[o] = rho_stage1(m, p, o);
    for (int q = 0; q < m.num_q; ++q) p.rho_q[q] = rho_stage2(m, p, q);
    p.stage1_lat.assign(m.num_rus, {0.0, 0.0});
    p.proc.assign(m.num_rus, {0.0, 0.0});
    p.stage2_lat.assign(m.num_olts, {0.0, 0.0});
    for (int b = 0; b < m.num_rus; ++b) {
        if (p.olt_of_ru[b] < 0) continue;
        for (int d = 0; d < 2; ++d) {
            p.stage1_lat[b][d] = e.lat1(b, d);
            p.proc[b][d] = e.proc(b, d);
        }
    }
    for (int o = 0; o < m.num_olts; ++o) {
        if (p.q_of_olt[o] < 0) continue;
        for (int d = 0; d < 2; ++d) p.stage2_lat[o][d] = e.lat2(o, d);
    }
}

DeploymentPlan greedy_deploy(const P2Model& m, GreedyStats* stats) {
    GreedyStats local;
    GreedyStats& st = stats ? *stats : local;
    const auto order = round_robin_order(m);
    // Stage-I passes by initial CU state: pending (no CU load), reserved at
    // Stage-II capacity, mixed per slice, and local. Stage-II placement follows all but the last.
    std::vector<int> passes;
    if (m.allow_stage2) passes = {kCuPending, kCuReserve, kCuMixed};
    passes.push_back(kCuLocal);

    std::string why;
    auto fail = [&](const std::string& reason) { why += (why.empty() ? "" : "; ") + reason; };
    DeploymentPlan best;
    cost::Cents best_cost = 0;
    for (std::size_t pi = 0; pi < passes.size(); ++pi) {
        const bool cu_inclusive = passes[pi] == kCuLocal;
        if (pi > 0) ++st.stage1_reruns;
        Engine e(m);
        std::vector<std::uint8_t> installed(m.num_olts, 0);
        std::vector<std::uint8_t> assigned(m.num_rus, 0);
        installed[pick_new_olt(m, installed, assigned, -1)] = 1;
        bool stage1_ok = false;
        for (;;) {
            const bool mixed = passes[pi] == kCuMixed;
            e.reset(mixed ? kCuLocal : passes[pi]);
            std::fill(assigned.begin(), assigned.end(), 0);
            const int failed = stage1_sweep(m, e, installed, order, assigned, mixed);
            if (failed < 0) {
                stage1_ok = true;
                break;
            }
            const int next = pick_new_olt(m, installed, assigned, failed);
            if (next < 0) {
                std::ostringstream os;
                os << "RU " << m.ru_id[failed] << " unplaceable with every Stage-I OLT installed";
                fail(os.str());
                break;
            }
            installed[next] = 1;
            ++st.restarts;
        }
        if (!stage1_ok) continue;
        if (!cu_inclusive && !stage2_place(m, e)) {
            fail("Stage-II CU placement failed");
            continue;
        }
        DeploymentPlan p = e.plan();
        finalize_plan(m, p);
        const cost::Cents c = cost::price_plan(m, p, m.prices).total;
        if (!best.feasible || c < best_cost) {
            best = std::move(p);
            best.feasible = true;
            best.status = "feasible";
            best_cost = c;
        }
    }
    if (best.feasible) return best;
    DeploymentPlan p = empty_plan(m);
    p.feasible = false;
    p.status = "infeasible: " + why;
    return p;
}

namespace {

class ExactSearch {
public:
    ExactSearch(const P2Model& m, const ExactP2Limits& lim)
        : m_(m), lim_(lim), e_(m), start_(std::chrono::steady_clock::now()) {
        e_.reset(kCuPending);
        const auto& b = m.prices;
        fixed_olt_ = cost::to_cents(b.olt) + cost::to_cents(b.splitter) + cost::to_cents(b.server_install) +
                     cost::to_cents(b.per_gops * m.G_o);
        onu_ = cost::to_cents(b.onu);
        c1_ = case1_cents(m);
    }

    ExactP2Result run() {
        dfs(0);
        ExactP2Result r;
        r.nodes = nodes_;
        r.proven_optimal = !stopped_ && found_;
        if (found_) {
            r.plan = best_;
            r.plan.feasible = true;
            r.plan.status = r.proven_optimal ? "optimal" : "feasible";
            r.cost = best_cost_;
        } else {
            r.plan = empty_plan(m_);
            r.plan.feasible = false;
            r.plan.status = stopped_ ? "unknown: search limit reached" : "infeasible";
        }
        return r;
    }

private:
    bool limit_hit() {
        if (stopped_) return true;
        if (++nodes_ > lim_.max_nodes) stopped_ = true;
        if ((nodes_ & 1023) == 0) {
            const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
            if (t > lim_.time_limit_s) stopped_ = true;
        }
        return stopped_;
    }

    cost::Cents stage1_cost() const {
        cost::Cents c = 0;
        for (int o = 0; o < m_.num_olts; ++o) {
            if (e_.members(o).empty()) continue;
            c += fixed_olt_ + cost::fiber_cents(m_.prices, e_.rho1_partial(o));
            for (int b : e_.members(o)) c += onu_ + (e_.plan().du_at_ru[b] ? c1_ : 0);
        }
        return c;
    }

    void dfs(int b) {
        if (limit_hit()) return;
        if (found_ && stage1_cost() >= best_cost_) return;
        if (b == m_.num_rus) {
            olts_.clear();
            for (int o = 0; o < m_.num_olts; ++o)
                if (!e_.members(o).empty()) olts_.push_back(o);
            stage2(0);
            return;
        }
        for (int o = 0; o < m_.num_olts; ++o) {
            if (!m_.reach1[b][o]) continue;
            for (int c = 0; c < 2; ++c) {
                e_.add(b, o, c == 1);
                if (e_.fits1(o)) dfs(b + 1);
                e_.remove(b);
                if (stopped_) return;
            }
        }
    }

    void stage2(std::size_t i) {
        if (limit_hit()) return;
        if (i == olts_.size()) {
            leaf();
            return;
        }
        const int o = olts_[i];
        std::array<int, kSlices> present{};
        int np = 0;
        for (int s = 0; s < kSlices; ++s)
            if (e_.count(o, s) > 0) present[np++] = s;

        for (int s = 0; s < kSlices; ++s) e_.set_cu(o, s, kCuLocal);
        if (e_.fits1(o)) stage2(i + 1);
        if (m_.allow_stage2) {
            for (int q = 0; q < m_.num_q && !stopped_; ++q) {
                if (!m_.reach2[o][q]) continue;
                e_.attach(o, q);
                for (int mask = 1; mask < (1 << np) && !stopped_; ++mask) {
                    for (int k = 0; k < np; ++k) e_.set_cu(o, present[k], (mask >> k) & 1 ? q : kCuLocal);
                    if (e_.fits1(o) && e_.fits2(q)) stage2(i + 1);
                }
                for (int s = 0; s < kSlices; ++s) e_.set_cu(o, s, kCuLocal);
                e_.detach(o);
            }
        }
        for (int s = 0; s < kSlices; ++s) e_.set_cu(o, s, kCuPending);
    }

    void leaf() {
        for (int q = 0; q < m_.num_q; ++q)
            if (!e_.attached(q).empty() && !e_.fits2(q)) return;
        const cost::Cents c = cost::price_plan(m_, e_.plan(), m_.prices).total;
        if (!found_ || c < best_cost_) {
            found_ = true;
            best_cost_ = c;
            best_ = e_.plan();
            finalize_plan(m_, best_);
        }
    }

    const P2Model& m_;
    ExactP2Limits lim_;
    Engine e_;
    std::chrono::steady_clock::time_point start_;
    cost::Cents fixed_olt_ = 0, onu_ = 0, c1_ = 0;
    std::vector<int> olts_;
    std::int64_t nodes_ = 0;
    bool stopped_ = false;
    bool found_ = false;
    cost::Cents best_cost_ = 0;
    DeploymentPlan best_;
};

}  // namespace

ExactP2Result solve_p2_exact_small(const P2Model& m, const ExactP2Limits& limits) {
    return ExactSearch(m, limits).run();
}

P2Variables to_variables(const P2Model& m, const DeploymentPlan& p) {
    P2Variables v;
    v.y.assign(m.num_rus, std::vector<std::uint8_t>(m.num_olts, 0));
    v.z.assign(m.num_olts, std::vector<std::uint8_t>(m.num_q, 0));
    v.theta_o = p.olt_on;
    v.theta_q = p.q_on;
    v.theta_o.resize(m.num_olts, 0);
    v.theta_q.resize(m.num_q, 0);
    v.du_ru.assign(m.num_rus, 0);
    v.du_olt.assign(m.num_rus, std::vector<std::uint8_t>(m.num_olts, 0));
    v.cu_olt.assign(m.num_olts, {});
    v.cu_q.assign(m.num_olts, std::vector<std::array<std::uint8_t, kSlices>>(m.num_q, std::array<std::uint8_t, kSlices>{}));
    v.chi.assign(m.num_rus, std::vector<std::uint8_t>(m.num_olts, 0));
    v.ups.assign(m.num_rus, std::vector<std::uint8_t>(m.num_olts, 0));
    for (int b = 0; b < m.num_rus; ++b) {
        const int o = p.olt_of_ru[b];
        if (o < 0) continue;
        v.y[b][o] = 1;
        if (p.du_at_ru[b]) {
            v.du_ru[b] = 1;
            v.chi[b][o] = 1;
        } else {
            v.du_olt[b][o] = 1;
            v.ups[b][o] = 1;
        }
    }
    for (int o = 0; o < m.num_olts; ++o) {
        if (p.q_of_olt[o] >= 0) v.z[o][p.q_of_olt[o]] = 1;
        if (!v.theta_o[o]) continue;
        for (int s = 0; s < kSlices; ++s) {
            const int c = p.cu[o][s];
            if (c >= 0) v.cu_q[o][c][s] = 1;
            else v.cu_olt[o][s] = 1;
        }
    }
    return v;
}

std::vector<Violation> check_plan(const P2Model& m, const P2Variables& v) {
    std::vector<Violation> out;
    auto report = [&](std::string family, std::vector<int> idx, double slack, std::string detail) {
        out.push_back({std::move(family), std::move(idx), slack, std::move(detail)});
    };
    const int B = m.num_rus, O = m.num_olts, Q = m.num_q;

    // Structural families.
    for (int b = 0; b < B; ++b) {
        int n = 0;
        for (int o = 0; o < O; ++o) {
            if (!v.y[b][o]) continue;
            ++n;
            if (!m.reach1[b][o]) report("reach", {b, o}, -1.0, "RU beyond Stage-I reach");
            if (!v.theta_o[o]) report("installation", {b, o}, -1.0, "RU attached to an OLT that is off");
        }
        if (n != 1) report("ru_attachment", {b}, -std::abs(n - 1.0), "RU attached to " + std::to_string(n) + " OLTs");
        int places = v.du_ru[b];
        for (int o = 0; o < O; ++o) {
            places += v.du_olt[b][o];
            if (v.du_olt[b][o] && !v.y[b][o]) report("du_placement", {b, o}, -1.0, "DU at an OLT the RU is not on");
        }
        if (places != 1) report("du_placement", {b}, -std::abs(places - 1.0), "DU placed " + std::to_string(places) + " times");
        for (int o = 0; o < O; ++o) {
            if (v.chi[b][o] != (v.du_ru[b] && v.y[b][o])) report("linearization", {b, o}, -1.0, "chi != omega_d * y");
            if (v.ups[b][o] != (v.du_olt[b][o] && v.y[b][o])) report("linearization", {b, o}, -1.0, "upsilon != omega_do * y");
        }
    }
    std::vector<int> on_q(O, -1);
    for (int o = 0; o < O; ++o) {
        int n = 0;
        for (int q = 0; q < Q; ++q) {
            if (!v.z[o][q]) continue;
            ++n;
            on_q[o] = q;
            if (!m.reach2[o][q]) report("reach", {o, q}, -1.0, "OLT beyond Stage-II reach");
            if (!v.theta_q[q]) report("installation", {o, q}, -1.0, "Stage-II attachment to an OLT that is off");
        }
        if (n > v.theta_o[o]) report("stage2_attachment", {o}, -(n - v.theta_o[o] + 0.0), "OLT attached to several Stage-II OLTs");
        for (int s = 0; s < kSlices; ++s) {
            int placed = v.cu_olt[o][s];
            for (int q = 0; q < Q; ++q) {
                placed += v.cu_q[o][q][s];
                if (v.cu_q[o][q][s] && !v.z[o][q]) report("cu_placement", {o, q, s}, -1.0, "CU at a Stage-II OLT not linked");
            }
            if (placed != v.theta_o[o]) report("cu_placement", {o, s}, -1.0, "CU placements do not match theta_o");
        }
    }
    if (m.splitter_cap > 0) {
        for (int o = 0; o < O; ++o) {
            int n = 0;
            for (int b = 0; b < B; ++b) n += v.y[b][o];
            if (n > m.splitter_cap) report("splitter", {o}, m.splitter_cap - n + 0.0, "too many ONUs on a Stage-I PON");
        }
        for (int q = 0; q < Q; ++q) {
            int n = 0;
            for (int o = 0; o < O; ++o) n += v.z[o][q];
            if (n > m.splitter_cap) report("splitter", {q}, m.splitter_cap - n + 0.0, "too many ONUs on a Stage-II PON");
        }
    }
    if (!out.empty()) return out;

    // Latency and processing, evaluated from the variables directly.
    std::vector<int> olt(B, -1);
    for (int b = 0; b < B; ++b)
        for (int o = 0; o < O; ++o)
            if (v.y[b][o]) olt[b] = o;
    auto cu_at_q = [&](int b) {
        const int o = olt[b];
        for (int q = 0; q < Q; ++q)
            if (v.cu_q[o][q][m.ru_slice[b]]) return q;
        return -1;
    };
    const char* s1[2] = {"stage1_uplink", "stage1_downlink"};
    const char* s2[2] = {"stage2_uplink", "stage2_downlink"};
    const char* pr[2] = {"processing_uplink", "processing_downlink"};
    for (int d = 0; d < 2; ++d) {
        for (int b = 0; b < B; ++b) {
            const int o = olt[b];
            double load = 0.0;
            double du_o = 0.0;
            double cu_o = 0.0;
            for (int k = 0; k < B; ++k) {
                if (!v.y[k][o]) continue;
                load += v.chi[k][o] * m.U[k][d] + v.ups[k][o] * m.V[k][d];
                du_o += v.ups[k][o] * m.du[k];
                cu_o += v.cu_olt[o][m.ru_slice[k]] * m.cu[k];
            }
            const double lat = (d == 0 ? m.wait1 : 0.0) + models::fiber_delay(m.d_ru_olt(b, o)) + load * m.tti / m.R1;
            const int s = m.ru_slice[b];
            const double bound = v.du_ru[b] * m.mh_budget[s] + v.du_olt[b][o] * m.fh_budget[s];
            if (lat > bound + assoc::kLatencyTol) report(s1[d], {b, o}, bound - lat, "Stage-I PON latency over budget");

            double r = ratio(m.eta[b], m.H);
            r += v.du_ru[b] ? ratio(m.du[b], m.GD_b) : ratio(du_o, m.GD_o);
            const int q = cu_at_q(b);
            if (q < 0) {
                r += ratio(cu_o, m.GC_o);
            } else {
                double cu_q = 0.0;
                for (int k = 0; k < B; ++k)
                    if (cu_at_q(k) == q) cu_q += m.cu[k];
                r += ratio(cu_q, m.GC_q);
            }
            const double rb = m.bbu_budget[s] / m.tti;
            if (r > rb * (1.0 + kRatioTol)) report(pr[d], {b}, rb - r, "processing over the BBU budget");
        }
        for (int o = 0; o < O; ++o) {
            const int q = on_q[o];
            if (q < 0) continue;
            double bound = kInf;
            for (int b = 0; b < B; ++b)
                if (olt[b] == o && v.cu_q[o][q][m.ru_slice[b]]) bound = std::min(bound, m.mh_budget[m.ru_slice[b]]);
            if (!std::isfinite(bound)) continue;
            double load = 0.0;
            for (int k = 0; k < B; ++k)
                if (cu_at_q(k) == q) load += m.U[k][d];
            const double lat = (d == 0 ? m.wait2 : 0.0) + models::fiber_delay(m.d_olt_q(o, q)) + load * m.tti / m.R2;
            if (lat > bound + assoc::kLatencyTol) report(s2[d], {o, q}, bound - lat, "Stage-II PON latency over budget");
        }
    }
    return out;
}

std::vector<Violation> check_plan(const P2Model& m, const DeploymentPlan& p) {
    return check_plan(m, to_variables(m, p));
}

double approximation_factor(const P2Model& m) {
    return std::log(static_cast<double>(m.num_olts) * static_cast<double>(m.num_rus));
}

}  // namespace oran::deploy
