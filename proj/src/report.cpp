#include "oran/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "oran/assoc.hpp"
#include "oran/errors.hpp"
#include "oran/io.hpp"
#include "oran/kernels.hpp"

namespace oran::report {

namespace {

const char* kSliceNames[kSlices] = {"urllc", "embb", "mmtc"};

std::string instance_id(const std::string& area, double side, std::uint64_t seed) {
    return area + "/" + fmt(side) + "km/seed " + std::to_string(seed);
}

double mean(double sum, int n) { return n > 0 ? sum / n : 0.0; }

}  // namespace

std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string to_string(Solver s) {
    switch (s) {
        case Solver::heuristic: return "heuristic";
        case Solver::exact: return "exact";
        case Solver::both: return "both";
    }
    return "heuristic";
}

Solver solver_from_string(const std::string& s) {
    if (s == "heuristic") return Solver::heuristic;
    if (s == "exact") return Solver::exact;
    if (s == "both") return Solver::both;
    throw ParameterError("solver", "unknown solver '" + s + "'");
}

bool embb_largest(const std::array<int, kSlices>& rus) { return rus[1] >= rus[0] && rus[1] >= rus[2]; }

void validate(const ExperimentConfig& cfg) {
    if (cfg.seeds.empty()) throw ParameterError("seeds", "at least one seed is required");
    if (cfg.areas.empty()) throw ParameterError("areas", "at least one area class is required");
    if (cfg.sides.empty()) throw ParameterError("sides", "at least one side is required");
    for (double s : cfg.sides)
        if (!(s > 0)) throw ParameterError("sides", "must be positive");
    for (int s = 0; s < kSlices; ++s) {
        if (cfg.fh_budget[s] < 0 || cfg.mh_budget[s] < 0 || cfg.bbu_budget[s] < 0)
            throw ParameterError("budgets", "must be positive");
    }
    for (int n : cfg.scaling_n)
        if (n < 1) throw ParameterError("scaling_n", "must be at least 1");
    if (!(cfg.halved_gops >= 0)) throw ParameterError("halved_gops", "must be non-negative");
    if (!(cfg.halved_share >= 0 && cfg.halved_share <= 1)) throw ParameterError("halved_share", "must lie in [0, 1]");
    if (cfg.oracle_max_ues < 1 || cfg.oracle_max_rus < 1 || cfg.oracle_p2_rus < 1 || cfg.oracle_p2_olts < 1 ||
        cfg.oracle_p2_stage2 < 0)
        throw ParameterError("oracle", "subsample sizes must be positive");
    if (cfg.lagrangian.n_max < 1) throw ParameterError("lagrangian.n_max", "must be at least 1");
    if (cfg.lagrangian.search_nodes < 0) throw ParameterError("lagrangian.search_nodes", "must be non-negative");
}

Json to_json(const ExperimentConfig& c) {
    Json j;
    j["areas"] = Json::array();
    for (auto a : c.areas) j["areas"].push_back(scenario::to_string(a));
    j["sides"] = c.sides;
    j["seeds"] = c.seeds;
    j["p1_solver"] = to_string(c.p1_solver);
    j["p2_solver"] = to_string(c.p2_solver);
    j["fh_budget"] = c.fh_budget;
    j["mh_budget"] = c.mh_budget;
    j["bbu_budget"] = c.bbu_budget;
    j["prices"] = io::to_json(c.prices);
    j["deploy"] = io::to_json(c.deploy);
    j["stage_study"] = c.stage_study;
    j["halved_gops"] = c.halved_gops;
    j["scaling_n"] = c.scaling_n;
    j["halved_share"] = c.halved_share;
    j["otn"] = {{"link_capacity", c.otn.link_capacity}, {"knn", c.otn.knn}, {"hop_latency", c.otn.hop_latency}};
    j["lagrangian"] = {{"n_max", c.lagrangian.n_max},
                       {"lambda0", c.lagrangian.lambda0},
                       {"halve_after", c.lagrangian.halve_after},
                       {"tol", c.lagrangian.tol},
                       {"enforce_latency", c.lagrangian.enforce_latency},
                       {"seed_incumbent", c.lagrangian.seed_incumbent},
                       {"close_pass", c.lagrangian.close_pass},
                       {"search_nodes", c.lagrangian.search_nodes}};
    j["oracle"] = {{"max_ues", c.oracle_max_ues},
                   {"max_rus", c.oracle_max_rus},
                   {"p2_rus", c.oracle_p2_rus},
                   {"p2_olts", c.oracle_p2_olts},
                   {"p2_stage2", c.oracle_p2_stage2}};
    j["parallel"] = c.parallel;
    j["output_dir"] = c.output_dir;
    return j;
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig c) {
    for (const auto& [k, v] : j.items()) {
        if (k == "areas") {
            c.areas.clear();
            for (const auto& a : v) c.areas.push_back(scenario::area_class_from_string(a.get<std::string>()));
        } else if (k == "sides") c.sides = v.get<std::vector<double>>();
        else if (k == "seeds") c.seeds = v.get<std::vector<std::uint64_t>>();
        else if (k == "p1_solver") c.p1_solver = solver_from_string(v.get<std::string>());
        else if (k == "p2_solver") c.p2_solver = solver_from_string(v.get<std::string>());
        else if (k == "fh_budget") c.fh_budget = v.get<std::array<double, kSlices>>();
        else if (k == "mh_budget") c.mh_budget = v.get<std::array<double, kSlices>>();
        else if (k == "bbu_budget") c.bbu_budget = v.get<std::array<double, kSlices>>();
        else if (k == "prices") c.prices = io::price_book_from_json(v, c.prices);
        else if (k == "deploy") c.deploy = io::deploy_config_from_json(v, c.deploy);
        else if (k == "stage_study") c.stage_study = v.get<bool>();
        else if (k == "halved_gops") c.halved_gops = v.get<double>();
        else if (k == "scaling_n") c.scaling_n = v.get<std::vector<int>>();
        else if (k == "halved_share") c.halved_share = v.get<double>();
        else if (k == "otn") {
            for (const auto& [ok, ov] : v.items()) {
                if (ok == "link_capacity") c.otn.link_capacity = ov.get<double>();
                else if (ok == "knn") c.otn.knn = ov.get<int>();
                else if (ok == "hop_latency") c.otn.hop_latency = ov.get<double>();
                else throw ParameterError("otn." + ok, "unknown key");
            }
        } else if (k == "lagrangian") {
            for (const auto& [lk, lv] : v.items()) {
                if (lk == "n_max") c.lagrangian.n_max = lv.get<int>();
                else if (lk == "lambda0") c.lagrangian.lambda0 = lv.get<double>();
                else if (lk == "halve_after") c.lagrangian.halve_after = lv.get<int>();
                else if (lk == "tol") c.lagrangian.tol = lv.get<double>();
                else if (lk == "enforce_latency") c.lagrangian.enforce_latency = lv.get<bool>();
                else if (lk == "seed_incumbent") c.lagrangian.seed_incumbent = lv.get<bool>();
                else if (lk == "close_pass") c.lagrangian.close_pass = lv.get<bool>();
                else if (lk == "search_nodes") c.lagrangian.search_nodes = lv.get<std::int64_t>();
                else throw ParameterError("lagrangian." + lk, "unknown key");
            }
        } else if (k == "oracle") {
            for (const auto& [ok, ov] : v.items()) {
                if (ok == "max_ues") c.oracle_max_ues = ov.get<int>();
                else if (ok == "max_rus") c.oracle_max_rus = ov.get<int>();
                else if (ok == "p2_rus") c.oracle_p2_rus = ov.get<int>();
                else if (ok == "p2_olts") c.oracle_p2_olts = ov.get<int>();
                else if (ok == "p2_stage2") c.oracle_p2_stage2 = ov.get<int>();
                else throw ParameterError("oracle." + ok, "unknown key");
            }
        } else if (k == "parallel") c.parallel = v.get<bool>();
        else if (k == "output_dir") c.output_dir = v.get<std::string>();
        else throw ParameterError(k, "unknown configuration key");
    }
    return c;
}

std::string config_hash(const ExperimentConfig& cfg) {
    Json j = to_json(cfg);
    j.erase("output_dir");
    j.erase("parallel");
    const std::string text = j.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

void latency_stats(const deploy::P2Model& m, deploy::DeploymentPlan p, RunRecord& r) {
    deploy::annotate(m, p);
    std::array<int, kSlices> n_fh{}, n_mh{}, n_ru{};
    SliceStats fh_ul{}, fh_dl{}, mh_ul{}, mh_dl{}, bbu{};
    // Same plan with every DL load set to its UL load, so that UL - DL is the waiting term.
    deploy::P2Model matched = m;
    for (int b = 0; b < m.num_rus; ++b) {
        matched.V[b][1] = matched.V[b][0];
        matched.U[b][1] = matched.U[b][0];
    }
    deploy::DeploymentPlan mp = p;
    deploy::annotate(matched, mp);
    r.wait_gap_err = 0.0;
    for (int b = 0; b < m.num_rus; ++b)
        r.wait_gap_err = std::max(r.wait_gap_err, std::abs(mp.stage1_lat[b][0] - mp.stage1_lat[b][1] - m.wait1));
    for (int o = 0; o < m.num_olts; ++o)
        if (p.olt_on[o] && p.q_of_olt[o] >= 0)
            r.wait_gap_err = std::max(r.wait_gap_err, std::abs(mp.stage2_lat[o][0] - mp.stage2_lat[o][1] - m.wait2));
    for (int b = 0; b < m.num_rus; ++b) {
        const int s = m.ru_slice[b];
        const int o = p.olt_of_ru[b];
        const double ul = p.stage1_lat[b][0], dl = p.stage1_lat[b][1];
        if (p.du_at_ru[b]) {
            mh_ul[s] += ul;
            mh_dl[s] += dl;
            ++n_mh[s];
            r.mh_max[s] = std::max({r.mh_max[s], ul, dl});
        } else {
            fh_ul[s] += ul;
            fh_dl[s] += dl;
            ++n_fh[s];
            r.fh_max[s] = std::max({r.fh_max[s], ul, dl});
        }
        if (p.cu[o][s] >= 0) {
            const double ul2 = p.stage2_lat[o][0], dl2 = p.stage2_lat[o][1];
            mh_ul[s] += ul2;
            mh_dl[s] += dl2;
            ++n_mh[s];
            r.mh_max[s] = std::max({r.mh_max[s], ul2, dl2});
        }
        const double t = std::max(p.proc[b][0], p.proc[b][1]) * m.tti;
        bbu[s] += t;
        ++n_ru[s];
        r.bbu_max[s] = std::max(r.bbu_max[s], t);
    }
    for (int s = 0; s < kSlices; ++s) {
        r.fh_ul[s] = mean(fh_ul[s], n_fh[s]);
        r.fh_dl[s] = mean(fh_dl[s], n_fh[s]);
        r.mh_ul[s] = mean(mh_ul[s], n_mh[s]);
        r.mh_dl[s] = mean(mh_dl[s], n_mh[s]);
        r.bbu[s] = mean(bbu[s], n_ru[s]);
        r.fh_budget[s] = m.fh_budget[s];
        r.mh_budget[s] = m.mh_budget[s];
        r.bbu_budget[s] = m.bbu_budget[s];
    }
}

scenario::Point center(const scenario::Scenario& sc) { return {sc.side_km / 2.0, sc.side_km / 2.0}; }

std::vector<int> nearest(const std::vector<scenario::Point>& pts, scenario::Point c, std::vector<int> idx) {
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const double da = scenario::distance(pts[a], c), db = scenario::distance(pts[b], c);
        return da != db ? da < db : a < b;
    });
    return idx;
}

}  // namespace

scenario::Scenario scenario_for(const ExperimentConfig& cfg, scenario::AreaClass area, double side,
                                 std::uint64_t seed) {
    auto gen = scenario::default_config(area, side, seed);
    for (int s = 0; s < kSlices; ++s) {
        if (cfg.fh_budget[s] > 0) gen.slices[s].fh_budget = cfg.fh_budget[s];
        if (cfg.mh_budget[s] > 0) gen.slices[s].mh_budget = cfg.mh_budget[s];
        if (cfg.bbu_budget[s] > 0) gen.slices[s].bbu_budget = cfg.bbu_budget[s];
    }
    return scenario::generate(gen);
}

scenario::Scenario p1_oracle_subsample(const scenario::Scenario& sc, int max_rus, int max_ues) {
    const auto c = center(sc);
    std::vector<scenario::Point> ru_pos;
    for (const auto& r : sc.rus) ru_pos.push_back(r.pos);
    std::vector<int> all(sc.rus.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    auto rus = nearest(ru_pos, c, all);
    if (static_cast<int>(rus.size()) > max_rus) rus.resize(max_rus);
    std::sort(rus.begin(), rus.end());

    scenario::Scenario sub = sc;
    sub.rus.clear();
    sub.ues.clear();
    sub.sites.stage1_olts.clear();
    for (int b : rus) {
        sub.rus.push_back(sc.rus[b]);
        sub.sites.stage1_olts.push_back(sc.rus[b].pos);
    }
    std::vector<scenario::Point> ue_pos;
    std::vector<int> covered;
    for (std::size_t u = 0; u < sc.ues.size(); ++u) {
        ue_pos.push_back(sc.ues[u].pos);
        for (const auto& r : sub.rus)
            if (r.slice == sc.ues[u].slice && scenario::distance(r.pos, sc.ues[u].pos) <= r.coverage) {
                covered.push_back(static_cast<int>(u));
                break;
            }
    }
    auto ues = nearest(ue_pos, c, covered);
    if (static_cast<int>(ues.size()) > max_ues) ues.resize(max_ues);
    std::sort(ues.begin(), ues.end());
    for (int u : ues) sub.ues.push_back(sc.ues[u]);
    return sub;
}

deploy::P2Model p2_oracle_subsample(const ExperimentConfig& cfg, const scenario::Scenario& sc,
                                    const assoc::Assignment& a) {
    const auto c = center(sc);
    std::vector<scenario::Point> pos;
    for (const auto& ru : sc.rus) pos.push_back(ru.pos);
    auto rus = nearest(pos, c, a.installed);
    if (static_cast<int>(rus.size()) > cfg.oracle_p2_rus) rus.resize(cfg.oracle_p2_rus);
    std::sort(rus.begin(), rus.end());
    std::vector<scenario::Point> olts;
    for (int b : rus)
        if (static_cast<int>(olts.size()) < cfg.oracle_p2_olts) olts.push_back(sc.rus[b].pos);
    std::vector<int> qi(sc.sites.stage2_olts.size());
    for (std::size_t i = 0; i < qi.size(); ++i) qi[i] = static_cast<int>(i);
    qi = nearest(sc.sites.stage2_olts, c, qi);
    std::vector<scenario::Point> qs;
    for (int i : qi)
        if (static_cast<int>(qs.size()) < cfg.oracle_p2_stage2) qs.push_back(sc.sites.stage2_olts[i]);
    return deploy::build_p2(sc, rus, olts, qs, cfg.deploy, cfg.prices);
}

namespace {

void compare_on_subsample(const ExperimentConfig& cfg, const scenario::Scenario& sc, const assoc::Assignment& a,
                          RunRecord& r) {
    SolverComparison& cmp = r.compare;
    cmp.present = true;
    if (cfg.p1_solver != Solver::heuristic) {
        const auto sub = p1_oracle_subsample(sc, cfg.oracle_max_rus, cfg.oracle_max_ues);
        cmp.sub_ues = static_cast<int>(sub.ues.size());
        cmp.sub_rus = static_cast<int>(sub.rus.size());
        const auto m = assoc::build_p1(sub);
        auto lc = cfg.lagrangian;
        lc.parallel = false;
        const auto h = lagrangian::run_algorithm1(m, lc);
        const auto e = assoc::solve_exact(m, {50'000'000, 1e9});
        cmp.p1_heuristic_rus = static_cast<int>(h.assignment.installed.size());
        cmp.p1_exact_rus = static_cast<int>(e.assignment.installed.size());
        cmp.p1_exact_proven = e.proven_optimal;
    }
    if (cfg.p2_solver != Solver::heuristic) {
        const auto m = p2_oracle_subsample(cfg, sc, a);
        const auto g = deploy::greedy_deploy(m);
        const auto e = deploy::solve_p2_exact_small(m, {20'000'000, 1e9});
        cmp.p2_rus = m.num_rus;
        cmp.p2_factor = deploy::approximation_factor(m);
        cmp.p2_exact_proven = e.proven_optimal;
        cmp.p2_feasible = g.feasible && e.plan.feasible;
        if (cmp.p2_feasible) {
            auto count = [](const deploy::DeploymentPlan& p) {
                return static_cast<int>(std::count(p.olt_on.begin(), p.olt_on.end(), 1));
            };
            cmp.p2_greedy_olts = count(g);
            cmp.p2_exact_olts = count(e.plan);
            cmp.p2_greedy_cost = cost::to_euros(cost::price_plan(m, g).total);
            cmp.p2_exact_cost = cost::to_euros(e.cost);
        }
    }
}

}  // namespace

namespace {

void run_stages(const ExperimentConfig& cfg, scenario::AreaClass area, double side, std::uint64_t seed, RunRecord& r) {
    r.area = scenario::to_string(area);
    r.side_km = side;
    r.seed = seed;
    r.solver = to_string(cfg.p1_solver) + "/" + to_string(cfg.p2_solver);
    r.config_hash = config_hash(cfg);
    const std::string id = instance_id(r.area, side, seed);

    const auto sc = scenario_for(cfg, area, side, seed);
    r.num_ues = static_cast<int>(sc.ues.size());
    r.num_candidates = static_cast<int>(sc.rus.size());

    const auto p1 = assoc::build_p1(sc);
    auto lc = cfg.lagrangian;
    lc.parallel = lc.parallel && !cfg.parallel;
    const auto lag = lagrangian::run_algorithm1(p1, lc);
    r.trace = lag.trace.iters;
    r.lag_lb = lag.best_lb;
    r.lag_ub = lag.best_ub;
    r.lag_iters = static_cast<int>(lag.trace.iters.size());
    r.lag_gap_bound = lag.trace.gap_bound;
    if (lag.status == assoc::SolveStatus::infeasible) {
        r.status = "infeasible: associate: no feasible association [" + id + "]";
        return;
    }
    if (!assoc::check_feasible(p1, lag.assignment).empty())
        throw std::logic_error("associate: assignment fails its own checker [" + id + "]");
    for (int b : lag.assignment.installed) ++r.rus[sc.rus[b].slice];

    deploy::P2Model m;
    try {
        m = deploy::build_p2(sc, lag.assignment, cfg.deploy, cfg.prices);
    } catch (const InfeasibleError& e) {
        r.status = std::string("infeasible: ") + e.what() + " [" + id + "]";
        return;
    }
    const auto plan = deploy::greedy_deploy(m);
    if (!plan.feasible) {
        r.status = "infeasible: deploy: " + plan.status + " [" + id + "]";
        return;
    }
    r.violations = static_cast<int>(deploy::check_plan(m, plan).size());
    if (r.violations > 0) throw std::logic_error("deploy: plan fails its own checker [" + id + "]");
    r.olts = static_cast<int>(std::count(plan.olt_on.begin(), plan.olt_on.end(), 1));
    r.stage2_olts = static_cast<int>(std::count(plan.q_on.begin(), plan.q_on.end(), 1));
    r.du_at_ru = static_cast<int>(std::count(plan.du_at_ru.begin(), plan.du_at_ru.end(), 1));
    latency_stats(m, plan, r);

    const auto twdm = cost::price_plan(m, plan);
    r.twdm_cost = cost::to_euros(twdm.total);
    r.twdm_fiber = cost::to_euros(twdm.fiber);
    r.twdm_servers = cost::to_euros(twdm.servers_install + twdm.servers_gops);
    const auto otn = cost::price_otn(m, plan, cfg.prices, cfg.otn);
    r.otn_feasible = otn.feasible;
    r.otn_cost = cost::to_euros(otn.cost.total);
    r.savings = r.otn_cost > 0 ? (r.otn_cost - r.twdm_cost) / r.otn_cost : 0.0;

    deploy::DeployConfig halved = cfg.deploy;
    halved.ru_server_gops = halved.olt_server_gops = halved.stage2_server_gops = cfg.halved_gops;
    halved.olt_du_share = cfg.halved_share;
    if (cfg.stage_study) {
        const auto mh = deploy::build_p2(sc, lag.assignment, halved, cfg.prices);
        const auto ph = deploy::greedy_deploy(mh);
        r.halved_feasible = ph.feasible;
        if (ph.feasible) {
            r.halved_cost = cost::to_euros(cost::price_plan(mh, ph).total);
            r.halved_stage2 = static_cast<int>(std::count(ph.q_on.begin(), ph.q_on.end(), 1));
        }
        deploy::DeployConfig single = cfg.deploy;
        single.allow_stage2 = false;
        const auto ms = deploy::build_p2(sc, lag.assignment, single, cfg.prices);
        const auto ps = deploy::greedy_deploy(ms);
        r.single_feasible = ps.feasible;
        if (ps.feasible) r.single_cost = cost::to_euros(cost::price_plan(ms, ps).total);
    }
    if (!cfg.scaling_n.empty()) {
        const auto base = deploy::build_p2(sc, lag.assignment, halved, cfg.prices);
        for (const auto& pt : cost::stage2_scaling(base, cfg.scaling_n, false)) {
            r.scaling_n.push_back(pt.n);
            r.scaling_cost.push_back(pt.feasible ? cost::to_euros(pt.cost.total) : -1.0);
        }
    }
    if (cfg.p1_solver != Solver::heuristic || cfg.p2_solver != Solver::heuristic)
        compare_on_subsample(cfg, sc, lag.assignment, r);

    r.feasible = true;
    r.status = "ok";
}

}  // namespace

RunRecord run_one(const ExperimentConfig& cfg, scenario::AreaClass area, double side, std::uint64_t seed) {
    RunRecord r;
    try {
        run_stages(cfg, area, side, seed, r);
    } catch (const InfeasibleError& e) {
        RunRecord clean;
        clean.area = r.area;
        clean.side_km = r.side_km;
        clean.seed = r.seed;
        clean.solver = r.solver;
        clean.config_hash = r.config_hash;
        r = std::move(clean);
        r.status = std::string("infeasible: ") + e.what() + " [" + instance_id(r.area, side, seed) + "]";
    }
    return r;
}

ResultBundle run_pipeline(const ExperimentConfig& cfg) {
    validate(cfg);
    struct Job {
        scenario::AreaClass area;
        double side;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (auto a : cfg.areas)
        for (double s : cfg.sides)
            for (auto seed : cfg.seeds) jobs.push_back({a, s, seed});
    ResultBundle out;
    out.config = cfg;
    out.runs.resize(jobs.size());
    std::vector<std::string> errors(jobs.size());
    auto job = [&](int i) {
        try {
            out.runs[i] = run_one(cfg, jobs[i].area, jobs[i].side, jobs[i].seed);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    if (cfg.parallel) kernels::for_each_index_parallel(static_cast<int>(jobs.size()), job);
    else kernels::for_each_index_serial(static_cast<int>(jobs.size()), job);
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);
    return out;
}

// ---------------------------------------------------------------- CSV

namespace {

struct Column {
    std::string name;
    std::function<std::string(const RunRecord&)> get;
    std::function<void(RunRecord&, const std::string&)> set;
};

double to_d(const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ParameterError("csv", "bad number '" + s + "'");
    return v;
}
long long to_i(const std::string& s) {
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ParameterError("csv", "bad integer '" + s + "'");
    return v;
}

template <class T>
Column num(std::string name, T RunRecord::*f) {
    return {std::move(name),
            [f](const RunRecord& r) {
                if constexpr (std::is_same_v<T, double>) return fmt(r.*f);
                else if constexpr (std::is_same_v<T, bool>) return std::string(r.*f ? "1" : "0");
                else return std::to_string(r.*f);
            },
            [f](RunRecord& r, const std::string& s) {
                if constexpr (std::is_same_v<T, double>) r.*f = to_d(s);
                else if constexpr (std::is_same_v<T, bool>) r.*f = s == "1";
                else r.*f = static_cast<T>(to_i(s));
            }};
}

Column text(std::string name, std::string RunRecord::*f) {
    return {std::move(name), [f](const RunRecord& r) { return r.*f; },
            [f](RunRecord& r, const std::string& s) { r.*f = s; }};
}

template <class T>
Column cmp_num(std::string name, T SolverComparison::*f) {
    return {std::move(name),
            [f](const RunRecord& r) {
                if constexpr (std::is_same_v<T, double>) return fmt(r.compare.*f);
                else if constexpr (std::is_same_v<T, bool>) return std::string(r.compare.*f ? "1" : "0");
                else return std::to_string(r.compare.*f);
            },
            [f](RunRecord& r, const std::string& s) {
                if constexpr (std::is_same_v<T, double>) r.compare.*f = to_d(s);
                else if constexpr (std::is_same_v<T, bool>) r.compare.*f = s == "1";
                else r.compare.*f = static_cast<T>(to_i(s));
            }};
}

void slice_cols(std::vector<Column>& cols, const std::string& prefix, SliceStats RunRecord::*f) {
    for (int s = 0; s < kSlices; ++s)
        cols.push_back({prefix + "_" + kSliceNames[s], [f, s](const RunRecord& r) { return fmt((r.*f)[s]); },
                        [f, s](RunRecord& r, const std::string& v) { (r.*f)[s] = to_d(v); }});
}

const std::vector<Column>& columns() {
    static const std::vector<Column> cols = [] {
        std::vector<Column> c;
        c.push_back(text("area", &RunRecord::area));
        c.push_back(num("side_km", &RunRecord::side_km));
        c.push_back(num("seed", &RunRecord::seed));
        c.push_back(text("solver", &RunRecord::solver));
        c.push_back(text("config_hash", &RunRecord::config_hash));
        c.push_back(text("status", &RunRecord::status));
        c.push_back(num("feasible", &RunRecord::feasible));
        c.push_back(num("num_ues", &RunRecord::num_ues));
        c.push_back(num("num_candidates", &RunRecord::num_candidates));
        for (int s = 0; s < kSlices; ++s)
            c.push_back({std::string("rus_") + kSliceNames[s], [s](const RunRecord& r) { return std::to_string(r.rus[s]); },
                         [s](RunRecord& r, const std::string& v) { r.rus[s] = static_cast<int>(to_i(v)); }});
        c.push_back(num("lag_lb", &RunRecord::lag_lb));
        c.push_back(num("lag_ub", &RunRecord::lag_ub));
        c.push_back(num("lag_iters", &RunRecord::lag_iters));
        c.push_back(num("lag_gap_bound", &RunRecord::lag_gap_bound));
        c.push_back(num("olts", &RunRecord::olts));
        c.push_back(num("stage2_olts", &RunRecord::stage2_olts));
        c.push_back(num("du_at_ru", &RunRecord::du_at_ru));
        c.push_back(num("violations", &RunRecord::violations));
        slice_cols(c, "fh_ul", &RunRecord::fh_ul);
        slice_cols(c, "fh_dl", &RunRecord::fh_dl);
        slice_cols(c, "mh_ul", &RunRecord::mh_ul);
        slice_cols(c, "mh_dl", &RunRecord::mh_dl);
        slice_cols(c, "bbu", &RunRecord::bbu);
        slice_cols(c, "fh_max", &RunRecord::fh_max);
        slice_cols(c, "mh_max", &RunRecord::mh_max);
        slice_cols(c, "bbu_max", &RunRecord::bbu_max);
        slice_cols(c, "fh_budget", &RunRecord::fh_budget);
        slice_cols(c, "mh_budget", &RunRecord::mh_budget);
        slice_cols(c, "bbu_budget", &RunRecord::bbu_budget);
        c.push_back(num("wait_gap_err", &RunRecord::wait_gap_err));
        c.push_back(num("twdm_cost", &RunRecord::twdm_cost));
        c.push_back(num("twdm_fiber", &RunRecord::twdm_fiber));
        c.push_back(num("twdm_servers", &RunRecord::twdm_servers));
        c.push_back(num("otn_feasible", &RunRecord::otn_feasible));
        c.push_back(num("otn_cost", &RunRecord::otn_cost));
        c.push_back(num("savings", &RunRecord::savings));
        c.push_back(num("halved_feasible", &RunRecord::halved_feasible));
        c.push_back(num("halved_cost", &RunRecord::halved_cost));
        c.push_back(num("halved_stage2", &RunRecord::halved_stage2));
        c.push_back(num("single_feasible", &RunRecord::single_feasible));
        c.push_back(num("single_cost", &RunRecord::single_cost));
        c.push_back({"scaling",
                     [](const RunRecord& r) {
                         std::string s;
                         for (std::size_t i = 0; i < r.scaling_n.size(); ++i) {
                             if (i) s += ';';
                             s += std::to_string(r.scaling_n[i]) + ':' + fmt(r.scaling_cost[i]);
                         }
                         return s;
                     },
                     [](RunRecord& r, const std::string& v) {
                         std::stringstream ss(v);
                         std::string item;
                         while (std::getline(ss, item, ';')) {
                             const auto colon = item.find(':');
                             if (colon == std::string::npos) throw ParameterError("csv", "bad scaling entry");
                             r.scaling_n.push_back(static_cast<int>(to_i(item.substr(0, colon))));
                             r.scaling_cost.push_back(to_d(item.substr(colon + 1)));
                         }
                     }});
        c.push_back(cmp_num("cmp_present", &SolverComparison::present));
        c.push_back(cmp_num("cmp_sub_ues", &SolverComparison::sub_ues));
        c.push_back(cmp_num("cmp_sub_rus", &SolverComparison::sub_rus));
        c.push_back(cmp_num("cmp_p1_heuristic_rus", &SolverComparison::p1_heuristic_rus));
        c.push_back(cmp_num("cmp_p1_exact_rus", &SolverComparison::p1_exact_rus));
        c.push_back(cmp_num("cmp_p1_exact_proven", &SolverComparison::p1_exact_proven));
        c.push_back(cmp_num("cmp_p2_rus", &SolverComparison::p2_rus));
        c.push_back(cmp_num("cmp_p2_feasible", &SolverComparison::p2_feasible));
        c.push_back(cmp_num("cmp_p2_greedy_olts", &SolverComparison::p2_greedy_olts));
        c.push_back(cmp_num("cmp_p2_exact_olts", &SolverComparison::p2_exact_olts));
        c.push_back(cmp_num("cmp_p2_greedy_cost", &SolverComparison::p2_greedy_cost));
        c.push_back(cmp_num("cmp_p2_exact_cost", &SolverComparison::p2_exact_cost));
        c.push_back(cmp_num("cmp_p2_factor", &SolverComparison::p2_factor));
        c.push_back(cmp_num("cmp_p2_exact_proven", &SolverComparison::p2_exact_proven));
        return c;
    }();
    return cols;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            row.push_back(cur);
            cur.clear();
        } else if (ch == '\n') {
            row.push_back(cur);
            cur.clear();
            rows.push_back(row);
            row.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty() || !row.empty()) {
        row.push_back(cur);
        rows.push_back(row);
    }
    return rows;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += csv_field(v[i]);
    }
    return s + "\n";
}

}  // namespace

std::vector<std::string> run_columns() {
    std::vector<std::string> names;
    for (const auto& c : columns()) names.push_back(c.name);
    return names;
}

std::string runs_csv(const std::vector<RunRecord>& runs) {
    std::string out = join(run_columns());
    for (const auto& r : runs) {
        std::vector<std::string> row;
        for (const auto& c : columns()) row.push_back(c.get(r));
        out += join(row);
    }
    return out;
}

std::vector<RunRecord> parse_runs_csv(const std::string& text) {
    const auto rows = csv_rows(text);
    if (rows.empty() || rows[0] != run_columns()) throw ParameterError("csv", "header does not match the run schema");
    std::vector<RunRecord> runs;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != columns().size()) throw ParameterError("csv", "row " + std::to_string(i) + " has the wrong width");
        RunRecord r;
        for (std::size_t k = 0; k < columns().size(); ++k) columns()[k].set(r, rows[i][k]);
        runs.push_back(std::move(r));
    }
    return runs;
}

// ---------------------------------------------------------------- emit

namespace {

struct Group {
    std::string area;
    double side = 0.0;
    std::vector<const RunRecord*> runs;
};

std::vector<Group> groups(const std::vector<RunRecord>& runs) {
    std::vector<Group> g;
    for (const auto& r : runs) {
        auto it = std::find_if(g.begin(), g.end(), [&](const Group& x) { return x.area == r.area && x.side == r.side_km; });
        if (it == g.end()) {
            g.push_back({r.area, r.side_km, {}});
            it = g.end() - 1;
        }
        it->runs.push_back(&r);
    }
    return g;
}

template <class F>
double group_mean(const Group& g, F f) {
    double s = 0.0;
    int n = 0;
    for (const auto* r : g.runs)
        if (r->feasible) {
            s += f(*r);
            ++n;
        }
    return mean(s, n);
}

}  // namespace

std::vector<std::string> emit(const ResultBundle& bundle, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    const auto& runs = bundle.runs;
    const auto gs = groups(runs);
    const std::string hash = config_hash(bundle.config);
    std::vector<std::pair<std::string, std::string>> files;
    Json schema;

    auto table = [&](const std::string& name, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
        std::string text = join(header);
        for (const auto& r : rows) text += join(r);
        files.emplace_back(name, text);
        schema[name] = header;
    };

    files.emplace_back("runs.csv", runs_csv(runs));
    schema["runs.csv"] = run_columns();

    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : runs)
            rows.push_back({r.area, fmt(r.side_km), std::to_string(r.seed), r.config_hash, std::to_string(r.rus[0]),
                            std::to_string(r.rus[1]), std::to_string(r.rus[2]),
                            r.compare.sub_rus ? std::to_string(r.compare.p1_heuristic_rus) : "",
                            r.compare.sub_rus ? std::to_string(r.compare.p1_exact_rus) : ""});
        table("fig5_ru_counts.csv",
              {"area", "side_km", "seed", "config_hash", "urllc", "embb", "mmtc", "subsample_heuristic", "subsample_exact"},
              rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& g : gs)
            for (int s = 0; s < kSlices; ++s)
                rows.push_back({g.area, fmt(g.side), kSliceNames[s], hash,
                                fmt(group_mean(g, [s](const RunRecord& r) { return r.fh_ul[s]; })),
                                fmt(group_mean(g, [s](const RunRecord& r) { return r.fh_dl[s]; })),
                                fmt(group_mean(g, [s](const RunRecord& r) { return r.mh_ul[s]; })),
                                fmt(group_mean(g, [s](const RunRecord& r) { return r.mh_dl[s]; }))});
        table("fig6_7_latency.csv",
              {"area", "side_km", "slice", "config_hash", "fh_ul", "fh_dl", "mh_ul", "mh_dl"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& g : gs)
            for (int s = 0; s < kSlices; ++s) {
                double worst = 0.0, budget = 0.0;
                for (const auto* r : g.runs) {
                    worst = std::max(worst, r->bbu_max[s]);
                    budget = std::max(budget, r->bbu_budget[s]);
                }
                rows.push_back({g.area, fmt(g.side), kSliceNames[s], hash,
                                fmt(group_mean(g, [s](const RunRecord& r) { return r.bbu[s]; })), fmt(worst), fmt(budget)});
            }
        table("fig8_bbu.csv", {"area", "side_km", "slice", "config_hash", "bbu_mean", "bbu_max", "bbu_budget"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& g : gs)
            rows.push_back({g.area, fmt(g.side), hash, fmt(group_mean(g, [](const RunRecord& r) { return r.twdm_cost; })),
                            fmt(group_mean(g, [](const RunRecord& r) { return r.otn_cost; })),
                            fmt(group_mean(g, [](const RunRecord& r) { return r.savings; })),
                            fmt(group_mean(g, [](const RunRecord& r) { return r.halved_cost; })),
                            fmt(group_mean(g, [](const RunRecord& r) { return r.single_cost; }))});
        table("fig10_cost.csv",
              {"area", "side_km", "config_hash", "twdm", "otn", "savings", "two_stage_halved", "single_stage_full"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& g : gs) {
            const auto& ns = bundle.config.scaling_n;
            for (std::size_t i = 0; i < ns.size(); ++i) {
                double s = 0.0;
                int n = 0;
                for (const auto* r : g.runs)
                    if (i < r->scaling_cost.size() && r->scaling_cost[i] >= 0) {
                        s += r->scaling_cost[i];
                        ++n;
                    }
                rows.push_back({g.area, fmt(g.side), hash, std::to_string(ns[i]), fmt(mean(s, n)), std::to_string(n)});
            }
        }
        table("fig8c_scaling.csv", {"area", "side_km", "config_hash", "n", "mean_cost", "feasible_runs"}, rows);
    }
    {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : runs)
            for (const auto& it : r.trace)
                rows.push_back({r.area, fmt(r.side_km), std::to_string(r.seed), r.config_hash, std::to_string(it.n),
                                fmt(it.lb), fmt(it.ub), fmt(it.best_lb), fmt(it.best_ub), fmt(it.lambda)});
        table("gap_trace.csv",
              {"area", "side_km", "seed", "config_hash", "iter", "lb", "ub", "best_lb", "best_ub", "lambda"}, rows);
    }
    {
        std::string text = gap_csv(compare_solvers(runs));
        files.emplace_back("compare.csv", text);
        schema["compare.csv"] = csv_rows(text).at(0);
    }

    Json summary;
    summary["config"] = to_json(bundle.config);
    summary["config"].erase("output_dir");
    summary["config_hash"] = hash;
    summary["runs"] = runs.size();
    int feasible = 0, embb = 0, cheaper = 0, halved_wins = 0, halved_pairs = 0;
    for (const auto& r : runs) {
        if (!r.feasible) continue;
        ++feasible;
        embb += embb_largest(r.rus);
        cheaper += r.otn_feasible && r.twdm_cost < r.otn_cost;
        if (r.halved_feasible && r.single_feasible) {
            ++halved_pairs;
            halved_wins += r.halved_cost < r.single_cost;
        }
    }
    summary["feasible_runs"] = feasible;
    summary["embb_largest_runs"] = embb;
    summary["twdm_cheaper_runs"] = cheaper;
    summary["halved_cheaper_runs"] = halved_wins;
    summary["halved_compared_runs"] = halved_pairs;
    summary["groups"] = Json::array();
    for (const auto& g : gs) {
        Json row;
        row["area"] = g.area;
        row["side_km"] = g.side;
        row["runs"] = g.runs.size();
        for (int s = 0; s < kSlices; ++s)
            row["rus_mean"][kSliceNames[s]] = group_mean(g, [s](const RunRecord& r) { return double(r.rus[s]); });
        row["twdm_mean"] = group_mean(g, [](const RunRecord& r) { return r.twdm_cost; });
        row["otn_mean"] = group_mean(g, [](const RunRecord& r) { return r.otn_cost; });
        row["savings_mean"] = group_mean(g, [](const RunRecord& r) { return r.savings; });
        summary["groups"].push_back(row);
    }
    files.emplace_back("summary.json", io::canonical(summary));
    schema["summary.json"] = "object";
    files.emplace_back("schema.json", io::canonical(schema));

    std::vector<std::string> names;
    for (const auto& [name, text] : files) {
        io::write_file((std::filesystem::path(dir) / name).string(), text);
        names.push_back(name);
    }
    return names;
}

std::vector<GapRow> compare_solvers(const std::vector<RunRecord>& runs) {
    std::vector<GapRow> out;
    for (const auto& r : runs) {
        if (!r.compare.present) continue;
        const auto& c = r.compare;
        GapRow g;
        g.area = r.area;
        g.side_km = r.side_km;
        g.seed = r.seed;
        g.ru_delta = c.p1_heuristic_rus - c.p1_exact_rus;
        g.factor = std::max(1.0, c.p2_factor);
        if (c.p2_feasible) {
            g.olt_delta = c.p2_greedy_olts - c.p2_exact_olts;
            g.cost_delta = c.p2_greedy_cost - c.p2_exact_cost;
            g.cost_ratio = c.p2_exact_cost > 0 ? c.p2_greedy_cost / c.p2_exact_cost : 1.0;
            g.factor_violated = g.cost_ratio > g.factor;
        }
        out.push_back(g);
    }
    return out;
}

std::string gap_csv(const std::vector<GapRow>& rows) {
    std::string out = join({"area", "side_km", "seed", "ru_delta", "olt_delta", "cost_delta", "cost_ratio", "factor",
                            "factor_violated"});
    for (const auto& g : rows)
        out += join({g.area, fmt(g.side_km), std::to_string(g.seed), std::to_string(g.ru_delta),
                     std::to_string(g.olt_delta), fmt(g.cost_delta), fmt(g.cost_ratio), fmt(g.factor),
                     g.factor_violated ? "1" : "0"});
    return out;
}

}  // namespace oran::report
