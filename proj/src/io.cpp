#include "oran/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oran/errors.hpp"

namespace oran::io {

using namespace scenario;

namespace {

Json point(Point p) { return Json::array({p.x, p.y}); }
Point point_from(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

Json range(Range r) { return Json::array({r.lo, r.hi}); }
Range range_from(const Json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

Json slice_json(const SliceSpec& s) {
    return {{"id", to_string(s.id)},      {"share", s.share},
            {"ul_mbps", range(s.ul_mbps)}, {"dl_mbps", range(s.dl_mbps)},
            {"ota_budget", s.ota_budget}, {"mh_budget", s.mh_budget},
            {"fh_budget", s.fh_budget},   {"bbu_budget", s.bbu_budget}};
}

void slice_apply(const Json& j, SliceSpec& s) {
    if (j.contains("share")) s.share = j["share"].get<double>();
    if (j.contains("ul_mbps")) s.ul_mbps = range_from(j["ul_mbps"]);
    if (j.contains("dl_mbps")) s.dl_mbps = range_from(j["dl_mbps"]);
    if (j.contains("ota_budget")) s.ota_budget = j["ota_budget"].get<double>();
    if (j.contains("mh_budget")) s.mh_budget = j["mh_budget"].get<double>();
    if (j.contains("fh_budget")) s.fh_budget = j["fh_budget"].get<double>();
    if (j.contains("bbu_budget")) s.bbu_budget = j["bbu_budget"].get<double>();
}

std::string kind_name(models::CellKind k) { return k == models::CellKind::macro ? "macro" : "small"; }
models::CellKind kind_from(const std::string& s) {
    if (s == "macro") return models::CellKind::macro;
    if (s == "small") return models::CellKind::small;
    throw ParameterError("kind", "unknown cell kind '" + s + "'");
}

}  // namespace

Json to_json(const Scenario& sc) {
    Json j;
    j["area"] = to_string(sc.area);
    j["side_km"] = sc.side_km;
    j["seed"] = sc.seed;
    j["tti"] = sc.tti;
    j["slices"] = Json::array();
    for (const auto& s : sc.slices) j["slices"].push_back(slice_json(s));
    j["profile"] = sc.profile;
    j["ues"] = Json::array();
    for (const auto& u : sc.ues)
        j["ues"].push_back({{"pos", point(u.pos)},
                            {"slice", u.slice},
                            {"ul", u.ul_demand},
                            {"dl", u.dl_demand},
                            {"activity", u.activity}});
    j["rus"] = Json::array();
    for (const auto& r : sc.rus)
        j["rus"].push_back({{"pos", point(r.pos)},
                            {"slice", r.slice},
                            {"kind", kind_name(r.kind)},
                            {"coverage", r.coverage},
                            {"ul_cap", r.ul_cap},
                            {"dl_cap", r.dl_cap},
                            {"fh", Json::array({r.fh_ul, r.fh_dl})},
                            {"mh", Json::array({r.mh_ul, r.mh_dl})},
                            {"gops", Json::array({r.eta, r.du, r.cu})}});
    Json sites;
    sites["stage1_olts"] = Json::array();
    for (auto p : sc.sites.stage1_olts) sites["stage1_olts"].push_back(point(p));
    sites["stage2_olts"] = Json::array();
    for (auto p : sc.sites.stage2_olts) sites["stage2_olts"].push_back(point(p));
    sites["reach_stage1"] = sc.sites.reach_stage1;
    sites["reach_stage2"] = sc.sites.reach_stage2;
    j["sites"] = sites;
    return j;
}

Scenario scenario_from_json(const Json& j) {
    Scenario sc;
    sc.area = area_class_from_string(j.at("area").get<std::string>());
    sc.side_km = j.at("side_km").get<double>();
    sc.seed = j.at("seed").get<std::uint64_t>();
    sc.tti = j.at("tti").get<double>();
    const auto& sl = j.at("slices");
    if (sl.size() != kSliceCount) throw ParameterError("slices", "expected three slices");
    for (int s = 0; s < kSliceCount; ++s) {
        sc.slices[s].id = static_cast<SliceId>(s);
        slice_apply(sl[s], sc.slices[s]);
    }
    const auto& pr = j.at("profile");
    if (pr.size() != kHours) throw ParameterError("profile", "expected 24 values");
    for (int h = 0; h < kHours; ++h) sc.profile[h] = pr[h].get<double>();
    for (const auto& u : j.at("ues")) {
        UE ue;
        ue.pos = point_from(u.at("pos"));
        ue.slice = u.at("slice").get<int>();
        ue.ul_demand = u.at("ul").get<double>();
        ue.dl_demand = u.at("dl").get<double>();
        ue.activity = u.at("activity").get<std::uint32_t>();
        sc.ues.push_back(ue);
    }
    for (const auto& r : j.at("rus")) {
        CandidateRU ru;
        ru.pos = point_from(r.at("pos"));
        ru.slice = r.at("slice").get<int>();
        ru.kind = kind_from(r.at("kind").get<std::string>());
        ru.coverage = r.at("coverage").get<double>();
        ru.ul_cap = r.at("ul_cap").get<double>();
        ru.dl_cap = r.at("dl_cap").get<double>();
        ru.fh_ul = r.at("fh").at(0).get<double>();
        ru.fh_dl = r.at("fh").at(1).get<double>();
        ru.mh_ul = r.at("mh").at(0).get<double>();
        ru.mh_dl = r.at("mh").at(1).get<double>();
        ru.eta = r.at("gops").at(0).get<double>();
        ru.du = r.at("gops").at(1).get<double>();
        ru.cu = r.at("gops").at(2).get<double>();
        sc.rus.push_back(ru);
    }
    const auto& st = j.at("sites");
    for (const auto& p : st.at("stage1_olts")) sc.sites.stage1_olts.push_back(point_from(p));
    for (const auto& p : st.at("stage2_olts")) sc.sites.stage2_olts.push_back(point_from(p));
    sc.sites.reach_stage1 = st.at("reach_stage1").get<double>();
    sc.sites.reach_stage2 = st.at("reach_stage2").get<double>();
    return sc;
}

Json to_json(const assoc::P1Model& m, const assoc::Assignment& a) {
    Json j;
    j["objective"] = a.objective;
    j["installed"] = a.installed;
    j["attach"] = Json::array();
    for (int u = 0; u < static_cast<int>(a.attach.size()); ++u) {
        const int b = a.attach[u];
        Json row{{"ue", u}, {"ru", b}};
        if (b >= 0) {
            const auto lat = assoc::ota_latency(m, a, u, b);
            row["ota_ul"] = lat.ul;
            row["ota_dl"] = lat.dl;
        }
        j["attach"].push_back(row);
    }
    return j;
}

assoc::Assignment assignment_from_json(const Json& j) {
    assoc::Assignment a;
    a.objective = j.at("objective").get<double>();
    a.installed = j.at("installed").get<std::vector<int>>();
    for (const auto& row : j.at("attach")) {
        const int u = row.at("ue").get<int>();
        if (u >= static_cast<int>(a.attach.size())) a.attach.resize(u + 1, -1);
        a.attach[u] = row.at("ru").get<int>();
    }
    return a;
}

Json dump_model(const assoc::P1Model& m) {
    Json j;
    j["alpha"] = m.alpha;
    j["beta"] = m.beta;
    j["tti"] = m.tti;
    j["num_ues"] = m.num_ues;
    j["num_rus"] = m.num_rus;
    j["ue_slice"] = m.ue_slice;
    j["ru_slice"] = m.ru_slice;
    j["slice_budget"] = m.slice_budget;
    j["slice_ues"] = m.slice_ues;
    j["pairs"] = Json::array();
    for (const auto& p : m.pairs)
        j["pairs"].push_back(Json::array({p.ue, p.ru, p.dist, p.prop, p.ul, p.dl, p.c0}));
    j["pair_columns"] = {"ue", "ru", "dist_km", "prop_s", "ul_s", "dl_s", "c0"};
    return j;
}

Json to_json(const deploy::P2Model& m, const deploy::DeploymentPlan& src) {
    deploy::DeploymentPlan p = src;
    if (p.feasible) deploy::annotate(m, p);
    Json j;
    j["feasible"] = p.feasible;
    j["status"] = p.status;
    j["rus"] = Json::array();
    for (int b = 0; b < m.num_rus; ++b) {
        Json row{{"ru", m.ru_id[b]}, {"slice", m.ru_slice[b]}, {"olt", p.olt_of_ru[b]}, {"du_at_ru", p.du_at_ru[b] != 0}};
        if (p.olt_of_ru[b] >= 0 && b < static_cast<int>(p.stage1_lat.size())) {
            row["stage1_ul"] = p.stage1_lat[b][0];
            row["stage1_dl"] = p.stage1_lat[b][1];
            row["stage1_bound"] = deploy::stage1_bound(m, p, b);
            row["bbu_ratio"] = p.proc[b][0];
        }
        j["rus"].push_back(row);
    }
    j["olts"] = Json::array();
    for (int o = 0; o < m.num_olts; ++o) {
        if (!p.olt_on[o]) continue;
        Json row{{"olt", o}, {"pos", point(m.olt_pos[o])}, {"stage2", p.q_of_olt[o]}, {"cu", p.cu[o]}};
        if (o < static_cast<int>(p.rho_o.size())) row["fiber_km"] = p.rho_o[o];
        if (p.q_of_olt[o] >= 0 && o < static_cast<int>(p.stage2_lat.size())) {
            row["stage2_ul"] = p.stage2_lat[o][0];
            row["stage2_dl"] = p.stage2_lat[o][1];
        }
        j["olts"].push_back(row);
    }
    j["stage2"] = Json::array();
    for (int q = 0; q < m.num_q; ++q) {
        if (!p.q_on[q]) continue;
        Json row{{"q", q}, {"pos", point(m.q_pos[q])}};
        if (q < static_cast<int>(p.rho_q.size())) row["fiber_km"] = p.rho_q[q];
        j["stage2"].push_back(row);
    }
    return j;
}

deploy::DeploymentPlan plan_from_json(const deploy::P2Model& m, const Json& j) {
    auto p = deploy::empty_plan(m);
    p.feasible = j.at("feasible").get<bool>();
    p.status = j.at("status").get<std::string>();
    const auto& rus = j.at("rus");
    if (static_cast<int>(rus.size()) != m.num_rus) throw ParameterError("plan", "RU count does not match the model");
    for (int b = 0; b < m.num_rus; ++b) {
        const int o = rus[b].at("olt").get<int>();
        if (o >= m.num_olts) throw ParameterError("plan", "OLT index out of range");
        p.olt_of_ru[b] = o;
        p.du_at_ru[b] = rus[b].at("du_at_ru").get<bool>() ? 1 : 0;
        if (o >= 0) p.olt_on[o] = 1;
    }
    for (const auto& row : j.at("olts")) {
        const int o = row.at("olt").get<int>();
        if (o < 0 || o >= m.num_olts) throw ParameterError("plan", "OLT index out of range");
        const int q = row.at("stage2").get<int>();
        if (q >= m.num_q) throw ParameterError("plan", "Stage-II index out of range");
        p.q_of_olt[o] = q;
        if (q >= 0) p.q_on[q] = 1;
        p.cu[o] = row.at("cu").get<std::array<int, deploy::kSlices>>();
    }
    return p;
}

Json dump_model(const deploy::P2Model& m) {
    Json j;
    j["num_rus"] = m.num_rus;
    j["num_olts"] = m.num_olts;
    j["num_stage2"] = m.num_q;
    j["ru_id"] = m.ru_id;
    j["ru_slice"] = m.ru_slice;
    j["U"] = m.U;
    j["V"] = m.V;
    j["eta"] = m.eta;
    j["du"] = m.du;
    j["cu"] = m.cu;
    j["d_ru_rn1"] = m.d_ru_rn1;
    j["d_rn1_olt"] = m.d_rn1_olt;
    j["reach1"] = m.reach1;
    j["d_olt_rn2"] = m.d_olt_rn2;
    j["d_rn2_stage2"] = m.d_rn2_q;
    j["reach2"] = m.reach2;
    j["capacity"] = {{"R1", m.R1}, {"R2", m.R2}, {"H", m.H},       {"GD_b", m.GD_b}, {"GD_o", m.GD_o},
                     {"GC_o", m.GC_o}, {"GC_q", m.GC_q}, {"G_b", m.G_b}, {"G_o", m.G_o},   {"G_q", m.G_q}};
    j["wait"] = {m.wait1, m.wait2};
    j["tti"] = m.tti;
    j["fh_budget"] = m.fh_budget;
    j["mh_budget"] = m.mh_budget;
    j["bbu_budget"] = m.bbu_budget;
    j["splitter_cap"] = m.splitter_cap;
    j["allow_stage2"] = m.allow_stage2;
    j["prices"] = to_json(m.prices);
    return j;
}

Json to_json(const cost::CostBreakdown& c) {
    using cost::to_euros;
    return {{"olt_onu", to_euros(c.olt_onu)},
            {"fiber", to_euros(c.fiber)},
            {"splitters", to_euros(c.splitters)},
            {"servers_install", to_euros(c.servers_install)},
            {"servers_gops", to_euros(c.servers_gops)},
            {"switching", to_euros(c.switching)},
            {"total", to_euros(c.total)}};
}

Json to_json(const cost::OtnResult& r) {
    Json j;
    j["feasible"] = r.feasible;
    j["status"] = r.status;
    j["cost"] = to_json(r.cost);
    j["nodes"] = Json::array();
    for (auto p : r.nodes) j["nodes"].push_back(point(p));
    j["links"] = Json::array();
    for (const auto& l : r.links) j["links"].push_back({{"a", l.a}, {"b", l.b}, {"km", l.km}, {"fibers", l.fibers}, {"load", l.load}});
    j["direct_links"] = r.direct_links;
    j["max_path_latency"] = r.max_path_latency;
    return j;
}

Json to_json(const cost::PriceBook& b) {
    return {{"olt", b.olt},
            {"onu", b.onu},
            {"splitter", b.splitter},
            {"fiber_material_per_km", b.fiber_material_per_km},
            {"fiber_install_per_km", b.fiber_install_per_km},
            {"server_install", b.server_install},
            {"per_gops", b.per_gops},
            {"roadm", b.roadm},
            {"eswitch", b.eswitch},
            {"otn_price_is_pair", b.otn_price_is_pair},
            {"stage2_olt_factor", b.stage2_olt_factor},
            {"stage2_onu_factor", b.stage2_onu_factor}};
}

cost::PriceBook price_book_from_json(const Json& j, cost::PriceBook b) {
    for (const auto& [k, v] : j.items()) {
        if (k == "olt") b.olt = v.get<double>();
        else if (k == "onu") b.onu = v.get<double>();
        else if (k == "splitter") b.splitter = v.get<double>();
        else if (k == "fiber_material_per_km") b.fiber_material_per_km = v.get<double>();
        else if (k == "fiber_install_per_km") b.fiber_install_per_km = v.get<double>();
        else if (k == "server_install") b.server_install = v.get<double>();
        else if (k == "per_gops") b.per_gops = v.get<double>();
        else if (k == "roadm") b.roadm = v.get<double>();
        else if (k == "eswitch") b.eswitch = v.get<double>();
        else if (k == "otn_price_is_pair") b.otn_price_is_pair = v.get<bool>();
        else if (k == "stage2_olt_factor") b.stage2_olt_factor = v.get<double>();
        else if (k == "stage2_onu_factor") b.stage2_onu_factor = v.get<double>();
        else throw ParameterError("prices." + k, "unknown key");
    }
    return b;
}

Json to_json(const deploy::DeployConfig& c) {
    return {{"stage1_rate", c.stage1_rate},
            {"stage2_rate", c.stage2_rate},
            {"stage1_wait", c.stage1_wait},
            {"stage2_wait", c.stage2_wait},
            {"ru_proc_gops", c.ru_proc_gops},
            {"ru_server_gops", c.ru_server_gops},
            {"olt_server_gops", c.olt_server_gops},
            {"stage2_server_gops", c.stage2_server_gops},
            {"olt_du_share", c.olt_du_share},
            {"splitter_cap", c.splitter_cap},
            {"allow_stage2", c.allow_stage2},
            {"bbu_override", c.bbu_override}};
}

deploy::DeployConfig deploy_config_from_json(const Json& j, deploy::DeployConfig c) {
    for (const auto& [k, v] : j.items()) {
        if (k == "stage1_rate") c.stage1_rate = v.get<double>();
        else if (k == "stage2_rate") c.stage2_rate = v.get<double>();
        else if (k == "stage1_wait") c.stage1_wait = v.get<double>();
        else if (k == "stage2_wait") c.stage2_wait = v.get<double>();
        else if (k == "ru_proc_gops") c.ru_proc_gops = v.get<double>();
        else if (k == "ru_server_gops") c.ru_server_gops = v.get<double>();
        else if (k == "olt_server_gops") c.olt_server_gops = v.get<double>();
        else if (k == "stage2_server_gops") c.stage2_server_gops = v.get<double>();
        else if (k == "olt_du_share") c.olt_du_share = v.get<double>();
        else if (k == "splitter_cap") c.splitter_cap = v.get<int>();
        else if (k == "allow_stage2") c.allow_stage2 = v.get<bool>();
        else if (k == "bbu_override") c.bbu_override = v.get<std::array<double, deploy::kSlices>>();
        else throw ParameterError("deploy." + k, "unknown key");
    }
    return c;
}

Json to_json(const GenerationConfig& cfg) {
    Json j;
    j["area"] = to_string(cfg.area);
    j["side_km"] = cfg.side_km;
    j["seed"] = cfg.seed;
    j["ue_density"] = cfg.ue_density;
    j["ru_density"] = cfg.ru_density;
    j["stage2_area_per_site"] = cfg.stage2_area_per_site;
    j["coverage_cap"] = cfg.coverage_cap;
    j["coverage_floor"] = cfg.coverage_floor;
    j["jitter"] = cfg.jitter;
    j["placement"] = cfg.placement == Placement::uniform ? "uniform" : "clustered";
    j["clusters_per_km2"] = cfg.clusters_per_km2;
    j["cluster_radius"] = cfg.cluster_radius;
    j["demand"] = cfg.demand == DemandDraw::uniform ? "uniform" : (cfg.demand == DemandDraw::low ? "low" : "high");
    j["slices"] = Json::array();
    for (const auto& s : cfg.slices) j["slices"].push_back(slice_json(s));
    j["profile"] = cfg.profile;
    j["reach_stage1"] = cfg.reach_stage1;
    j["reach_stage2"] = cfg.reach_stage2;
    const auto& r = cfg.ru;
    j["ru"] = {{"ul_cap", r.ul_cap},
               {"dl_cap", r.dl_cap},
               {"fh", Json::array({r.fh_ul, r.fh_dl})},
               {"mh", Json::array({r.mh_ul, r.mh_dl})},
               {"gops_total", r.gops_total},
               {"shares", Json::array({r.shares.ru, r.shares.du, r.shares.cu})},
               {"macro_tx_dbm", r.macro_tx_dbm},
               {"small_tx_dbm", r.small_tx_dbm},
               {"bandwidth_hz", r.bandwidth_hz},
               {"noise_dbm_per_hz", r.noise_dbm_per_hz}};
    return j;
}

GenerationConfig generation_from_json(const Json& j, GenerationConfig c) {
    auto get = [&](const char* k, auto& dst) {
        if (j.contains(k)) dst = j[k].get<std::decay_t<decltype(dst)>>();
    };
    if (j.contains("area")) {
        const auto area = area_class_from_string(j["area"].get<std::string>());
        if (area != c.area) {
            // Class change resets class-dependent defaults before the explicit keys land.
            const auto fresh = default_config(area, c.side_km, c.seed);
            c.area = area;
            c.slices = fresh.slices;
            c.profile = fresh.profile;
        }
    }
    get("side_km", c.side_km);
    get("seed", c.seed);
    get("ue_density", c.ue_density);
    get("ru_density", c.ru_density);
    get("stage2_area_per_site", c.stage2_area_per_site);
    get("coverage_cap", c.coverage_cap);
    get("coverage_floor", c.coverage_floor);
    get("jitter", c.jitter);
    get("clusters_per_km2", c.clusters_per_km2);
    get("cluster_radius", c.cluster_radius);
    get("reach_stage1", c.reach_stage1);
    get("reach_stage2", c.reach_stage2);
    if (j.contains("placement")) {
        const auto p = j["placement"].get<std::string>();
        if (p == "uniform") c.placement = Placement::uniform;
        else if (p == "clustered") c.placement = Placement::clustered;
        else throw ParameterError("placement", "unknown value '" + p + "'");
    }
    if (j.contains("demand")) {
        const auto d = j["demand"].get<std::string>();
        if (d == "uniform") c.demand = DemandDraw::uniform;
        else if (d == "low") c.demand = DemandDraw::low;
        else if (d == "high") c.demand = DemandDraw::high;
        else throw ParameterError("demand", "unknown value '" + d + "'");
    }
    if (j.contains("slices")) {
        const auto& sl = j["slices"];
        if (sl.size() != kSliceCount) throw ParameterError("slices", "expected three slices");
        for (int s = 0; s < kSliceCount; ++s) slice_apply(sl[s], c.slices[s]);
    }
    if (j.contains("profile")) {
        const auto& pr = j["profile"];
        if (pr.size() != kHours) throw ParameterError("profile", "expected 24 values");
        for (int h = 0; h < kHours; ++h) c.profile[h] = pr[h].get<double>();
    }
    if (j.contains("ru")) {
        const auto& r = j["ru"];
        auto& d = c.ru;
        if (r.contains("ul_cap")) d.ul_cap = r["ul_cap"].get<double>();
        if (r.contains("dl_cap")) d.dl_cap = r["dl_cap"].get<double>();
        if (r.contains("fh")) {
            d.fh_ul = r["fh"].at(0).get<double>();
            d.fh_dl = r["fh"].at(1).get<double>();
        }
        if (r.contains("mh")) {
            d.mh_ul = r["mh"].at(0).get<double>();
            d.mh_dl = r["mh"].at(1).get<double>();
        }
        if (r.contains("gops_total")) d.gops_total = r["gops_total"].get<double>();
        if (r.contains("shares")) d.shares = {r["shares"].at(0).get<double>(), r["shares"].at(1).get<double>(),
                                              r["shares"].at(2).get<double>()};
        if (r.contains("macro_tx_dbm")) d.macro_tx_dbm = r["macro_tx_dbm"].get<double>();
        if (r.contains("small_tx_dbm")) d.small_tx_dbm = r["small_tx_dbm"].get<double>();
        if (r.contains("bandwidth_hz")) d.bandwidth_hz = r["bandwidth_hz"].get<double>();
        if (r.contains("noise_dbm_per_hz")) d.noise_dbm_per_hz = r["noise_dbm_per_hz"].get<double>();
    }
    return c;
}

std::string canonical(const Json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace oran::io
