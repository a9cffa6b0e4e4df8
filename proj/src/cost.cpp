#include "oran/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "oran/errors.hpp"
#include "oran/kernels.hpp"

namespace oran::cost {

namespace {

void check_book(const PriceBook& b) {
    const double f[] = {b.olt, b.onu, b.splitter, b.fiber_material_per_km, b.fiber_install_per_km,
                        b.server_install, b.per_gops, b.roadm, b.eswitch, b.stage2_olt_factor,
                        b.stage2_onu_factor};
    for (double v : f)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("price_book", "prices must be non-negative");
}

void add_servers(const deploy::P2Model& m, const deploy::DeploymentPlan& p, const PriceBook& book,
                 CostBreakdown& c) {
    const Cents install = to_cents(book.server_install);
    for (int o = 0; o < m.num_olts; ++o) {
        if (!p.olt_on[o]) continue;
        c.servers_install += install;
        c.servers_gops += to_cents(book.per_gops * m.G_o);
    }
    for (int q = 0; q < m.num_q; ++q) {
        if (!p.q_on[q]) continue;
        c.servers_install += install;
        c.servers_gops += to_cents(book.per_gops * m.G_q);
    }
    for (int b = 0; b < m.num_rus; ++b) {
        if (p.olt_of_ru[b] < 0 || !p.du_at_ru[b]) continue;
        c.servers_install += install;
        c.servers_gops += to_cents(book.per_gops * m.G_b);
    }
}

}  // namespace

CostBreakdown price_plan(const deploy::P2Model& m, const deploy::DeploymentPlan& p, const PriceBook& book) {
    check_book(book);
    CostBreakdown c;
    for (int o = 0; o < m.num_olts; ++o) {
        if (!p.olt_on[o]) continue;
        c.olt_onu += to_cents(book.olt);
        c.splitters += to_cents(book.splitter);
        c.fiber += fiber_cents(book, deploy::rho_stage1(m, p, o));
        if (p.q_of_olt[o] >= 0) c.olt_onu += to_cents(book.onu * book.stage2_onu_factor);
    }
    for (int b = 0; b < m.num_rus; ++b)
        if (p.olt_of_ru[b] >= 0) c.olt_onu += to_cents(book.onu);
    for (int q = 0; q < m.num_q; ++q) {
        if (!p.q_on[q]) continue;
        c.olt_onu += to_cents(book.olt * book.stage2_olt_factor);
        c.splitters += to_cents(book.splitter);
        c.fiber += fiber_cents(book, deploy::rho_stage2(m, p, q));
    }
    add_servers(m, p, book, c);
    c.total = c.sum_of_parts();
    return c;
}

namespace {

struct Flow {
    int from = 0;
    int to = 0;
    std::array<double, 2> rate{};
    double bound = 0.0;
};

class Mesh {
public:
    explicit Mesh(std::vector<scenario::Point> nodes) : nodes_(std::move(nodes)), adj_(nodes_.size()) {}

    int size() const { return static_cast<int>(nodes_.size()); }
    double dist(int a, int b) const { return scenario::distance(nodes_[a], nodes_[b]); }

    int link(int a, int b) {
        if (a > b) std::swap(a, b);
        const auto key = std::make_pair(a, b);
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        const int id = static_cast<int>(links_.size());
        links_.push_back({a, b, dist(a, b), 1, 0.0});
        load_.push_back({0.0, 0.0});
        index_.emplace(key, id);
        adj_[a].push_back(id);
        adj_[b].push_back(id);
        return id;
    }

    bool has_link(int a, int b) const { return index_.count({std::min(a, b), std::max(a, b)}) > 0; }

    // Shortest path by length; ties broken by node index. Returns link ids.
    std::vector<int> route(int s, int t) const {
        const int n = size();
        std::vector<double> d(n, std::numeric_limits<double>::infinity());
        std::vector<int> via(n, -1);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        d[s] = 0.0;
        pq.push({0.0, s});
        while (!pq.empty()) {
            const auto [du, u] = pq.top();
            pq.pop();
            if (du > d[u]) continue;
            if (u == t) break;
            for (int id : adj_[u]) {
                const auto& l = links_[id];
                const int v = l.a == u ? l.b : l.a;
                const double nd = du + l.km;
                if (nd < d[v]) {
                    d[v] = nd;
                    via[v] = id;
                    pq.push({nd, v});
                }
            }
        }
        std::vector<int> path;
        if (s == t) return path;
        if (via[t] < 0) return {-1};
        for (int v = t; v != s;) {
            const int id = via[v];
            path.push_back(id);
            v = links_[id].a == v ? links_[id].b : links_[id].a;
        }
        std::reverse(path.begin(), path.end());
        return path;
    }

    double path_km(const std::vector<int>& path) const {
        double km = 0.0;
        for (int id : path) km += links_[id].km;
        return km;
    }

    void carry(const std::vector<int>& path, const std::array<double, 2>& rate) {
        for (int id : path)
            for (int d = 0; d < 2; ++d) load_[id][d] += rate[d];
    }

    std::vector<OtnLink> finish(double capacity) {
        for (std::size_t i = 0; i < links_.size(); ++i) {
            const double load = std::max(load_[i][0], load_[i][1]);
            links_[i].load = load;
            links_[i].fibers = std::max(1, static_cast<int>(std::ceil(load / capacity - 1e-12)));
        }
        return links_;
    }

private:
    std::vector<scenario::Point> nodes_;
    std::vector<std::vector<int>> adj_;
    std::vector<OtnLink> links_;
    std::vector<std::array<double, 2>> load_;
    std::map<std::pair<int, int>, int> index_;
};

int node_of(std::vector<scenario::Point>& nodes, scenario::Point p) {
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
        if (nodes[i].x == p.x && nodes[i].y == p.y) return i;
    nodes.push_back(p);
    return static_cast<int>(nodes.size()) - 1;
}

}  // namespace

OtnResult price_otn(const deploy::P2Model& m, const deploy::DeploymentPlan& p, const PriceBook& book,
                    const OtnOptions& opt) {
    check_book(book);
    if (!(opt.link_capacity > 0)) throw ParameterError("link_capacity", "must be positive");
    if (opt.knn < 0) throw ParameterError("knn", "must be non-negative");
    if (opt.hop_latency < 0) throw ParameterError("hop_latency", "must be non-negative");
    OtnResult res;

    std::vector<scenario::Point> nodes;
    std::vector<int> ru_node(m.num_rus, -1), olt_node(m.num_olts, -1), q_node(m.num_q, -1);
    for (int b = 0; b < m.num_rus; ++b)
        if (p.olt_of_ru[b] >= 0) ru_node[b] = node_of(nodes, m.ru_pos[b]);
    for (int o = 0; o < m.num_olts; ++o)
        if (p.olt_on[o]) olt_node[o] = node_of(nodes, m.olt_pos[o]);
    for (int q = 0; q < m.num_q; ++q)
        if (p.q_on[q]) q_node[q] = node_of(nodes, m.q_pos[q]);

    std::vector<Flow> flows;
    for (int b = 0; b < m.num_rus; ++b) {
        const int o = p.olt_of_ru[b];
        if (o < 0) continue;
        const int s = m.ru_slice[b];
        const int cu = p.cu[o][s];
        const int cu_node = cu >= 0 ? q_node[cu] : olt_node[o];
        if (p.du_at_ru[b]) {
            flows.push_back({ru_node[b], cu_node, m.U[b], m.mh_budget[s]});
        } else {
            flows.push_back({ru_node[b], olt_node[o], m.V[b], m.fh_budget[s]});
            if (cu >= 0) flows.push_back({olt_node[o], cu_node, m.U[b], m.mh_budget[s]});
        }
    }

    Mesh mesh(nodes);
    const int n = mesh.size();
    // Minimum spanning tree (Prim, ties by index).
    if (n > 1) {
        std::vector<double> key(n, std::numeric_limits<double>::infinity());
        std::vector<int> parent(n, -1);
        std::vector<char> in(n, 0);
        key[0] = 0.0;
        for (int it = 0; it < n; ++it) {
            int u = -1;
            for (int v = 0; v < n; ++v)
                if (!in[v] && (u < 0 || key[v] < key[u])) u = v;
            in[u] = 1;
            if (parent[u] >= 0) mesh.link(parent[u], u);
            for (int v = 0; v < n; ++v) {
                if (in[v]) continue;
                const double d = mesh.dist(u, v);
                if (d < key[v]) {
                    key[v] = d;
                    parent[v] = u;
                }
            }
        }
    }
    for (int u = 0; u < n; ++u) {
        std::vector<int> others;
        for (int v = 0; v < n; ++v)
            if (v != u) others.push_back(v);
        std::sort(others.begin(), others.end(), [&](int a, int b) {
            const double da = mesh.dist(u, a), db = mesh.dist(u, b);
            return da != db ? da < db : a < b;
        });
        for (int k = 0; k < opt.knn && k < static_cast<int>(others.size()); ++k) mesh.link(u, others[k]);
    }

    auto latency = [&](double km, std::size_t hops) {
        return models::fiber_delay(km) + opt.hop_latency * static_cast<double>(hops);
    };
    res.feasible = true;
    for (const auto& f : flows) {
        auto path = mesh.route(f.from, f.to);
        double lat = path.empty() ? 0.0 : latency(mesh.path_km(path), path.size());
        if (lat > f.bound + assoc::kLatencyTol) {
            if (!mesh.has_link(f.from, f.to)) ++res.direct_links;
            path = {mesh.link(f.from, f.to)};
            lat = latency(mesh.path_km(path), 1);
            if (lat > f.bound + assoc::kLatencyTol) {
                res.feasible = false;
                std::ostringstream os;
                os << "infeasible: direct OTN path " << f.from << "-" << f.to << " exceeds its budget";
                res.status = os.str();
            }
        }
        res.max_path_latency = std::max(res.max_path_latency, lat);
        mesh.carry(path, f.rate);
    }
    if (res.feasible) res.status = "feasible";

    res.links = mesh.finish(opt.link_capacity);
    res.nodes = nodes;
    CostBreakdown& c = res.cost;
    const Cents per_node = book.otn_price_is_pair ? to_cents(book.roadm) : to_cents(book.roadm) + to_cents(book.eswitch);
    c.switching = per_node * static_cast<Cents>(n);
    for (const auto& l : res.links) c.fiber += fiber_cents(book, l.km * l.fibers);
    add_servers(m, p, book, c);
    c.total = c.sum_of_parts();
    return res;
}

deploy::P2Model scaled_model(const deploy::P2Model& base, int n) {
    if (n < 1) throw ParameterError("N", "must be at least 1");
    deploy::P2Model m = base;
    m.R2 = n * base.R1;
    m.prices.stage2_olt_factor = base.prices.stage2_olt_factor * n;
    m.prices.stage2_onu_factor = base.prices.stage2_onu_factor * n;
    return m;
}

std::vector<ScalingPoint> stage2_scaling(const deploy::P2Model& base, std::span<const int> n_values, bool parallel) {
    for (int n : n_values)
        if (n < 1) throw ParameterError("N", "must be at least 1");
    std::vector<ScalingPoint> out(n_values.size());
    auto job = [&](int i) {
        const auto m = scaled_model(base, n_values[i]);
        ScalingPoint& pt = out[i];
        pt.n = n_values[i];
        pt.plan = deploy::greedy_deploy(m);
        pt.feasible = pt.plan.feasible;
        if (pt.feasible) pt.cost = price_plan(m, pt.plan, m.prices);
    };
    const int count = static_cast<int>(n_values.size());
    if (parallel) kernels::for_each_index_parallel(count, job);
    else kernels::for_each_index_serial(count, job);
    return out;
}

}  // namespace oran::cost
