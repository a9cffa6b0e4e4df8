#include "oran/kernels.hpp"

#include <algorithm>
#include <exception>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oran::kernels {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

std::vector<assoc::Pair> pairs_of(const scenario::Scenario& sc, int u, double air_speed) {
    const auto& ue = sc.ues[u];
    std::vector<assoc::Pair> out;
    for (int b = 0; b < static_cast<int>(sc.rus.size()); ++b) {
        const auto& ru = sc.rus[b];
        if (ru.slice != ue.slice) continue;
        const double d = scenario::distance(ue.pos, ru.pos);
        if (d > ru.coverage) continue;
        assoc::Pair p;
        p.ue = u;
        p.ru = b;
        p.dist = d;
        p.prop = d * 1000.0 / air_speed;
        p.ul = ue.ul_demand * sc.tti / ru.ul_cap;
        p.dl = ue.dl_demand * sc.tti / ru.dl_cap;
        out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](const assoc::Pair& a, const assoc::Pair& b) {
        return a.dist != b.dist ? a.dist < b.dist : a.ru < b.ru;
    });
    return out;
}

}  // namespace

PairLists eligible_pairs_serial(const scenario::Scenario& sc, double air_speed) {
    PairLists out(sc.ues.size());
    for (int u = 0; u < static_cast<int>(sc.ues.size()); ++u) out[u] = pairs_of(sc, u, air_speed);
    return out;
}

PairLists eligible_pairs_parallel(const scenario::Scenario& sc, double air_speed) {
    const int n = static_cast<int>(sc.ues.size());
    PairLists out(n);
#pragma omp parallel for schedule(static)
    for (int u = 0; u < n; ++u) out[u] = pairs_of(sc, u, air_speed);
    return out;
}

double r1_scan_ru(const R1ScanInput& in, int b, std::span<std::uint8_t> x) {
    const auto& m = *in.model;
    const int begin = m.ru_begin[b];
    const int end = m.ru_begin[b + 1];
    double value = m.alpha;
    if (!in.enforce_latency) {
        for (int k = begin; k < end; ++k) {
            const int p = m.ru_pairs[k];
            const auto& pr = m.pairs[p];
            const double c = m.beta * pr.c0 - in.nu[pr.ue];
            if (c < 0) {
                value += c;
                x[p] = 1;
            } else {
                x[p] = 0;
            }
        }
    } else {
        // Fractional knapsack on the summed UL+DL airtime with capacity 2 * budget.
        const double budget = m.ru_slice.empty() ? 0.0 : m.slice_budget[m.ru_slice[b]];
        struct Item {
            int p;
            double c;
            double w;
        };
        std::vector<Item> items;
        for (int k = begin; k < end; ++k) {
            const int p = m.ru_pairs[k];
            x[p] = 0;
            const auto& pr = m.pairs[p];
            const double c = m.beta * pr.c0 - in.nu[pr.ue];
            if (c >= 0) continue;
            if (pr.prop + pr.ul > budget + assoc::kLatencyTol ||
                pr.prop + pr.dl > budget + assoc::kLatencyTol)
                continue;
            items.push_back({p, c, pr.ul + pr.dl});
        }
        std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
            // Most negative cost per unit of airtime first; zero weight first of all.
            const double ra = a.c * b.w;
            const double rb = b.c * a.w;
            return ra != rb ? ra < rb : a.p < b.p;
        });
        double room = 2.0 * budget;
        bool integral = true;
        for (const auto& it : items) {
            if (it.w <= room) {
                room -= it.w;
                value += it.c;
                if (integral) x[it.p] = 1;
            } else {
                if (room > 0 && it.w > 0) value += it.c * (room / it.w);
                room = 0;
                integral = false;
            }
        }
    }
    if (value >= 0) {
        for (int k = begin; k < end; ++k) x[m.ru_pairs[k]] = 0;
    }
    return value;
}

void r1_scan_serial(const R1ScanInput& in, std::span<std::uint8_t> x, std::span<double> value) {
    for (int b = 0; b < in.model->num_rus; ++b) value[b] = r1_scan_ru(in, b, x);
}

void r1_scan_parallel(const R1ScanInput& in, std::span<std::uint8_t> x, std::span<double> value) {
    const int n = in.model->num_rus;
#pragma omp parallel for schedule(dynamic, 4)
    for (int b = 0; b < n; ++b) value[b] = r1_scan_ru(in, b, x);
}

void for_each_index_serial(int n, const std::function<void(int)>& job) {
    for (int i = 0; i < n; ++i) job(i);
}

void for_each_index_parallel(int n, const std::function<void(int)>& job) {
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        try {
            job(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace oran::kernels
