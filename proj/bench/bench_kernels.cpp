// Serial vs OpenMP timings of the data-parallel kernels on generated scenarios.
// Usage: bench_kernels [reps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "oran/assoc.hpp"
#include "oran/kernels.hpp"
#include "oran/scenario.hpp"

using namespace oran;

namespace {

template <class F>
double best_ms(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel, bool same) {
    std::printf("%-28s %10.3f %10.3f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
                same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 5;
    if (reps < 1) throw std::invalid_argument("reps must be positive");
    std::printf("threads: %d, best of %d\n", kernels::max_threads(), reps);
    std::printf("%-28s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");
    bool all_same = true;

    for (double side : {1.0, 2.0}) {
        const auto sc = scenario::generate(scenario::default_config(scenario::AreaClass::industrial, side, 1));
        char label[64];

        kernels::PairLists ps, pp;
        const double es = best_ms(reps, [&] { ps = kernels::eligible_pairs_serial(sc, 3e8); });
        const double ep = best_ms(reps, [&] { pp = kernels::eligible_pairs_parallel(sc, 3e8); });
        bool same = ps.size() == pp.size();
        for (std::size_t u = 0; same && u < ps.size(); ++u) {
            same = ps[u].size() == pp[u].size();
            for (std::size_t k = 0; same && k < ps[u].size(); ++k) same = ps[u][k].ru == pp[u][k].ru;
        }
        std::snprintf(label, sizeof label, "eligible_pairs %gx%g km", side, side);
        row(label, es, ep, same);
        all_same = all_same && same;

        const auto m = assoc::build_p1(sc, {3e8, false});
        std::vector<double> nu(m.num_ues, 0.5);
        kernels::R1ScanInput in{&m, nu, true};
        std::vector<std::uint8_t> xs(m.pairs.size()), xp(m.pairs.size());
        std::vector<double> vs(m.num_rus), vp(m.num_rus);
        const double rs = best_ms(reps, [&] { kernels::r1_scan_serial(in, xs, vs); });
        const double rp = best_ms(reps, [&] { kernels::r1_scan_parallel(in, xp, vp); });
        same = xs == xp && vs == vp;
        std::snprintf(label, sizeof label, "r1_scan %gx%g km", side, side);
        row(label, rs, rp, same);
        all_same = all_same && same;
    }

    const int jobs = 8;
    std::vector<std::size_t> out_s(jobs), out_p(jobs);
    auto job = [](std::vector<std::size_t>& out) {
        return [&out](int i) {
            const auto sc = scenario::generate(scenario::default_config(scenario::AreaClass::urban, 1.0, i + 1));
            out[i] = sc.ues.size() * 1000 + sc.rus.size();
        };
    };
    const double fs = best_ms(1, [&] { kernels::for_each_index_serial(jobs, job(out_s)); });
    const double fp = best_ms(1, [&] { kernels::for_each_index_parallel(jobs, job(out_p)); });
    row("for_each_index (8 scenarios)", fs, fp, out_s == out_p);
    all_same = all_same && out_s == out_p;
    return all_same ? 0 : 1;
}
