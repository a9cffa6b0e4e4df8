#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles/p1_exhaustive.hpp"
#include "oracles/r1_exhaustive.hpp"
#include "oran/assoc.hpp"
#include "oran/lagrangian.hpp"
#include "oran/rng.hpp"
#include "support.hpp"

using namespace oran;
using namespace oran::assoc;
using namespace oran::lagrangian;
using testing_support::tiny_p1;

TEST_CASE("subproblem with zero multipliers") {
    const auto sc = tiny_p1(3, 8, 4, 2);
    const auto m = build_p1(sc);
    std::vector<double> nu(m.num_ues, 0.0);
    const auto r = solve_r1(m, nu);
    for (auto t : r.theta) CHECK(t == 0);
    for (auto x : r.x) CHECK(x == 0);
    CHECK(r.lb == 0.0);
    CHECK(r.ops == static_cast<std::int64_t>(m.pairs.size()) + m.num_rus);
}

TEST_CASE("subproblem with one large multiplier") {
    const auto sc = tiny_p1(4, 1, 3, 1);
    const auto m = build_p1(sc);
    std::vector<double> nu{1e6};
    const auto r = solve_r1(m, nu);
    for (int p = m.ue_begin[0]; p < m.ue_begin[1]; ++p) {
        CHECK(r.x[p] == 1);
        CHECK(r.theta[m.pairs[p].ru] == 1);
    }
}

TEST_CASE("subproblem matches the exhaustive relaxed minimum") {
    Rng rng(17);
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto sc = tiny_p1(seed, 5, 3, 1 + static_cast<int>(seed % 2));
        const auto m = build_p1(sc);
        std::vector<double> nu(m.num_ues);
        for (auto& v : nu) v = rng.uniform(-0.1, 0.6);
        const auto r = solve_r1(m, nu);
        CAPTURE(seed);
        CHECK(r.lb == doctest::Approx(oracle::r1_exhaustive(sc, nu)).epsilon(1e-12));
        R1Options serial;
        serial.parallel = false;
        const auto s = solve_r1(m, nu, serial);
        CHECK(s.lb == r.lb);
        CHECK(s.x == r.x);
    }
}

TEST_CASE("weak duality against the exact optimum") {
    Rng rng(23);
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto sc = tiny_p1(seed, 7, 3, 1, 1.5e9);
        const auto m = build_p1(sc);
        const auto ex = solve_exact(m);
        if (ex.status != SolveStatus::optimal) continue;
        for (int k = 0; k < 20; ++k) {
            std::vector<double> nu(m.num_ues);
            for (auto& v : nu) v = rng.uniform(-1, 3);
            for (bool lat : {false, true}) {
                R1Options o;
                o.enforce_latency = lat;
                CHECK(solve_r1(m, nu, o).lb <= ex.assignment.objective + 1e-12);
            }
        }
    }
}

TEST_CASE("repair") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto sc = tiny_p1(seed, 15, 6, 3, 3e9);
        const auto m = build_p1(sc);
        std::vector<std::uint8_t> all(m.num_rus, 1), none(m.num_rus, 0);
        const auto r = repair_ub(m, all);
        if (r.feasible) {
            CHECK(check_feasible(m, r.assignment).empty());
        }
        CHECK_FALSE(repair_ub(m, none).feasible);
    }
    // Light load with everything open: each UE lands on its lowest-latency RU.
    auto sc = tiny_p1(9, 6, 4, 1, 1e12);
    const auto m = build_p1(sc);
    std::vector<std::uint8_t> all(m.num_rus, 1);
    const auto r = repair_ub(m, all);
    REQUIRE(r.feasible);
    for (int u = 0; u < m.num_ues; ++u) CHECK(r.assignment.attach[u] == m.pairs[m.ue_begin[u]].ru);
}

TEST_CASE("subgradient step") {
    const auto sc = tiny_p1(2, 4, 2, 1);
    const auto m = build_p1(sc);
    std::vector<std::uint8_t> x(m.pairs.size(), 0);
    for (int u = 0; u < m.num_ues; ++u) x[m.ue_begin[u]] = 1;
    std::vector<double> nu{0.1, 0.2, 0.3, 0.4};
    auto before = nu;
    subgradient_step(m, nu, x, 1.0, 0.0, 2.0);
    CHECK(nu == before);

    x[m.ue_begin[2]] = 0;  // UE 2 uncovered
    const auto sigma = subgradient_step(m, nu, x, 1.0, 0.0, 2.0);
    CHECK(nu[2] == doctest::Approx(before[2] + 2.0));
    CHECK(sigma[0] == doctest::Approx(2.0));
    CHECK(nu[0] == before[0]);

    if (m.ue_begin[1] - m.ue_begin[0] >= 2) {
        auto y = x;
        y[m.ue_begin[2]] = 1;
        y[m.ue_begin[0] + 1] = 1;  // UE 0 covered twice
        auto nu2 = before;
        subgradient_step(m, nu2, y, 1.0, 0.0, 2.0);
        CHECK(nu2[0] < before[0]);
    }
}

TEST_CASE("gap bound expression") {
    GapTrace t;
    IterRecord r;
    r.step_term = 0.3;
    t.iters.push_back(r);
    CHECK(gap_bound(t, 1.0, 7.0) == doctest::Approx((1 + 0.09) / ((2.0 / 7.0) * 0.3)));
    GapTrace big;
    for (double s : {10.0, 100.0, 1000.0}) {
        GapTrace g;
        IterRecord q;
        q.step_term = s;
        g.iters.push_back(q);
        const double v = gap_bound(g, 1.0, 4.0);
        CHECK(v == doctest::Approx(2.0 * s + 2.0 / s));
    }
    CHECK(std::isinf(gap_bound(GapTrace{}, 1.0, 3.0)));
}

TEST_CASE("forced instance converges at once") {
    scenario::Scenario sc;
    sc.slices = scenario::default_slices(scenario::AreaClass::urban);
    for (int b = 0; b < 3; ++b) {
        scenario::CandidateRU r;
        r.pos = {b * 3.0, 0};
        r.coverage = 0.5;
        r.ul_cap = 28e9;
        r.dl_cap = 30e9;
        sc.rus.push_back(r);
        scenario::UE u;
        u.pos = {b * 3.0 + 0.2, 0};
        u.ul_demand = u.dl_demand = 50e6;
        sc.ues.push_back(u);
    }
    const auto m = build_p1(sc);
    const auto res = run_algorithm1(m);
    const auto ex = solve_exact(m);
    CHECK(res.trace.iters.size() <= 2);
    CHECK(res.assignment.objective == doctest::Approx(ex.assignment.objective));
}

TEST_CASE("algorithm quality on small random instances") {
    int within = 0, exact_match = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto sc = tiny_p1(seed, 6, 3, 1, 3e9);
        const auto m = build_p1(sc);
        const auto ex = solve_exact(m);
        if (ex.status != SolveStatus::optimal) continue;
        const auto res = run_algorithm1(m);
        REQUIRE(res.status == SolveStatus::feasible);
        ++total;
        CHECK(res.assignment.objective >= ex.assignment.objective - 1e-12);
        CHECK(check_feasible(m, res.assignment).empty());
        within += res.assignment.installed.size() <= ex.assignment.installed.size() + 1;
        exact_match += res.assignment.installed == ex.assignment.installed;
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& it : res.trace.iters) {
            CHECK(it.best_ub <= prev);
            prev = it.best_ub;
            CHECK(it.lb <= it.best_ub + 1e-12);
        }
        CHECK(res.best_ub - res.best_lb <= res.trace.gap_bound);
    }
    CHECK(total >= 50);
    CHECK(within >= 0.9 * total);
    CHECK(exact_match >= 1);
}

TEST_CASE("seed repair falls back to search on a tight packing") {
    const auto sc = tiny_p1(45, 11, 4, 1, 3e9);
    const auto m = build_p1(sc);
    const auto ex = solve_exact(m);
    REQUIRE(ex.status == SolveStatus::optimal);
    const std::vector<std::uint8_t> all(m.num_rus, 1);
    const auto searched = repair_search(m, all, 200000);
    REQUIRE(searched.feasible);
    CHECK(check_feasible(m, searched.assignment).empty());
    Config c;
    c.search_nodes = 0;
    const auto without = run_algorithm1(m, c);
    const auto with = run_algorithm1(m);
    REQUIRE(with.status == SolveStatus::feasible);
    CHECK(check_feasible(m, with.assignment).empty());
    CHECK(with.assignment.objective <= without.assignment.objective + 1e-12);
}
