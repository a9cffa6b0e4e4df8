#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles/p1_exhaustive.hpp"
#include "oran/assoc.hpp"
#include "oran/errors.hpp"
#include "oran/rng.hpp"
#include "support.hpp"

using namespace oran;
using namespace oran::assoc;
using testing_support::tiny_p1;

namespace {

scenario::Scenario one_ue(double x_ue, std::vector<scenario::Point> rus, double cov = 1.0) {
    scenario::Scenario sc;
    sc.slices = scenario::default_slices(scenario::AreaClass::urban);
    scenario::UE u;
    u.pos = {x_ue, 0};
    u.ul_demand = 10e6;
    u.dl_demand = 10e6;
    sc.ues.push_back(u);
    for (auto p : rus) {
        scenario::CandidateRU r;
        r.pos = p;
        r.coverage = cov;
        r.ul_cap = 28e9;
        r.dl_cap = 30e9;
        sc.rus.push_back(r);
    }
    return sc;
}

}  // namespace

TEST_CASE("eligibility mask") {
    const auto sc = one_ue(0.0, {{0.5, 0}});
    const auto m = build_p1(sc);
    CHECK(m.pairs.size() == 1);
    CHECK(m.pair_index(0, 0) == 0);

    const auto far = one_ue(0.0, {{1.5, 0}, {0, 2}});
    CHECK_THROWS_AS(build_p1(far), InfeasibleError);

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = tiny_p1(seed, 12, 6, 3);
        const auto mm = build_p1(s);
        for (int u = 0; u < 12; ++u)
            for (int b = 0; b < 6; ++b) {
                const bool e = s.rus[b].slice == s.ues[u].slice &&
                               scenario::distance(s.ues[u].pos, s.rus[b].pos) <= s.rus[b].coverage;
                CHECK((mm.pair_index(u, b) >= 0) == e);
            }
        auto serial = BuildOptions{};
        serial.parallel = false;
        const auto ms = build_p1(s, serial);
        CHECK(ms.pairs.size() == mm.pairs.size());
        for (std::size_t p = 0; p < ms.pairs.size(); ++p) {
            CHECK(ms.pairs[p].ru == mm.pairs[p].ru);
            CHECK(ms.pairs[p].c0 == mm.pairs[p].c0);
        }
    }
}

TEST_CASE("ota latency") {
    auto sc = one_ue(0.3, {{0, 0}});
    sc.ues[0].ul_demand = 10e6;
    const auto m = build_p1(sc);
    Assignment a{{0}, {0}, 0};
    const auto l = ota_latency(m, a, 0, 0);
    CHECK(l.ul == doctest::Approx(1e-6 + 10e6 * 0.5e-3 / 28e9).epsilon(1e-12));
    CHECK(l.ul == doctest::Approx(1.0002e-6).epsilon(1e-4));

    auto zero = one_ue(0.0, {{0, 0}});
    zero.ues[0].ul_demand = zero.ues[0].dl_demand = 0;
    const auto mz = build_p1(zero);
    const auto lz = ota_latency(mz, a, 0, 0);
    CHECK(lz.ul == 0.0);
    CHECK(lz.dl == 0.0);

    auto two = one_ue(0.3, {{0, 0}});
    two.ues.push_back(two.ues[0]);
    const auto m2 = build_p1(two);
    Assignment a2{{0, 0}, {0}, 0};
    const auto l2 = ota_latency(m2, a2, 0, 0);
    CHECK(l2.ul > l.ul);
    CHECK(l2.dl > l.dl);
}

TEST_CASE("exact solver on forced structures") {
    const auto sc = one_ue(0.2, {{0, 0}, {0.5, 0}});
    const auto m = build_p1(sc);
    const auto r = solve_exact(m);
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.proven_optimal);
    CHECK(r.assignment.installed.size() == 1);
    CHECK(r.assignment.attach[0] == 0);
    const auto lat = ota_latency(m, r.assignment, 0, 0);
    CHECK(r.assignment.objective == doctest::Approx(m.alpha + m.beta * (lat.ul + lat.dl)).epsilon(1e-12));

    // Two UEs each needing 60% of the OTA budget: capacity alone would fit on one RU.
    auto tight = one_ue(0.1, {{0, 0}, {0.2, 0}});
    tight.ues.push_back(tight.ues[0]);
    const double budget = tight.slices[0].ota_budget;
    for (auto& u : tight.ues) u.ul_demand = 0.6 * budget * 28e9 / 0.5e-3;
    const auto mt = build_p1(tight);
    const auto rt = solve_exact(mt);
    CHECK(rt.status == SolveStatus::optimal);
    CHECK(rt.assignment.installed.size() == 2);
    const auto ex = oracle::p1_exhaustive(tight);
    CHECK(ex.installed.size() == 2);
}

TEST_CASE("exact solver matches exhaustive enumeration") {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const int nu = 3 + static_cast<int>(seed % 6);
        const int nb = 2 + static_cast<int>(seed % 3);
        const auto sc = tiny_p1(seed, nu, nb, 1 + static_cast<int>(seed % 2), 1.5e9);
        const auto m = build_p1(sc);
        const auto r = solve_exact(m);
        const auto ex = oracle::p1_exhaustive(sc);
        CAPTURE(seed);
        REQUIRE(ex.feasible == (r.status == SolveStatus::optimal));
        if (!ex.feasible) {
            CHECK(r.status == SolveStatus::infeasible);
            continue;
        }
        CHECK(r.assignment.objective == doctest::Approx(ex.objective).epsilon(1e-9));
        CHECK(r.assignment.installed == ex.installed);
        CHECK(check_feasible(m, r.assignment).empty());
        // Recomputation from raw scenario data.
        CHECK(oracle::p1_objective_literal(sc, r.assignment.attach) ==
              doctest::Approx(r.assignment.objective).epsilon(1e-9));
        CHECK(objective(m, to_variables(m, r.assignment)) ==
              doctest::Approx(r.assignment.objective).epsilon(1e-9));
    }
}

TEST_CASE("latency term does not change the optimal RU count") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const auto sc = tiny_p1(seed, 7, 3, 1, 1.5e9);
        const auto ex = oracle::p1_exhaustive(sc);
        if (!ex.feasible) continue;
        // Minimum RU count alone, by enumeration.
        const int nu = 7, nb = 3;
        std::vector<int> attach(nu, 0);
        int best = nb + 1;
        for (;;) {
            if (oracle::p1_feasible_literal(sc, attach)) {
                std::vector<char> used(nb, 0);
                for (int b : attach) used[b] = 1;
                int c = 0;
                for (char x : used) c += x;
                best = std::min(best, c);
            }
            int i = 0;
            while (i < nu && ++attach[i] == nb) attach[i++] = 0;
            if (i == nu) break;
        }
        CHECK(static_cast<int>(ex.installed.size()) == best);
    }
}

TEST_CASE("exact solver determinism and limits") {
    const auto sc = tiny_p1(77, 30, 8, 3, 2e9);
    const auto m = build_p1(sc);
    const auto a = solve_exact(m);
    const auto b = solve_exact(m);
    CHECK(a.assignment.attach == b.assignment.attach);
    CHECK(a.nodes == b.nodes);

    ExactLimits lim;
    lim.max_nodes = 3;
    const auto c = solve_exact(m, lim);
    CHECK_FALSE(c.proven_optimal);
    CHECK((c.status == SolveStatus::unknown || c.status == SolveStatus::feasible));
    if (c.status == SolveStatus::feasible) CHECK(check_feasible(m, c.assignment).empty());
}

TEST_CASE("relaxation bound") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto sc = tiny_p1(seed, 6, 3, 1, 1.5e9);
        const auto m = build_p1(sc);
        const auto r = solve_exact(m);
        const auto lb = lp_lower_bound(m);
        if (r.status != SolveStatus::optimal) continue;
        REQUIRE(lb.solved);
        CHECK(lb.objective <= r.assignment.objective + 1e-12);
    }
    // Forced instance: every UE has exactly one eligible RU.
    scenario::Scenario sc;
    sc.slices = scenario::default_slices(scenario::AreaClass::urban);
    for (int b = 0; b < 3; ++b) {
        scenario::CandidateRU r;
        r.pos = {b * 2.0, 0};
        r.coverage = 0.5;
        r.ul_cap = 28e9;
        r.dl_cap = 30e9;
        sc.rus.push_back(r);
        for (int k = 0; k < 2; ++k) {
            scenario::UE u;
            u.pos = {b * 2.0 + 0.1 * k, 0.1};
            u.ul_demand = 20e6;
            u.dl_demand = 40e6;
            sc.ues.push_back(u);
        }
    }
    const auto m = build_p1(sc);
    const auto ex = solve_exact(m);
    const auto lb = lp_lower_bound(m);
    CHECK(lb.objective == doctest::Approx(ex.assignment.objective).epsilon(1e-9));
}

TEST_CASE("violation report") {
    const auto sc = tiny_p1(5, 6, 3, 1, 3e9);
    const auto m = build_p1(sc);
    const auto r = solve_exact(m);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(check_feasible(m, r.assignment).empty());

    auto v = to_variables(m, r.assignment);
    // Attach UE 0 a second time to an installed RU that covers it.
    for (int p = m.ue_begin[0]; p < m.ue_begin[1]; ++p) {
        const int b = m.pairs[p].ru;
        if (b == r.assignment.attach[0]) continue;
        auto w = v;
        w.theta[b] = 1;
        w.x.emplace_back(0, b);
        int single = 0;
        for (const auto& viol : check_feasible(m, w)) single += viol.family == "single_association";
        CHECK(single == 1);
    }
}

TEST_CASE("mutations flag the mutated family") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto sc = tiny_p1(seed, 8, 4, 1, 3e9);
        const auto m = build_p1(sc);
        const auto r = solve_exact(m);
        if (r.status != SolveStatus::optimal) continue;
        const auto base = to_variables(m, r.assignment);
        auto has = [&](const P1Variables& v, const std::string& fam) {
            for (const auto& x : check_feasible(m, v))
                if (x.family == fam) return true;
            return false;
        };
        // Drop an attachment.
        auto drop = base;
        drop.x.erase(drop.x.begin());
        CHECK(has(drop, "single_association"));
        // Close an RU that serves someone.
        auto close = base;
        close.theta[base.x[0].second] = 0;
        CHECK(has(close, "installation"));
        // Move a UE to an RU that does not cover it, if one exists.
        for (int b = 0; b < m.num_rus; ++b) {
            if (m.pair_index(base.x[0].first, b) >= 0) continue;
            auto move = base;
            move.x[0].second = b;
            move.theta[b] = 1;
            CHECK(has(move, "coverage"));
            break;
        }
        // Overload one RU with everyone.
        auto pile = base;
        const int b0 = base.x[0].second;
        for (auto& [u, b] : pile.x) b = b0;
        double ul = 0.0;
        for (int u = 0; u < m.num_ues; ++u) ul += m.ue_ul[u] * m.tti / m.ru_ul_cap[b0];
        if (ul > m.slice_budget[0]) CHECK(has(pile, "ota_uplink"));
        ++checked;
    }
    CHECK(checked > 10);
}
