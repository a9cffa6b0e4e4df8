#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles/radio.hpp"
#include "oran/errors.hpp"
#include "oran/models.hpp"
#include "oran/rng.hpp"

using namespace oran;
using namespace oran::models;

namespace {

bool same4(double a, double b) { return std::abs(a - b) <= 5e-5 * std::abs(b); }

RadioConfig reference_radio() {
    RadioConfig c;
    c.carriers = 1;
    c.scaling = 1.0;
    c.mimo_layers = 4;
    c.modulation_order = 8;
    c.capability_mismatch = 1.0;
    c.max_code_rate = 0.92578;
    c.numerology = 1;
    c.prb_count = 273;
    c.overhead = 0.14;
    return c;
}

}  // namespace

TEST_CASE("peak radio throughput") {
    const auto c = reference_radio();
    const double ts = 1e-3 / 28.0;
    CHECK(symbol_duration(1) == doctest::Approx(35.714e-6).epsilon(1e-4));
    const double hand = 4 * 8 * 1.0 * 0.92578 * (12.0 * 273 / ts) * 0.86;
    CHECK(ru_max_throughput(c) == doctest::Approx(hand).epsilon(1e-12));
    CHECK(same4(ru_max_throughput(c), 2.337e9));

    auto half = c;
    half.mimo_layers = 2;
    CHECK(ru_max_throughput(half) == doctest::Approx(ru_max_throughput(c) / 2).epsilon(1e-15));

    auto more = c;
    more.prb_count = 274;
    CHECK(ru_max_throughput(more) > ru_max_throughput(c));

    auto a = c;
    a.scaling = 0.5;
    CHECK(ru_max_throughput(a) == doctest::Approx(ru_max_throughput(c) * 0.5).epsilon(1e-15));
    auto f = c;
    f.capability_mismatch = 0.25;
    CHECK(ru_max_throughput(f) == doctest::Approx(ru_max_throughput(c) * 0.25).epsilon(1e-15));
}

TEST_CASE("radio config validation names the field") {
    auto c = reference_radio();
    c.numerology = 7;
    try {
        (void)ru_max_throughput(c);
        FAIL("expected ParameterError");
    } catch (const ParameterError& e) {
        CHECK(e.field() == "numerology");
    }
    c = reference_radio();
    c.overhead = 1.5;
    CHECK_THROWS_AS((void)ru_max_throughput(c), ParameterError);
    c = reference_radio();
    c.tti = 0;
    CHECK_THROWS_AS((void)ru_max_throughput(c), ParameterError);
}

TEST_CASE("path loss") {
    CHECK(path_loss(CellKind::macro, 1.0) == doctest::Approx(128.1));
    CHECK(same4(path_loss(CellKind::macro, 2.0), 139.4187));
    CHECK(same4(path_loss(CellKind::small, 0.5), 27.9691));
    CHECK_THROWS_AS((void)path_loss(CellKind::macro, 0.0), DomainError);
    CHECK_THROWS_AS((void)path_loss(CellKind::small, -1.0), DomainError);

    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        double a = rng.uniform(1e-3, 10), b = rng.uniform(1e-3, 10);
        if (a > b) std::swap(a, b);
        if (a == b) continue;
        CHECK(path_loss(CellKind::macro, a) < path_loss(CellKind::macro, b));
        CHECK(path_loss(CellKind::small, a) < path_loss(CellKind::small, b));
    }
}

TEST_CASE("ue throughput") {
    // Signal equal to noise: SINR exactly 1.
    const double bw = 1e6;
    const double noise = -174.0;
    const double noise_total_dbm = noise + 10 * std::log10(bw);
    CHECK(ue_throughput(bw, noise_total_dbm + 50.0, noise, 50.0) == doctest::Approx(bw).epsilon(1e-9));

    CHECK(ue_throughput(100e6, 49, noise, 120) > ue_throughput(100e6, 46, noise, 120));
    CHECK(ue_throughput(100e6, 46, noise, 121) < ue_throughput(100e6, 46, noise, 120));

    const Interferer other{path_loss(CellKind::macro, 1.0), 46.0};
    const double got = ue_throughput(100e6, 46.0, noise, path_loss(CellKind::macro, 0.5), {&other, 1});
    const double want = oracle::shannon_rate(100e6, 46.0, noise, oracle::macro_loss(0.5), true, 46.0,
                                             oracle::macro_loss(1.0));
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("coverage distance") {
    CoverageQuery q{1.0};
    CHECK(max_coverage_distance(q) == doctest::Approx(1.0));

    // Small cells run out of link budget earlier; the bisection must be sound.
    CoverageQuery s{400e6};
    s.kind = CellKind::small;
    s.tx_power_dbm = -60;
    s.cap_km = 5.0;
    const double d = max_coverage_distance(s);
    CHECK(d < 5.0);
    auto rate = [&](double x) {
        return ue_throughput(s.bandwidth_hz, s.tx_power_dbm, s.noise_dbm_per_hz, path_loss(s.kind, x));
    };
    CHECK(rate(d) >= s.peak_rate);
    CHECK(rate(d + 2 * s.resolution_km) < s.peak_rate);

    double prev = 1e9;
    for (double r : {1e6, 1e8, 4e8, 8e8, 1.2e9}) {
        CoverageQuery m{r};
        m.kind = CellKind::small;
        m.tx_power_dbm = -60;
        m.cap_km = 5.0;
        const double dd = max_coverage_distance(m);
        CHECK(dd <= prev);
        prev = dd;
    }
    CoverageQuery impossible{1e15};
    CHECK_THROWS_AS((void)max_coverage_distance(impossible), InfeasibleError);
}

TEST_CASE("baseband compute") {
    ComputeSpec spec;
    CHECK(bbu_gops(spec) == doctest::Approx(320.0));
    spec.prb = 0;
    CHECK(bbu_gops(spec) == 0.0);

    const auto g = split_gops(1800.0, {});
    CHECK(g.ru == 720.0);
    CHECK(g.du == 900.0);
    CHECK(g.cu == 180.0);
    CHECK(g.ru + g.du + g.cu == 1800.0);
    const auto z = split_gops(0.0, {});
    CHECK((z.ru == 0.0 && z.du == 0.0 && z.cu == 0.0));
    const auto all = split_gops(777.0, {1.0, 0.0, 0.0});
    CHECK((all.ru == 777.0 && all.du == 0.0 && all.cu == 0.0));
    CHECK_THROWS_AS((void)split_gops(10.0, {0.5, 0.5, 0.5}), ParameterError);

    Rng rng(9);
    for (int i = 0; i < 500; ++i) {
        const double t = rng.uniform(0, 1e5);
        const auto s = split_gops(t, {});
        CHECK(s.ru + s.du + s.cu == t);
    }
}

TEST_CASE("ethernet bursts") {
    const auto b = burst_frames(1.111e9);
    CHECK(b.frames == 47);
    CHECK(same4(b.actual_rate, 1.1596e9));
    const auto z = burst_frames(0.0);
    CHECK((z.frames == 0 && z.actual_rate == 0.0));
    const EthernetModel eth;
    const auto one = burst_frames(eth.payload_bits / eth.burst_interval);
    CHECK(one.frames == 1);
    CHECK(one.actual_rate == doctest::Approx(eth.frame_bits / eth.burst_interval));

    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double r = rng.uniform(0, 2e10);
        const auto q = burst_frames(r);
        const double ideal = r * eth.frame_bits / eth.payload_bits;
        CHECK(q.actual_rate >= ideal - 1e-6 * ideal);
        CHECK(q.actual_rate - ideal <= eth.frame_bits / eth.burst_interval + 1e-6);
    }
}

TEST_CASE("unit helpers") {
    CHECK(fiber_delay(10.0) == doctest::Approx(50e-6));
    CHECK(air_delay(0.3) == doctest::Approx(1e-6));
    CHECK(mw_to_dbm(dbm_to_mw(13.0)) == doctest::Approx(13.0));
    CHECK(kAirSpeed > kFiberSpeed);
}
