#include "oran/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oran/errors.hpp"

namespace oran::models {

namespace {

void require(bool ok, const char* field, const char* what) {
    if (!ok) throw ParameterError(field, what);
}

bool is_fraction(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

void RadioConfig::validate() const {
    require(carriers >= 1, "carriers", "must be >= 1");
    require(is_fraction(scaling), "scaling", "must lie in [0,1]");
    require(mimo_layers >= 1, "mimo_layers", "must be >= 1");
    require(modulation_order >= 1, "modulation_order", "must be >= 1");
    require(is_fraction(capability_mismatch), "capability_mismatch", "must lie in [0,1]");
    require(is_fraction(max_code_rate), "max_code_rate", "must lie in [0,1]");
    require(numerology >= 0 && numerology <= 6, "numerology", "must lie in {0..6}");
    require(prb_count >= 1, "prb_count", "must be >= 1");
    require(is_fraction(overhead), "overhead", "must lie in [0,1]");
    require(tti > 0.0, "tti", "must be positive");
}

double symbol_duration(int numerology) {
    return 1e-3 / (14.0 * std::ldexp(1.0, numerology));
}

double ru_max_throughput(const RadioConfig& cfg) {
    cfg.validate();
    const double per_carrier = cfg.scaling * cfg.mimo_layers * cfg.modulation_order *
                               cfg.capability_mismatch * cfg.max_code_rate *
                               (12.0 * cfg.prb_count / symbol_duration(cfg.numerology)) *
                               (1.0 - cfg.overhead);
    return per_carrier * cfg.carriers;
}

double path_loss(CellKind kind, double d_km) {
    if (!(d_km > 0.0)) throw DomainError("path_loss: distance must be positive");
    switch (kind) {
        case CellKind::macro: return 128.1 + 37.6 * std::log10(d_km);
        case CellKind::small: return 37.0 + 30.0 * std::log10(d_km);
    }
    return 0.0;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double ue_throughput(double bandwidth_hz, double tx_power_dbm, double noise_dbm_per_hz,
                     double own_loss_db, std::span<const Interferer> interferers) {
    if (!(bandwidth_hz > 0.0)) throw ParameterError("bandwidth", "must be positive");
    const double signal = dbm_to_mw(tx_power_dbm - own_loss_db);
    double interference = 0.0;
    for (const auto& i : interferers) interference += dbm_to_mw(i.tx_power_dbm - i.loss_db);
    const double noise = dbm_to_mw(noise_dbm_per_hz) * bandwidth_hz;
    return bandwidth_hz * std::log2(1.0 + signal / (noise + interference));
}

double max_coverage_distance(const CoverageQuery& q) {
    if (!(q.cap_km > 0.0)) throw ParameterError("cap_km", "must be positive");
    if (!(q.resolution_km > 0.0)) throw ParameterError("resolution_km", "must be positive");
    auto rate_at = [&](double d) {
        return ue_throughput(q.bandwidth_hz, q.tx_power_dbm, q.noise_dbm_per_hz,
                             path_loss(q.kind, d));
    };
    if (rate_at(q.cap_km) >= q.peak_rate) return q.cap_km;
    double lo = q.resolution_km;
    if (rate_at(lo) < q.peak_rate)
        throw InfeasibleError("coverage", "peak rate " + std::to_string(q.peak_rate) +
                                              " bit/s unreachable at any distance");
    double hi = q.cap_km;
    // Throughput is strictly decreasing in distance: keep rate_at(lo) >= peak > rate_at(hi).
    while (hi - lo > q.resolution_km) {
        const double mid = 0.5 * (lo + hi);
        if (rate_at(mid) >= q.peak_rate) lo = mid;
        else hi = mid;
    }
    return lo;
}

double bbu_gops(const ComputeSpec& spec) {
    const double a = spec.antennas;
    return (3.0 * a + a * a + spec.modulation_bits * spec.code_rate * spec.layers / 3.0) *
           spec.prb / 10.0;
}

GopsSplit split_gops(double total, const SplitShares& shares) {
    const double sum = shares.ru + shares.du + shares.cu;
    if (shares.ru < 0 || shares.du < 0 || shares.cu < 0 || std::abs(sum - 1.0) > 1e-9)
        throw ParameterError("split_shares", "must be non-negative and sum to 1");
    GopsSplit out;
    out.ru = total * shares.ru;
    out.du = total * shares.du;
    // CU takes the remainder so the three parts add back to the total exactly.
    out.cu = total - (out.ru + out.du);
    return out;
}

Burst burst_frames(double rate, const EthernetModel& eth) {
    if (!(eth.payload_bits > 0.0) || eth.frame_bits < eth.payload_bits)
        throw ParameterError("ethernet", "need frame_bits >= payload_bits > 0");
    if (!(eth.burst_interval > 0.0)) throw ParameterError("burst_interval", "must be positive");
    if (rate < 0.0) throw ParameterError("rate", "must be non-negative");
    const double q = rate * eth.burst_interval / eth.payload_bits;
    const double rounded = std::nearbyint(q);
    // Absorb representation error at exact multiples of the payload.
    const double frames = std::abs(q - rounded) <= 1e-9 * std::max(1.0, q) ? rounded : std::ceil(q);
    Burst b;
    b.frames = static_cast<std::int64_t>(frames);
    b.actual_rate = static_cast<double>(b.frames) * eth.frame_bits / eth.burst_interval;
    return b;
}

}  // namespace oran::models
