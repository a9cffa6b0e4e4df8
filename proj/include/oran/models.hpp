#pragma once

// Physical-layer, framing and compute models shared by the planners.
// Units: distances in km unless noted, rates in bit/s, time in seconds,
// powers in dBm, compute in GOPS per TTI.

#include <array>
#include <cstdint>
#include <span>

namespace oran::models {

inline constexpr double kFiberSpeed = 2e8;  // m/s
inline constexpr double kAirSpeed = 3e8;    // m/s

/// Propagation delay over `km` kilometres of fibre.
constexpr double fiber_delay(double km) { return km * 1e3 / kFiberSpeed; }
/// Propagation delay over `km` kilometres through the air.
constexpr double air_delay(double km) { return km * 1e3 / kAirSpeed; }

/// Per-carrier NR radio configuration. All carriers share the same parameters.
struct RadioConfig {
    int carriers = 1;
    double scaling = 1.0;            // share of resources in this direction
    int mimo_layers = 4;
    int modulation_order = 8;        // bits per symbol
    double capability_mismatch = 1.0;
    double max_code_rate = 948.0 / 1024.0;
    int numerology = 1;
    int prb_count = 273;
    double overhead = 0.14;          // 0.14 DL, 0.08 UL by convention
    double tti = 0.5e-3;

    /// Throws ParameterError naming the first invalid field.
    void validate() const;
};

/// Average OFDM symbol duration for numerology mu (14 symbols per slot).
double symbol_duration(int numerology);

/// Peak NR throughput in bit/s summed over the configured carriers.
double ru_max_throughput(const RadioConfig& cfg);

enum class CellKind : std::uint8_t { macro, small };

/// Distance-dependent path loss in dB; `d_km` must be positive.
double path_loss(CellKind kind, double d_km);

struct Interferer {
    double loss_db;
    double tx_power_dbm;
};

/// Shannon throughput for a UE given its serving loss and the interferers.
/// Noise is a spectral density integrated over `bandwidth_hz`.
double ue_throughput(double bandwidth_hz, double tx_power_dbm, double noise_dbm_per_hz,
                     double own_loss_db, std::span<const Interferer> interferers = {});

struct CoverageQuery {
    double peak_rate;          // bit/s the edge UE must still receive
    double bandwidth_hz = 100e6;
    double tx_power_dbm = 46.0;
    double noise_dbm_per_hz = -174.0;
    CellKind kind = CellKind::macro;
    double cap_km = 1.0;       // operating range cap
    double resolution_km = 1e-3;
};

/// Largest distance (within `cap_km`) at which the interference-free
/// throughput still reaches `peak_rate`. Bisection to `resolution_km`.
/// Throws InfeasibleError if the rate is unreachable even at one resolution step.
double max_coverage_distance(const CoverageQuery& q);

/// RU / DU / CU shares of the baseband compute effort.
struct SplitShares {
    double ru = 0.40;
    double du = 0.50;
    double cu = 0.10;
};

struct ComputeSpec {
    int antennas = 4;
    int modulation_bits = 6;
    double code_rate = 1.0;
    int layers = 2;
    int prb = 100;
    SplitShares shares{};
};

/// Total baseband effort in GOPS per TTI.
double bbu_gops(const ComputeSpec& spec);

struct GopsSplit {
    double ru = 0.0;
    double du = 0.0;
    double cu = 0.0;
};

/// Split a total among RU, DU and CU. The parts sum back to `total`.
GopsSplit split_gops(double total, const SplitShares& shares);

struct EthernetModel {
    double payload_bits = 1500.0 * 8;
    double frame_bits = 1542.0 * 8;
    double burst_interval = 0.5e-3;
};

struct Burst {
    std::int64_t frames = 0;
    double actual_rate = 0.0;  // bit/s on the wire
};

/// Frames needed per burst interval to carry `rate` and the resulting wire rate.
Burst burst_frames(double rate, const EthernetModel& eth = {});

/// dBm <-> mW.
double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

}  // namespace oran::models
