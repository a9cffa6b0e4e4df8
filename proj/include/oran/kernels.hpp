#pragma once

// Data-parallel kernels. Each has a serial reference and an OpenMP version
// that produce bitwise-identical results (fixed per-item work, fixed
// reduction order).

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "oran/assoc.hpp"
#include "oran/scenario.hpp"

namespace oran::kernels {

/// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();

/// Eligible pairs per UE: same slice and within the RU's coverage, sorted by
/// (distance, RU index). Coefficients filled except c0.
using PairLists = std::vector<std::vector<assoc::Pair>>;
PairLists eligible_pairs_serial(const scenario::Scenario& sc, double air_speed);
PairLists eligible_pairs_parallel(const scenario::Scenario& sc, double air_speed);

/// Per-RU pass of the Lagrangian subproblem. For RU b, writes x for its pairs
/// and returns value[b] = alpha + sum of the chosen reduced coefficients
/// (the cost of opening b with its best attachment subset).
struct R1ScanInput {
    const assoc::P1Model* model = nullptr;
    std::span<const double> nu;
    bool enforce_latency = false;
};
void r1_scan_serial(const R1ScanInput& in, std::span<std::uint8_t> x, std::span<double> value);
void r1_scan_parallel(const R1ScanInput& in, std::span<std::uint8_t> x, std::span<double> value);

/// Value of RU b alone (shared body of both scans).
double r1_scan_ru(const R1ScanInput& in, int b, std::span<std::uint8_t> x);

/// Run `n` independent jobs; results land in slot i regardless of schedule.
void for_each_index_serial(int n, const std::function<void(int)>& job);
void for_each_index_parallel(int n, const std::function<void(int)>& job);

}  // namespace oran::kernels
