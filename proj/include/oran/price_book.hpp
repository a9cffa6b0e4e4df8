#pragma once

// Unit prices (euro) used by the planners and the pricing functions.

#include <cmath>
#include <cstdint>

namespace oran::cost {

/// Money is carried in integer euro cents.
using Cents = std::int64_t;

inline Cents to_cents(double euros) { return static_cast<Cents>(std::llround(euros * 100.0)); }
inline double to_euros(Cents c) { return static_cast<double>(c) / 100.0; }

struct PriceBook {
    double olt = 16000.0;            // C_o and C_q
    double onu = 2000.0;
    double splitter = 200.0;
    double fiber_material_per_km = 100.0;
    double fiber_install_per_km = 2500.0;
    double server_install = 3800.0;
    double per_gops = 1.5;           // C_g, per GOPS/TTI of installed capacity
    double roadm = 19200.0;
    double eswitch = 19200.0;
    bool otn_price_is_pair = false;  // one 19200 figure covers ROADM + E-switch together
    double stage2_olt_factor = 1.0;  // wavelength aggregation multiplier for Stage-II OLTs
    double stage2_onu_factor = 1.0;  // ... and for the Stage-II ONUs of OLT-ONU boxes

    double fiber_per_km() const { return fiber_material_per_km + fiber_install_per_km; }
};

/// Fiber cost of one segment, rounded to the cent.
inline Cents fiber_cents(const PriceBook& book, double km) { return to_cents(book.fiber_per_km() * km); }

}  // namespace oran::cost
