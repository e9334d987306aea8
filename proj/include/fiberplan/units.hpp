#pragma once

#include <cmath>
#include <numbers>

namespace fiberplan {

// All internal quantities are SI-linear except lengths (km) and the
// per-km fiber coefficients that go with them.
namespace constants {
inline constexpr double planck = 6.62607015e-34;   // J*s
inline constexpr double light_speed = 299792458.0; // m/s
inline constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace constants

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return 1e-3 * db_to_linear(dbm); }
inline double watt_to_dbm(double w) { return linear_to_db(w / 1e-3); }

/// dB/km -> power attenuation coefficient in 1/km.
inline double db_per_km_to_neper(double db_per_km) {
  return db_per_km * std::log(10.0) / 10.0;
}
inline double neper_to_db_per_km(double alpha) {
  return alpha * 10.0 / std::log(10.0);
}

/// nats <-> dB for power ratios expressed as natural logarithms.
inline double nats_to_db(double nats) { return nats * 10.0 / std::log(10.0); }
inline double db_to_nats(double db) { return db * std::log(10.0) / 10.0; }

}  // namespace fiberplan
