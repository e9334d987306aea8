#pragma once

#include <string>

#include <json.hpp>

#include "fiberplan/config.hpp"

namespace testing {

inline nlohmann::json q(double v, const char* unit) { return {{"value", v}, {"unit", unit}}; }

inline nlohmann::json mode_json(int j) {
  static const char* names[] = {"LP01", "LP11a", "LP11b", "LP21a", "LP21b", "LP02"};
  const double b1[] = {0.0, 6.5, 6.5, 12.0, 12.0, 13.0};
  const double b2[] = {31.86, 34.8, 34.8, 30.1, 30.1, 29.5};
  return {{"name", names[j]},
          {"attenuation", q(0.226, "dB/km")},
          {"beta1", q(b1[j], "ns/km")},
          {"beta2", q(b2[j], "ps^2/km")},
          {"beta3", q(0.1452, "ps^3/km")}};
}

/// One lightpath over every span carrying every carrier.
inline nlohmann::json link_json(int modes, int channels, int spans, const std::string& format = "qpsk",
                                double rx_dbm = -28.0, double length_km = 80.0) {
  nlohmann::json j;
  j["fiber"]["name"] = "f";
  j["fiber"]["gamma"] = q(1.3, "1/(W*km)");
  nlohmann::json coupling = nlohmann::json::array();
  for (int p = 0; p < modes; ++p) {
    j["fiber"]["modes"].push_back(mode_json(p));
    nlohmann::json row = nlohmann::json::array();
    for (int r = 0; r < modes; ++r) row.push_back(p == r ? 1.0 : 0.66);
    coupling.push_back(row);
  }
  j["fiber"]["coupling"] = coupling;
  j["channels"] = {{"count", channels},
                   {"symbol_rate", q(32, "GBaud")},
                   {"bandwidth", q(32, "GHz")},
                   {"spacing", q(50, "GHz")},
                   {"center_frequency", q(1550, "nm")}};
  j["amplifier"] = {{"noise_figure", q(6, "dB")}, {"max_gain", q(30, "dB")}, {"saturation_power", q(25, "dBm")}};
  j["booster_gain"] = q(20, "dB");
  j["receiver_noise"] = q(rx_dbm, "dBm");
  j["modulation"] = {{"format", format}, {"cumulant_convention", "gaussian-reducing"}};
  for (int s = 0; s < spans; ++s) j["network"]["spans"].push_back({{"length", q(length_km, "km")}});
  nlohmann::json lp = {{"id", "L1"}, {"first_span", 1}, {"last_span", spans}, {"required_snr", q(5.5, "dB")}};
  for (int c = 1; c <= channels; ++c)
    for (int p = 0; p < modes; ++p) lp["carriers"].push_back({c, mode_json(p)["name"]});
  j["lightpaths"].push_back(lp);
  return j;
}

inline fiberplan::SystemConfig make_config(const nlohmann::json& j) { return fiberplan::load_system_config(j.dump()); }

inline fiberplan::SystemConfig tiny(int modes, int channels, int spans, const std::string& format = "qpsk",
                                    double rx_dbm = -28.0) {
  return make_config(link_json(modes, channels, spans, format, rx_dbm));
}

}  // namespace testing
