#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fiberplan/cumulants.hpp"

namespace fiberplan {

/// Malformed document, missing/unknown unit or a violated invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure (non-finite values, non-convergence).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModeSpec {
  int mode_id = 1;  // 1-based, unique within a fiber
  std::string name;
  double attenuation = 0.0;  // power attenuation, 1/km
  double beta0 = 0.0;        // rad/km
  double beta1 = 0.0;        // s/km
  double beta2 = 0.0;        // s^2/km
  double beta3 = 0.0;        // s^3/km
};

struct FiberSpec {
  std::vector<ModeSpec> modes;
  double gamma = 0.0;        // 1/(W km)
  Eigen::MatrixXd coupling;  // D x D, as ingested

  std::size_t num_modes() const { return modes.size(); }
  /// (f_pq + f_qp) / 2
  double coupling_sym(std::size_t p, std::size_t q) const {
    return 0.5 * (coupling(p, q) + coupling(q, p));
  }
};

struct ChannelPlan {
  int n_channels = 1;
  double symbol_rate = 0.0;       // Baud
  double bandwidth = 0.0;         // Hz
  double spacing = 0.0;           // Hz
  double center_frequency = 0.0;  // Hz

  /// Baseband center of channel i (0-based), grid symmetric about 0.
  double offset(int i) const { return (i - 0.5 * (n_channels - 1)) * spacing; }
};

struct AmplifierSpec {
  double noise_figure = 1.0;      // linear
  double max_gain = 1.0;          // linear
  double saturation_power = 1.0;  // W
};

struct Span {
  double length = 0.0;  // km
  std::size_t fiber = 0;
  AmplifierSpec amplifier;
};

/// A contiguous span interval [first_span, last_span] (0-based, inclusive).
struct Lightpath {
  std::string id;
  std::size_t first_span = 0;
  std::size_t last_span = 0;
  std::vector<std::pair<int, int>> carriers;  // (channel, mode), 0-based
  double required_snr = 1.0;                  // linear

  bool covers(std::size_t span) const { return span >= first_span && span <= last_span; }
  bool overlaps(const Lightpath& o) const {
    return first_span <= o.last_span && o.first_span <= last_span;
  }
};

struct LinkTopology {
  std::vector<Span> spans;
  double booster_gain = 1.0;  // linear
  std::vector<std::string> nodes;
  std::vector<Lightpath> lightpaths;
};

struct SolverOptions {
  double beta_upper = 100.0;
  double beta_lower = -10.0;
  double epsilon = 1e-3;  // bisection tolerance, nats
  int max_outer_iterations = 5000;
  int max_inner_iterations = 2000;
  double inner_tolerance = 1e-7;
  double step_lambda = 0.05;
  double step_mu = 0.05;
  double step_nu = 0.05;
  bool saturation_active = true;
  double equal_power_min_dbm = -12.0;
  double equal_power_max_dbm = 6.0;
  double equal_power_step_db = 0.1;
};

struct SystemConfig {
  std::vector<FiberSpec> fibers;
  ChannelPlan channels;
  LinkTopology link;
  double receiver_noise = 0.0;  // W, per carrier
  std::string modulation = "qpsk";
  ConstellationMoments moments;
  CumulantConvention convention = CumulantConvention::GaussianReducing;
  SolverOptions solver;
  std::uint64_t fingerprint = 0;

  const FiberSpec& fiber(std::size_t span) const { return fibers.at(link.spans.at(span).fiber); }
  std::size_t num_modes() const { return fibers.front().num_modes(); }
  std::size_t num_channels() const { return static_cast<std::size_t>(channels.n_channels); }
  std::size_t num_carriers() const { return num_modes() * num_channels(); }
  std::size_t num_spans() const { return link.spans.size(); }
  /// Channel-major carrier index: (ch0,mode0..D-1), (ch1,...), ...
  std::size_t carrier(std::size_t channel, std::size_t mode) const {
    return channel * num_modes() + mode;
  }
  Cumulants cumulants() const { return cumulants_from_moments(moments, convention); }
};

/// Per-carrier view derived from the lightpaths: which lightpath (if any)
/// carries each (channel, mode), and the span interval it occupies.
struct CarrierRoute {
  bool active = false;
  std::size_t lightpath = 0;
  std::size_t first_span = 0;
  std::size_t last_span = 0;
  double required_snr = 1.0;
  bool present(std::size_t span) const {
    return active && span >= first_span && span <= last_span;
  }
};

std::vector<CarrierRoute> carrier_routes(const SystemConfig& cfg);

/// Parse a JSON document with explicit unit annotations.
SystemConfig load_system_config(const std::string& text);
SystemConfig load_system_config_file(const std::filesystem::path& path);

/// Re-check every cross-field invariant; throws ConfigError.
void validate(const SystemConfig& cfg);

/// 64-bit FNV-1a over the canonical (key-sorted, SI-normalized) physics of
/// the config. Invariant under field reordering of the source document.
std::uint64_t compute_fingerprint(const SystemConfig& cfg);
std::string fingerprint_hex(std::uint64_t fp);

/// 10^(-alpha_dB * length / 10) using the fundamental-mode attenuation.
double span_transmittance(const SystemConfig& cfg, std::size_t span);

}  // namespace fiberplan
