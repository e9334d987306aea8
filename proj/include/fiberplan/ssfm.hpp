#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fiberplan/config.hpp"

namespace fiberplan {

/// Only the sinc (brick-wall spectrum) pulse is synthesized; a nonzero
/// rolloff is rejected.
struct PulseShape {
  double rolloff = 0.0;
  void check() const;
};

/// Column j = track 2 * mode + polarization.
struct FieldFrame {
  Eigen::MatrixXcd samples;  // N x 2D, W^(1/2)
  double sample_rate = 0.0;  // Hz
  double center_frequency = 0.0;
  std::size_t samples_count() const { return static_cast<std::size_t>(samples.rows()); }
};

struct SsfmOptions {
  std::uint64_t seed = 1;
  int n_symbols = 4096;
  int samples_per_symbol = 16;
  int steps_per_span = 160;
  int guard_symbols = 256;
  bool ase = true;
  bool receiver_noise = true;
  double gamma_scale = 1.0;  // 0 gives the linear channel
  PulseShape pulse;

  void check(const SystemConfig& cfg) const;
};

/// Per carrier, per polarization: n_symbols unit-variance symbols.
struct TxSymbols {
  std::vector<Eigen::MatrixXcd> carriers;  // each n_symbols x 2
};

TxSymbols generate_symbols(const SystemConfig& cfg, const SsfmOptions& opt);

/// Sinc-pulse WDM/MDM waveform; power P_l is split equally over the two
/// polarizations. Inactive carriers are left dark.
FieldFrame synthesize(const SystemConfig& cfg, const TxSymbols& tx, const Eigen::VectorXd& powers,
                      const SsfmOptions& opt);

/// Step positions inside a span of length L: z_k = -ln(1 - (k/K)(1 - e^{-aL}))/a.
std::vector<double> log_step_positions(double length, double attenuation, int steps);

/// Symmetric split-step propagation over every span of the link, including
/// booster ASE at launch and per-span amplifier gain plus ASE.
FieldFrame propagate(const FieldFrame& in, const SystemConfig& cfg, const Eigen::VectorXd& gains,
                     const SsfmOptions& opt);

struct CarrierMeasurement {
  bool active = false;
  double snr = 0.0;  // linear
  double snr_db = 0.0;
  double nli_power = 0.0;  // W, from the noise-free twin
};

/// Ideal inverse dispersion, brick-wall matched filter, least-squares complex
/// gain per polarization against the known symbols; SNR combines both
/// polarizations. Adds receiver noise when enabled.
std::vector<CarrierMeasurement> receive_and_measure(const FieldFrame& rx, const SystemConfig& cfg,
                                                    const TxSymbols& tx, const SsfmOptions& opt);

/// Runs the noisy link and its noise-free twin; nli_power = P_rx / SNR_nf.
std::vector<CarrierMeasurement> run_ssfm(const SystemConfig& cfg, const Eigen::VectorXd& powers,
                                         const Eigen::VectorXd& gains, const SsfmOptions& opt);

}  // namespace fiberplan
