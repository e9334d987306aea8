#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fiberplan/config.hpp"
#include "fiberplan/xtensor.hpp"

namespace fiberplan {

/// Per-carrier NLI split, W at the receiver.
struct NoiseBreakdown {
  double gn = 0.0;
  double fon = 0.0;
  double hon = 0.0;
  double total = 0.0;
};

struct CarrierPerformance {
  bool active = false;
  NoiseBreakdown nli;
  double ase = 0.0;     // W
  double signal = 0.0;  // W at the receiver
  double snr = 0.0;     // linear
  double margin = 0.0;  // linear
};

/// Launch powers (W, per carrier, channel-major) and per-span linear gains.
/// Throws ConfigError on a size mismatch.
void check_dimensions(const SystemConfig& cfg, const Eigen::VectorXd& powers, const Eigen::VectorXd& gains);

/// Power entering each span: P_a * prod_{n=first_a}^{s-1} G_n L_n on the
/// carrier's own spans, 0 elsewhere. Rows are spans, columns carriers.
Eigen::MatrixXd span_input_powers(const SystemConfig& cfg, const Eigen::VectorXd& powers,
                                  const Eigen::VectorXd& gains);

/// NLI variance at the receiver of every carrier. Each span contributes
/// incoherently and is carried to the receiver by the remaining G L
/// products of the observed carrier's path.
std::vector<NoiseBreakdown> egn_variance(const SystemConfig& cfg, const XTensors& X, const Cumulants& cum,
                                         const Eigen::VectorXd& powers, const Eigen::VectorXd& gains);

/// Booster plus in-line ASE accumulated along the carrier's spans, W.
double ase_variance(const SystemConfig& cfg, const Eigen::VectorXd& gains, std::size_t carrier);

/// h nu B for the channel grid.
double photon_noise_unit(const SystemConfig& cfg);

/// SNR = P prod(G L) / (ASE + NLI + receiver noise); margin = SNR / required.
std::vector<CarrierPerformance> snr_and_margin(const SystemConfig& cfg, const Eigen::VectorXd& powers,
                                               const Eigen::VectorXd& gains,
                                               const std::vector<NoiseBreakdown>& nli);

/// egn_variance followed by snr_and_margin.
std::vector<CarrierPerformance> evaluate_link(const SystemConfig& cfg, const XTensors& X, const Cumulants& cum,
                                              const Eigen::VectorXd& powers, const Eigen::VectorXd& gains);

/// G_s = min(1 / L_s, G_max) on every span.
Eigen::VectorXd transparent_gains(const SystemConfig& cfg);

}  // namespace fiberplan
