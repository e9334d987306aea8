#pragma once

#include <complex>

#include "fiberplan/config.hpp"

namespace fiberplan {

/// Propagation constant of a mode at baseband frequency f (Hz), rad/km:
/// beta0 + beta1 w + beta2/2 w^2 + beta3/6 w^3 with w = 2 pi f.
double beta_profile(const ModeSpec& mode, double f);

/// beta(x) - beta(y) evaluated in factored form so that nearby arguments do
/// not cancel catastrophically.
double beta_difference(const ModeSpec& mode, double x, double y);

/// d beta / d f at f, rad/(km Hz).
double beta_slope(const ModeSpec& mode, double f);

/// Four-wave phase mismatch for the product observed at f in `observed`
/// mode, with u = f + f1 on the observed mode and v = f + f2,
/// w = u + v - f on the interfering mode:
///   beta_p(u) + beta_q(v) - beta_q(w) - beta_p(f).
double phase_mismatch(const ModeSpec& observed, const ModeSpec& interferer, double f, double u, double v);

/// d(phase_mismatch)/du at fixed f, v.
double phase_mismatch_slope_u(const ModeSpec& observed, const ModeSpec& interferer, double f, double u, double v);

/// Per-span FWM efficiency kernel for one (observed, interfering) mode pair.
struct EtaKernelParams {
  const ModeSpec* observed = nullptr;
  const ModeSpec* interferer = nullptr;
  double length = 0.0;     // km
  double alpha = 0.0;      // net power attenuation seen by the product, 1/km
  double gamma_eff = 0.0;  // 1/(W km)

  /// 8/9 gamma f_pp for the degenerate case, 4/3 gamma f_pq otherwise; the
  /// coupling table is symmetrized.
  static EtaKernelParams make(const FiberSpec& fiber, std::size_t observed_mode,
                              std::size_t interfering_mode, double length);
};

/// gamma_eff * (exp((-alpha + j dbeta) L) - 1) / (-alpha + j dbeta).
std::complex<double> eta_span(const EtaKernelParams& k, double f, double f1, double f2);

/// |eta|^2 as a function of the phase mismatch only.
double eta_abs2_from_mismatch(const EtaKernelParams& k, double dbeta);

inline double eta_abs2(const EtaKernelParams& k, double f, double f1, double f2) {
  return eta_abs2_from_mismatch(k, phase_mismatch(*k.observed, *k.interferer, f, f + f1, f + f2));
}

}  // namespace fiberplan
