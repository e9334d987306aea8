#include "fiberplan/kernel.hpp"

#include <cmath>

#include "fiberplan/units.hpp"

namespace fiberplan {

double beta_profile(const ModeSpec& m, double f) {
  const double w = constants::two_pi * f;
  return m.beta0 + w * (m.beta1 + w * (0.5 * m.beta2 + w * (m.beta3 / 6.0)));
}

double beta_difference(const ModeSpec& m, double x, double y) {
  const double wx = constants::two_pi * x, wy = constants::two_pi * y;
  const double d = wx - wy;
  // x^2 - y^2 = (x - y)(x + y);  x^3 - y^3 = (x - y)(x^2 + xy + y^2)
  return d * (m.beta1 + 0.5 * m.beta2 * (wx + wy) + (m.beta3 / 6.0) * (wx * wx + wx * wy + wy * wy));
}

double beta_slope(const ModeSpec& m, double f) {
  const double w = constants::two_pi * f;
  return constants::two_pi * (m.beta1 + w * (m.beta2 + w * (0.5 * m.beta3)));
}

double phase_mismatch_slope_u(const ModeSpec& observed, const ModeSpec& interferer, double f, double u, double v) {
  // w = u + v - f moves with u
  return beta_slope(observed, u) - beta_slope(interferer, u + v - f);
}

double phase_mismatch(const ModeSpec& observed, const ModeSpec& interferer, double f, double u, double v) {
  const double w = u + v - f;
  return beta_difference(observed, u, f) + beta_difference(interferer, v, w);
}

EtaKernelParams EtaKernelParams::make(const FiberSpec& fiber, std::size_t p, std::size_t q, double length) {
  EtaKernelParams k;
  k.observed = &fiber.modes.at(p);
  k.interferer = &fiber.modes.at(q);
  k.length = length;
  // Field attenuation alpha/2 on the three source fields, removed once for
  // the observed field: (a_p + a_q + a_q - a_p) / 2.
  k.alpha = k.interferer->attenuation;
  const double f = fiber.coupling_sym(p, q);
  k.gamma_eff = (p == q ? 8.0 / 9.0 : 4.0 / 3.0) * fiber.gamma * f;
  return k;
}

std::complex<double> eta_span(const EtaKernelParams& k, double f, double f1, double f2) {
  const double dbeta = phase_mismatch(*k.observed, *k.interferer, f, f + f1, f + f2);
  const std::complex<double> s(-k.alpha, dbeta);
  const std::complex<double> z = s * k.length;
  if (std::abs(z) < 1e-4) {
    // (e^z - 1)/s = L (1 + z/2 + z^2/6 + ...)
    return k.gamma_eff * k.length * (1.0 + z / 2.0 + z * z / 6.0);
  }
  return k.gamma_eff * (std::exp(z) - 1.0) / s;
}

double eta_abs2_from_mismatch(const EtaKernelParams& k, double dbeta) {
  const double a = k.alpha, L = k.length;
  const double den = a * a + dbeta * dbeta;
  const double g2 = k.gamma_eff * k.gamma_eff;
  if (den * L * L < 1e-8) {
    const std::complex<double> z(-a * L, dbeta * L);
    const auto r = L * (1.0 + z / 2.0 + z * z / 6.0);
    return g2 * std::norm(r);
  }
  const double e = std::exp(-a * L);
  // |e^{(-a + j d) L} - 1|^2 = 1 - 2 e^{-aL} cos(dL) + e^{-2aL}
  const double num = 1.0 - 2.0 * e * std::cos(dbeta * L) + e * e;
  return g2 * num / den;
}

}  // namespace fiberplan
