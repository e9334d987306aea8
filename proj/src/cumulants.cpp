#include "fiberplan/cumulants.hpp"

#include <cmath>
#include <stdexcept>

namespace fiberplan {

void validate_moments(const ConstellationMoments& m) {
  if (std::abs(m.mu2 - 1.0) > 1e-9)
    throw std::invalid_argument("constellation moments: mu2 must be 1 (unit energy)");
  if (m.mu4 < m.mu2 * m.mu2 - 1e-12)
    throw std::invalid_argument("constellation moments: mu4 >= mu2^2 violated");
  if (m.mu6 < 0.0) throw std::invalid_argument("constellation moments: mu6 >= 0 violated");
}

Cumulants cumulants_from_moments(const ConstellationMoments& m, CumulantConvention convention) {
  validate_moments(m);
  const double mu2_cubed = m.mu2 * m.mu2 * m.mu2;
  const double sixth_coeff = convention == CumulantConvention::Paper ? 4.0 : 9.0;
  Cumulants c;
  c.kappa1 = m.mu2;
  c.kappa2 = m.mu4 - 2.0 * m.mu2 * m.mu2;
  c.kappa3 = m.mu6 - sixth_coeff * m.mu4 * m.mu2 + 12.0 * mu2_cubed;
  return c;
}

ConstellationMoments moments_for_format(std::string_view name) {
  if (name == "qpsk" || name == "bpsk") return {1.0, 1.0, 1.0};
  // Square QAM, unit energy; values are exact rationals.
  if (name == "16qam") return {1.0, 1.32, 1.96};
  if (name == "64qam") return {1.0, 1.380952380952381, 2.2257855523161645};
  if (name == "gaussian") return {1.0, 2.0, 6.0};
  throw std::invalid_argument("unknown modulation format '" + std::string(name) + "'");
}

CumulantConvention parse_convention(std::string_view name) {
  if (name == "paper") return CumulantConvention::Paper;
  if (name == "gaussian-reducing") return CumulantConvention::GaussianReducing;
  throw std::invalid_argument("unknown cumulant convention '" + std::string(name) + "'");
}

std::string to_string(CumulantConvention c) {
  return c == CumulantConvention::Paper ? "paper" : "gaussian-reducing";
}

}  // namespace fiberplan
