#pragma once

#include <string>
#include <string_view>

namespace fiberplan {

/// Normalized absolute moments E[|x|^n] of a unit-energy constellation.
struct ConstellationMoments {
  double mu2 = 1.0;
  double mu4 = 2.0;
  double mu6 = 6.0;
};

struct Cumulants {
  double kappa1 = 1.0;
  double kappa2 = 0.0;
  double kappa3 = 0.0;
};

enum class CumulantConvention {
  /// mu6 - 4 mu4 mu2 + 12 mu2^3, as printed in the model derivation.
  Paper,
  /// mu6 - 9 mu4 mu2 + 12 mu2^3; circular-Gaussian inputs give zero.
  GaussianReducing,
};

/// Throws std::invalid_argument when mu2 != 1, mu4 < mu2^2 or mu6 < 0.
void validate_moments(const ConstellationMoments& m);

Cumulants cumulants_from_moments(const ConstellationMoments& m,
                                 CumulantConvention convention = CumulantConvention::GaussianReducing);

/// Exact moments for "qpsk", "bpsk", "16qam", "64qam" and "gaussian".
/// Throws std::invalid_argument for unknown names.
ConstellationMoments moments_for_format(std::string_view name);

CumulantConvention parse_convention(std::string_view name);
std::string to_string(CumulantConvention c);

}  // namespace fiberplan
