#include "fiberplan/noise.hpp"

#include <cmath>

#include "fiberplan/units.hpp"

namespace fiberplan {

void check_dimensions(const SystemConfig& cfg, const Eigen::VectorXd& powers, const Eigen::VectorXd& gains) {
  if (static_cast<std::size_t>(powers.size()) != cfg.num_carriers())
    throw ConfigError("dimension error: " + std::to_string(powers.size()) + " powers for " +
                      std::to_string(cfg.num_carriers()) + " carriers");
  if (static_cast<std::size_t>(gains.size()) != cfg.num_spans())
    throw ConfigError("dimension error: " + std::to_string(gains.size()) + " gains for " +
                      std::to_string(cfg.num_spans()) + " spans");
  if ((powers.array() < 0.0).any() || !powers.allFinite()) throw ConfigError("powers must be finite and >= 0");
  if ((gains.array() <= 0.0).any() || !gains.allFinite()) throw ConfigError("gains must be finite and > 0");
}

Eigen::MatrixXd span_input_powers(const SystemConfig& cfg, const Eigen::VectorXd& powers,
                                  const Eigen::VectorXd& gains) {
  const auto routes = carrier_routes(cfg);
  const auto ns = static_cast<Eigen::Index>(cfg.num_spans());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(ns, powers.size());
  for (Eigen::Index a = 0; a < powers.size(); ++a) {
    const auto& r = routes[static_cast<std::size_t>(a)];
    if (!r.active) continue;
    double p = powers(a);
    for (std::size_t s = r.first_span; s <= r.last_span; ++s) {
      P(static_cast<Eigen::Index>(s), a) = p;
      p *= gains(static_cast<Eigen::Index>(s)) * span_transmittance(cfg, s);
    }
  }
  return P;
}

std::vector<NoiseBreakdown> egn_variance(const SystemConfig& cfg, const XTensors& X, const Cumulants& cum,
                                         const Eigen::VectorXd& powers, const Eigen::VectorXd& gains) {
  check_dimensions(cfg, powers, gains);
  if (X.n_channels() != cfg.num_channels() || X.n_modes() != cfg.num_modes() || X.n_spans() != cfg.num_spans())
    throw ConfigError("dimension error: X tensors do not match the configuration");
  const auto routes = carrier_routes(cfg);
  const Eigen::MatrixXd Ps = span_input_powers(cfg, powers, gains);
  const std::size_t nch = cfg.num_channels(), D = cfg.num_modes();
  const double k1 = cum.kappa1, k2 = cum.kappa2, k3 = cum.kappa3;

  std::vector<NoiseBreakdown> out(cfg.num_carriers());
  for (std::size_t i = 0; i < nch; ++i)
    for (std::size_t p = 0; p < D; ++p) {
      const std::size_t l = cfg.carrier(i, p);
      const auto& r = routes[l];
      if (!r.active) continue;
      NoiseBreakdown nb;
      for (std::size_t s = r.first_span; s <= r.last_span; ++s) {
        const auto P = [&](std::size_t ch, std::size_t mode) {
          return Ps(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(cfg.carrier(ch, mode)));
        };
        double gn = 0.0, fon = 0.0, hon = 0.0;
        for (std::size_t q = 0; q < D; ++q) {
          for (std::size_t k = 0; k < nch; ++k)
            for (std::size_t m = 0; m < nch; ++m)
              for (std::size_t n = 0; n < nch; ++n) {
                const double x = X.a(s, i, p, k, m, n, q);
                if (x != 0.0) gn += P(k, q) * P(m, q) * P(n, p) * x;
              }
          for (std::size_t k = 0; k < nch; ++k)
            for (std::size_t n = 0; n < nch; ++n)
              fon += 5.0 * P(k, q) * P(k, q) * P(n, p) * X.b(s, i, p, k, n, q) +
                     P(k, p) * P(k, q) * P(n, q) * X.c(s, i, p, k, n, q);
          for (std::size_t n = 0; n < nch; ++n) hon += P(n, q) * P(n, q) * P(n, p) * X.d(s, i, p, n, q);
        }
        // carry the span-s contribution to the receiver
        double carry = 1.0;
        for (std::size_t n = s; n <= r.last_span; ++n)
          carry *= gains(static_cast<Eigen::Index>(n)) * span_transmittance(cfg, n);
        nb.gn += carry * 0.75 * k1 * k1 * k1 * gn;
        nb.fon += carry * 0.25 * k2 * k1 * fon;
        nb.hon += carry * 0.25 * k3 * hon;
      }
      nb.total = nb.gn + nb.fon + nb.hon;
      if (!std::isfinite(nb.total)) throw NumericError("non-finite NLI variance");
      out[l] = nb;
    }
  return out;
}

double photon_noise_unit(const SystemConfig& cfg) {
  return constants::planck * cfg.channels.center_frequency * cfg.channels.bandwidth;
}

double ase_variance(const SystemConfig& cfg, const Eigen::VectorXd& gains, std::size_t carrier) {
  const auto routes = carrier_routes(cfg);
  const auto& r = routes.at(carrier);
  if (!r.active) return 0.0;
  const double hvb = photon_noise_unit(cfg);
  const double booster_nf = cfg.link.spans[r.first_span].amplifier.noise_figure;
  double ase = booster_nf * (cfg.link.booster_gain - 1.0) * hvb;
  for (std::size_t s = r.first_span; s <= r.last_span; ++s) {
    const double G = gains(static_cast<Eigen::Index>(s));
    ase = ase * G * span_transmittance(cfg, s) + cfg.link.spans[s].amplifier.noise_figure * (G - 1.0) * hvb;
  }
  return ase;
}

std::vector<CarrierPerformance> snr_and_margin(const SystemConfig& cfg, const Eigen::VectorXd& powers,
                                               const Eigen::VectorXd& gains,
                                               const std::vector<NoiseBreakdown>& nli) {
  check_dimensions(cfg, powers, gains);
  const auto routes = carrier_routes(cfg);
  std::vector<CarrierPerformance> out(cfg.num_carriers());
  for (std::size_t l = 0; l < out.size(); ++l) {
    const auto& r = routes[l];
    if (!r.active) continue;
    if (!(r.required_snr > 0.0)) throw ConfigError("required SNR must be positive");
    auto& c = out[l];
    c.active = true;
    c.nli = nli.at(l);
    c.ase = ase_variance(cfg, gains, l);
    double sig = powers(static_cast<Eigen::Index>(l));
    for (std::size_t s = r.first_span; s <= r.last_span; ++s)
      sig *= gains(static_cast<Eigen::Index>(s)) * span_transmittance(cfg, s);
    c.signal = sig;
    c.snr = sig / (c.ase + c.nli.total + cfg.receiver_noise);
    c.margin = c.snr / r.required_snr;
  }
  return out;
}

std::vector<CarrierPerformance> evaluate_link(const SystemConfig& cfg, const XTensors& X, const Cumulants& cum,
                                              const Eigen::VectorXd& powers, const Eigen::VectorXd& gains) {
  return snr_and_margin(cfg, powers, gains, egn_variance(cfg, X, cum, powers, gains));
}

Eigen::VectorXd transparent_gains(const SystemConfig& cfg) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(cfg.num_spans()));
  for (std::size_t s = 0; s < cfg.num_spans(); ++s)
    g(static_cast<Eigen::Index>(s)) = std::min(1.0 / span_transmittance(cfg, s), cfg.link.spans[s].amplifier.max_gain);
  return g;
}

}  // namespace fiberplan
