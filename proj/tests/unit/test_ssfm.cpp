#include <doctest.h>

#include <cmath>

#include "fiberplan/noise.hpp"
#include "fiberplan/rng.hpp"
#include "fiberplan/ssfm.hpp"
#include "fiberplan/units.hpp"
#include "support.hpp"

using namespace fiberplan;

namespace {

SsfmOptions quick() {
  SsfmOptions o;
  o.n_symbols = 1024;
  o.samples_per_symbol = 8;
  o.steps_per_span = 40;
  o.guard_symbols = 64;
  return o;
}

}  // namespace

TEST_CASE("counter RNG is reproducible and roughly unit variance") {
  const CounterRng a(1, 7), b(1, 7), c(2, 7);
  CHECK(a.bits(123) == b.bits(123));
  CHECK(a.bits(123) != c.bits(123));
  double acc = 0.0;
  std::complex<double> mean = 0.0;
  const int n = 200000;
  for (int j = 0; j < n; ++j) {
    const auto z = a.complex_normal(static_cast<std::uint64_t>(j));
    acc += std::norm(z);
    mean += z;
  }
  CHECK(acc / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(mean / static_cast<double>(n)) < 0.01);
  for (int j = 0; j < 1000; ++j) {
    const double u = a.uniform(static_cast<std::uint64_t>(j));
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("log step positions") {
  const auto z = log_step_positions(80.0, 0.052, 10);
  REQUIRE(z.size() == 11);
  CHECK(z.front() == 0.0);
  CHECK(z.back() == 80.0);
  // equal loss between consecutive positions
  const double drop = std::exp(-0.052 * z[1]);
  for (std::size_t k = 1; k < z.size(); ++k)
    CHECK(std::exp(-0.052 * z[k - 1]) - std::exp(-0.052 * z[k]) == doctest::Approx(1.0 - drop));
}

TEST_CASE("synthesized waveform carries the requested power") {
  const auto cfg = testing::tiny(2, 2, 1);
  const auto o = quick();
  const auto tx = generate_symbols(cfg, o);
  Eigen::VectorXd P(4);
  P << 1e-3, 2e-3, 0.5e-3, 1e-3;
  const auto fr = synthesize(cfg, tx, P, o);
  const double mean_power = fr.samples.cwiseAbs2().sum() / static_cast<double>(fr.samples.rows());
  CHECK(mean_power == doctest::Approx(P.sum()).epsilon(0.02));
}

TEST_CASE("noise-free linear link returns the symbols") {
  const auto cfg = testing::tiny(2, 3, 2);
  auto o = quick();
  o.gamma_scale = 0.0;
  o.ase = false;
  o.receiver_noise = false;
  const auto tx = generate_symbols(cfg, o);
  const Eigen::VectorXd P = Eigen::VectorXd::Constant(6, 1e-3);
  const auto rx = propagate(synthesize(cfg, tx, P, o), cfg, transparent_gains(cfg), o);
  for (const auto& m : receive_and_measure(rx, cfg, tx, o)) CHECK(m.snr_db > 60.0);
}

TEST_CASE("linear link with ASE matches the analytic SNR") {
  const auto cfg = testing::tiny(1, 1, 2);
  auto o = quick();
  o.n_symbols = 4096;
  o.gamma_scale = 0.0;
  const Eigen::VectorXd P = Eigen::VectorXd::Constant(1, dbm_to_watt(-10.0));
  const auto G = transparent_gains(cfg);
  const auto m = run_ssfm(cfg, P, G, o);
  std::vector<NoiseBreakdown> none(1);
  const auto ref = snr_and_margin(cfg, P, G, none);
  CHECK(std::abs(m[0].snr_db - linear_to_db(ref[0].snr)) < 0.2);
}

TEST_CASE("nonlinear step keeps energy") {
  const auto cfg = testing::tiny(3, 1, 2);
  auto o = quick();
  o.ase = false;
  const auto tx = generate_symbols(cfg, o);
  const Eigen::VectorXd P = Eigen::VectorXd::Constant(3, dbm_to_watt(8.0));
  const auto G = transparent_gains(cfg);
  const auto in = synthesize(cfg, tx, P, o);
  const auto out = propagate(in, cfg, G, o);
  double net = 1.0;
  for (std::size_t s = 0; s < 2; ++s) net *= G(static_cast<Eigen::Index>(s)) * span_transmittance(cfg, s);
  CHECK(out.samples.cwiseAbs2().sum() == doctest::Approx(net * in.samples.cwiseAbs2().sum()).epsilon(1e-9));
}

TEST_CASE("dispersionless SPM rotates each sample by gamma I Leff") {
  auto cfg = testing::tiny(1, 1, 1);
  auto& m = cfg.fibers[0].modes[0];
  m.beta1 = m.beta2 = m.beta3 = 0.0;
  auto o = quick();
  o.ase = false;
  const auto tx = generate_symbols(cfg, o);
  const Eigen::VectorXd P = Eigen::VectorXd::Constant(1, dbm_to_watt(10.0));
  Eigen::VectorXd G(1);
  G << 1.0;
  const auto in = synthesize(cfg, tx, P, o);
  const auto out = propagate(in, cfg, G, o);
  // the split steps sample the intensity at each step midpoint
  const double a = m.attenuation;
  const auto z = log_step_positions(80.0, a, o.steps_per_span);
  double leff = 0.0;
  for (std::size_t k = 0; k + 1 < z.size(); ++k) {
    const double h = z[k + 1] - z[k];
    leff += h * std::exp(-a * (z[k] + 0.5 * h));
  }
  const double w = 8.0 / 9.0 * cfg.fibers[0].gamma;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < in.samples.rows(); j += 37) {
    const double I = std::norm(in.samples(j, 0)) + std::norm(in.samples(j, 1));
    if (I < 1e-4) continue;
    const double phase = std::arg(out.samples(j, 0) / in.samples(j, 0));
    worst = std::max(worst, std::abs(phase + w * I * leff));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("same seed, same measurement") {
  const auto cfg = testing::tiny(1, 2, 1);
  const auto o = quick();
  const Eigen::VectorXd P = Eigen::VectorXd::Constant(2, 1e-3);
  const auto a = run_ssfm(cfg, P, transparent_gains(cfg), o);
  const auto b = run_ssfm(cfg, P, transparent_gains(cfg), o);
  for (std::size_t l = 0; l < a.size(); ++l) CHECK(a[l].snr == b[l].snr);
}

TEST_CASE("ssfm option validation") {
  const auto cfg = testing::tiny(1, 1, 1);
  auto o = quick();
  o.n_symbols = 1000;
  CHECK_THROWS_AS(o.check(cfg), ConfigError);
  o = quick();
  o.pulse.rolloff = 0.1;
  CHECK_THROWS_AS(o.check(cfg), ConfigError);
}
