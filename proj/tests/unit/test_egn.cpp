#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fiberplan/noise.hpp"
#include "fiberplan/tensor_cache.hpp"
#include "fiberplan/units.hpp"
#include "fiberplan/xtensor.hpp"
#include "support.hpp"

using namespace fiberplan;

namespace {

QuadratureSpec coarse() {
  QuadratureSpec q;
  q.points_per_band = 8;
  q.rel_tol = 1e-3;
  return q;
}

const XTensors& two_channel_x() {
  static const XTensors X = compute_x_tensors(testing::tiny(1, 2, 2), coarse());
  return X;
}

}  // namespace

TEST_CASE("gaussian cumulants leave only the GN term") {
  const auto cfg = testing::tiny(1, 2, 2);
  const auto& X = two_channel_x();
  const Eigen::VectorXd P = Eigen::VectorXd::Constant(2, dbm_to_watt(2.0));
  const auto nli = egn_variance(cfg, X, cumulants_from_moments(moments_for_format("gaussian")), P,
                                transparent_gains(cfg));
  for (const auto& n : nli) {
    CHECK(std::abs(n.fon) <= 1e-12 * n.gn);
    CHECK(std::abs(n.hon) <= 1e-12 * n.gn);
    CHECK(n.total == n.gn + n.fon + n.hon);
  }
}

TEST_CASE("NLI is cubic in a common power scale") {
  const auto cfg = testing::tiny(1, 2, 2);
  const auto& X = two_channel_x();
  const Eigen::VectorXd P(Eigen::Vector2d(1e-3, 2e-3));
  const auto G = transparent_gains(cfg);
  const auto a = egn_variance(cfg, X, cfg.cumulants(), P, G);
  const auto b = egn_variance(cfg, X, cfg.cumulants(), 3.0 * P, G);
  for (std::size_t l = 0; l < 2; ++l) CHECK(b[l].total == doctest::Approx(27.0 * a[l].total).epsilon(1e-12));
}

TEST_CASE("QPSK NLI sits below the GN estimate") {
  const auto cfg = testing::tiny(1, 2, 2);
  const auto& X = two_channel_x();
  const Eigen::VectorXd P = Eigen::VectorXd::Constant(2, 1e-3);
  const auto e = egn_variance(cfg, X, cfg.cumulants(), P, transparent_gains(cfg));
  for (const auto& n : e) {
    CHECK(n.total < n.gn);
    CHECK(n.total > 0.0);
  }
}

TEST_CASE("dropping an interferer lowers the NLI of the others") {
  auto j = testing::link_json(1, 2, 2);
  const auto full = testing::make_config(j);
  j["lightpaths"][0]["carriers"] = nlohmann::json::array({{1, "LP01"}});
  const auto half = testing::make_config(j);
  const auto Xf = compute_x_tensors(full, coarse());
  const auto Xh = compute_x_tensors(half, coarse());
  const Eigen::VectorXd P = Eigen::VectorXd::Constant(2, 1e-3);
  const auto a = egn_variance(full, Xf, cumulants_from_moments(moments_for_format("gaussian")), P,
                              transparent_gains(full));
  const auto b = egn_variance(half, Xh, cumulants_from_moments(moments_for_format("gaussian")), P,
                              transparent_gains(half));
  CHECK(b[0].total < a[0].total);
  CHECK(b[1].total == 0.0);
}

TEST_CASE("ASE of a single span") {
  const auto cfg = testing::tiny(1, 1, 1);
  const double L = span_transmittance(cfg, 0);
  const double hvb = photon_noise_unit(cfg);
  const double F = db_to_linear(6.0), Gba = db_to_linear(20.0);
  SUBCASE("transparent gain") {
    Eigen::VectorXd G(1);
    G << 1.0 / L;
    CHECK(ase_variance(cfg, G, 0) == doctest::Approx(F * (Gba - 1) * hvb + F * (1.0 / L - 1) * hvb).epsilon(1e-12));
  }
  SUBCASE("unit gain adds nothing in line") {
    Eigen::VectorXd G(1);
    G << 1.0;
    CHECK(ase_variance(cfg, G, 0) == doctest::Approx(F * (Gba - 1) * hvb * L).epsilon(1e-12));
  }
  CHECK(hvb == doctest::Approx(constants::planck * constants::light_speed / 1550e-9 * 32e9).epsilon(1e-12));
}

TEST_CASE("snr and margin bookkeeping") {
  const auto cfg = testing::tiny(1, 1, 1);
  Eigen::VectorXd P(1), G(1);
  P << 1e-3;
  G << 50.0;
  std::vector<NoiseBreakdown> nli(1);
  nli[0].total = 1e-7;
  const auto perf = snr_and_margin(cfg, P, G, nli);
  const double sig = 1e-3 * 50.0 * span_transmittance(cfg, 0);
  const double snr = sig / (1e-7 + ase_variance(cfg, G, 0) + dbm_to_watt(-28.0));
  CHECK(perf[0].snr == doctest::Approx(snr).epsilon(1e-12));
  CHECK(perf[0].margin == doctest::Approx(snr / db_to_linear(5.5)).epsilon(1e-12));
  Eigen::VectorXd bad(2);
  CHECK_THROWS_AS(check_dimensions(cfg, bad, G), ConfigError);
}

TEST_CASE("tensor cache roundtrip and stale detection") {
  const auto dir = std::filesystem::temp_directory_path() / "fiberplan_unit_cache";
  std::filesystem::remove_all(dir);
  setenv("FIBERPLAN_CACHE_DIR", dir.c_str(), 1);
  const auto cfg = testing::tiny(1, 2, 2);
  std::ostringstream log;
  const auto X1 = load_or_compute_x(cfg, coarse(), &log);
  const auto path = cache_file(cfg, coarse());
  REQUIRE(std::filesystem::exists(path));
  const auto X2 = read_tensor_cache(path);
  REQUIRE(X2.has_value());
  CHECK(X2->values() == X1.values());
  CHECK(X2->fingerprint == cfg.fingerprint);

  // same file name, different physics: the header must catch it
  auto j = testing::link_json(1, 2, 2);
  j["fiber"]["gamma"] = testing::q(1.5, "1/(W*km)");
  const auto other = testing::make_config(j);
  REQUIRE(cache_file(other, coarse()) == path);
  std::ostringstream log2;
  const auto X3 = load_or_compute_x(other, coarse(), &log2);
  CHECK(log2.str().find("stale") != std::string::npos);
  CHECK(X3.fingerprint == other.fingerprint);

  // a truncated file is rejected, not trusted
  std::filesystem::resize_file(path, 20);
  std::string why;
  CHECK_FALSE(read_tensor_cache(path, &why).has_value());
  CHECK_FALSE(why.empty());
  std::filesystem::remove_all(dir);
  unsetenv("FIBERPLAN_CACHE_DIR");
}

TEST_CASE("occupancy masks X per span") {
  auto j = testing::link_json(1, 2, 2);
  j["lightpaths"][0]["carriers"] = nlohmann::json::array({{1, "LP01"}});
  j["lightpaths"].push_back({{"id", "L2"},
                             {"first_span", 2},
                             {"last_span", 2},
                             {"required_snr", testing::q(5.5, "dB")},
                             {"carriers", nlohmann::json::array({{2, "LP01"}})}});
  const auto cfg = testing::make_config(j);
  const auto X = compute_x_tensors(cfg, coarse());
  CHECK(X.a(0, 0, 0, 1, 1, 0, 0) == 0.0);
  CHECK(X.a(1, 0, 0, 1, 1, 0, 0) > 0.0);
}
