// fiberplan: EGN noise tables, SSFM cross-checks and margin optimization.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fiberplan/allocator.hpp"
#include "fiberplan/config.hpp"
#include "fiberplan/noise.hpp"
#include "fiberplan/report.hpp"
#include "fiberplan/ssfm.hpp"
#include "fiberplan/tensor_cache.hpp"
#include "fiberplan/units.hpp"

using namespace fiberplan;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Sweep {
  double lo = -6.0, hi = 6.0, step = 2.0;
  std::vector<double> points() const {
    if (!(step > 0.0) || hi < lo) throw ConfigError("validation error: sweep needs lo <= hi and step > 0");
    std::vector<double> v;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int k = 0; k <= n; ++k) v.push_back(lo + k * step);
    return v;
  }
};

Sweep parse_sweep(const std::string& s) {
  Sweep w;
  char c1 = 0, c2 = 0;
  std::istringstream is(s);
  if (!(is >> w.lo >> c1 >> w.hi >> c2 >> w.step) || c1 != ':' || c2 != ':')
    throw ConfigError("parse error: --sweep expects lo:hi:step in dBm, got '" + s + "'");
  return w;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + out);
  f << text;
}

QuadratureSpec quad_spec(int res) {
  QuadratureSpec q;
  if (res > 0) q.points_per_band = res;
  q.check();
  return q;
}

Eigen::VectorXd gains_or_default(const SystemConfig& cfg, const std::string& path) {
  if (path.empty()) return transparent_gains(cfg);
  const Eigen::VectorXd db = read_vector_csv(path);
  if (static_cast<std::size_t>(db.size()) != cfg.num_spans())
    throw ConfigError("dimension error: gains file has " + std::to_string(db.size()) + " entries, link has " +
                      std::to_string(cfg.num_spans()) + " spans");
  return db.unaryExpr([](double v) { return db_to_linear(v); });
}

std::vector<std::pair<double, Eigen::VectorXd>> power_points(const SystemConfig& cfg, const std::string& powers,
                                                              const std::string& sweep) {
  std::vector<std::pair<double, Eigen::VectorXd>> pts;
  if (!powers.empty()) {
    const Eigen::VectorXd dbm = read_vector_csv(powers);
    if (static_cast<std::size_t>(dbm.size()) != cfg.num_carriers())
      throw ConfigError("dimension error: powers file has " + std::to_string(dbm.size()) + " entries, expected " +
                        std::to_string(cfg.num_carriers()) + " carriers");
    pts.emplace_back(std::nan(""), dbm.unaryExpr([](double v) { return dbm_to_watt(v); }));
    return pts;
  }
  const Sweep w = sweep.empty() ? Sweep{} : parse_sweep(sweep);
  for (double p : w.points())
    pts.emplace_back(p, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(cfg.num_carriers()), dbm_to_watt(p)));
  return pts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fiberplan: nonlinear noise, split-step checks and margin allocation for MDM-WDM links"};
  app.require_subcommand(1);

  std::string config, out, powers, gains, sweep, scenario = "all";
  int quad_res = 0, steps = 0, symbols = 0, guard = -1;
  std::uint64_t seed = 1;
  double epsilon = 0.0, gamma_scale = 1.0;
  bool step_check = false;

  auto* egn = app.add_subcommand("egn", "EGN noise breakdown per carrier");
  egn->add_option("--config", config, "system configuration JSON")->required();
  egn->add_option("--out", out, "output CSV (default stdout)");
  egn->add_option("--powers", powers, "launch power per carrier, dBm, CSV");
  egn->add_option("--gains", gains, "gain per span, dB, CSV (default transparent)");
  egn->add_option("--sweep", sweep, "common launch power sweep lo:hi:step, dBm (default -6:6:2)");
  egn->add_option("--quad-res", quad_res, "quadrature points per band for the outer integral");

  auto* ssfm = app.add_subcommand("ssfm", "split-step measurement next to the EGN prediction");
  ssfm->add_option("--config", config, "system configuration JSON")->required();
  ssfm->add_option("--out", out, "output CSV (default stdout)");
  ssfm->add_option("--gains", gains, "gain per span, dB, CSV (default transparent)");
  ssfm->add_option("--powers", powers, "launch power per carrier, dBm, CSV");
  ssfm->add_option("--sweep", sweep, "common launch power sweep lo:hi:step, dBm (default -6:6:2)");
  ssfm->add_option("--seed", seed, "random seed (default 1)");
  ssfm->add_option("--steps-per-span", steps, "split steps per span (default 160)");
  ssfm->add_option("--symbols", symbols, "symbols per carrier (default 4096)");
  ssfm->add_option("--guard", guard, "symbols dropped at each end before measuring (default min(256, symbols/8))");
  ssfm->add_option("--gamma-scale", gamma_scale, "multiplies the Kerr coefficient; 0 gives a linear run");
  ssfm->add_option("--quad-res", quad_res, "quadrature points per band for the EGN column");
  ssfm->add_flag("--step-check", step_check, "rerun with doubled steps and flag rows moving more than 0.05 dB");

  auto* opt = app.add_subcommand("optimize", "max-min margin allocation");
  opt->add_option("--config", config, "system configuration JSON")->required();
  opt->add_option("--out", out, "output prefix; writes <prefix>.json, <prefix>_carriers.csv, <prefix>_gains.csv");
  opt->add_option("--scenario", scenario, "equal | power | joint | all")
      ->check(CLI::IsMember({"equal", "power", "joint", "all"}));
  opt->add_option("--epsilon", epsilon, "bisection tolerance, nats");
  opt->add_option("--quad-res", quad_res, "quadrature points per band");

  auto* cache = app.add_subcommand("cache", "tensor cache maintenance");
  cache->require_subcommand(1);
  auto* info = cache->add_subcommand("info", "list cached tensor files");
  auto* clear = cache->add_subcommand("clear", "delete cached tensor files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*info || *clear) {
      const auto dir = cache_directory();
      std::size_t n = 0;
      for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() != ".fpxt") continue;
        ++n;
        if (*clear) {
          std::filesystem::remove(e.path());
          continue;
        }
        std::string why;
        const auto X = read_tensor_cache(e.path(), &why);
        std::cout << e.path().filename().string() << "  " << e.file_size() << " bytes";
        if (X)
          std::cout << "  fingerprint " << fingerprint_hex(X->fingerprint) << "  R=" << X->quad.points_per_band
                    << "  max_rel_error " << X->max_rel_error;
        else
          std::cout << "  unreadable: " << why;
        std::cout << '\n';
      }
      std::cout << (*clear ? "removed " : "found ") << n << " file(s) in " << dir.string() << '\n';
      return 0;
    }

    const SystemConfig cfg = load_system_config_file(config);
    const QuadratureSpec q = quad_spec(quad_res);

    if (*egn) {
      const XTensors X = load_or_compute_x(cfg, q, &std::cerr);
      const Eigen::VectorXd G = gains_or_default(cfg, gains);
      std::string text = egn_csv_header();
      for (const auto& [p, P] : power_points(cfg, powers, sweep))
        text += egn_csv_rows(cfg, p, evaluate_link(cfg, X, cfg.cumulants(), P, G));
      emit(out, text);
      return 0;
    }

    if (*ssfm) {
      SsfmOptions o;
      o.seed = seed;
      if (steps > 0) o.steps_per_span = steps;
      if (symbols > 0) o.n_symbols = symbols;
      o.guard_symbols = guard >= 0 ? guard : std::min(o.guard_symbols, o.n_symbols / 8);
      o.gamma_scale = gamma_scale;
      o.check(cfg);
      const XTensors X = load_or_compute_x(cfg, q, &std::cerr);
      const Eigen::VectorXd G = gains_or_default(cfg, gains);
      std::string text = ssfm_csv_header();
      for (const auto& [p, P] : power_points(cfg, powers, sweep)) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto m = run_ssfm(cfg, P, G, o);
        std::string status = "ok";
        if (step_check) {
          SsfmOptions o2 = o;
          o2.steps_per_span *= 2;
          const auto m2 = run_ssfm(cfg, P, G, o2);
          for (std::size_t l = 0; l < m.size(); ++l)
            if (m[l].active && std::abs(m[l].snr_db - m2[l].snr_db) > 0.05) status = "warn_step_convergence";
        }
        const auto egn_perf = evaluate_link(cfg, X, cfg.cumulants(), P, G);
        text += ssfm_csv_rows(cfg, p, m, egn_perf, status);
        std::cerr << "ssfm " << p << " dBm done in "
                  << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
      }
      emit(out, text);
      return 0;
    }

    if (*opt) {
      SystemConfig c = cfg;
      if (epsilon > 0.0) c.solver.epsilon = epsilon;
      if (c.link.lightpaths.empty()) throw ConfigError("validation error: no lightpaths to optimize");
      const XTensors X = load_or_compute_x(c, q, &std::cerr);
      const HTensor H = reshape_to_h(X, c);
      ScenarioReport rep;
      rep.fingerprint = fingerprint_hex(c.fingerprint);
      bool converged = true;
      auto run = [&](const char* name, Allocation (*f)(const SystemConfig&, const HTensor&)) {
        if (scenario != "all" && scenario != name) return;
        const auto t0 = std::chrono::steady_clock::now();
        const Allocation a = f(c, H);
        converged = converged && a.converged;
        rep.scenarios.push_back(tabulate(c, X, a));
        std::cerr << name << ": min margin " << rep.scenarios.back().min_margin_db << " dB, "
                  << a.iterations << " dual iterations, "
                  << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
      };
      run("equal", scenario_equal_power);
      run("power", scenario_power_only);
      run("joint", scenario_joint);
      const std::string order = check_ordering(rep);
      const std::string prefix = out.empty() ? "fiberplan_report" : out;
      emit(prefix + ".json", report_json(rep));
      emit(prefix + "_carriers.csv", report_carrier_csv(rep));
      emit(prefix + "_gains.csv", report_gain_csv(rep));
      if (!order.empty()) {
        std::cerr << "error: " << order << '\n';
        return kExitNumeric;
      }
      if (!converged) {
        std::cerr << "error: bisection did not converge; report is partial\n";
        return kExitNumeric;
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
