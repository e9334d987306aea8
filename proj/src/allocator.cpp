#include "fiberplan/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fiberplan/noise.hpp"
#include "fiberplan/units.hpp"

namespace fiberplan {

HTensor::HTensor(std::size_t n_carriers, std::size_t n_modes, const XTensors& X)
    : nc_(n_carriers), nm_(n_modes), X_(&X) {}

double HTensor::a(std::size_t s, std::size_t l, std::size_t l1, std::size_t l2, std::size_t l3) const {
  const std::size_t p = mode(l), q = mode(l1);
  if (mode(l2) != q || mode(l3) != p) return 0.0;
  return X_->a(s, channel(l), p, channel(l1), channel(l2), channel(l3), q);
}

HTensor reshape_to_h(const XTensors& X, const SystemConfig& cfg) {
  if (X.n_channels() != cfg.num_channels() || X.n_modes() != cfg.num_modes())
    throw ConfigError("dimension error: X tensors do not match the configuration");
  return HTensor(cfg.num_carriers(), cfg.num_modes(), X);
}

namespace {

using Exponent = std::vector<int>;

struct TermSink {
  std::map<Exponent, double> terms;
  void add(const Exponent& e, double coef) {
    if (coef != 0.0) terms[e] += coef;
  }
};

void to_matrix(const std::map<Exponent, double>& terms, std::size_t nz, Eigen::MatrixXd& E, Eigen::VectorXd& logc,
               Eigen::VectorXd* sign) {
  std::vector<std::pair<Exponent, double>> kept;
  for (const auto& [e, c] : terms)
    if (c != 0.0) kept.emplace_back(e, c);
  E.resize(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(nz));
  logc.resize(static_cast<Eigen::Index>(kept.size()));
  if (sign) sign->resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    for (std::size_t v = 0; v < nz; ++v) E(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(v)) = kept[j].first[v];
    logc(static_cast<Eigen::Index>(j)) = std::log(std::abs(kept[j].second));
    if (sign) (*sign)(static_cast<Eigen::Index>(j)) = kept[j].second > 0.0 ? 1.0 : -1.0;
    else if (kept[j].second < 0.0) throw NumericError("negative saturation term");
  }
}

// ln sum_j sign_j exp(t_j) with its gradient weights; +inf when the sum is not positive.
double signed_lse(const Eigen::MatrixXd& E, const Eigen::VectorXd& logc, const Eigen::VectorXd* sign,
                  const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
  if (E.rows() == 0) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd t = logc + E * z;
  const double m = t.maxCoeff();
  Eigen::VectorXd w = (t.array() - m).exp();
  if (sign) w.array() *= sign->array();
  const double S = w.sum();
  if (!(S > 0.0)) return std::numeric_limits<double>::infinity();
  if (grad) *grad = E.transpose() * (w / S);
  return m + std::log(S);
}

}  // namespace

NoiseModel build_noise_model(const SystemConfig& cfg, const HTensor& H, const Cumulants& cum) {
  const auto routes = carrier_routes(cfg);
  const std::size_t nc = cfg.num_carriers(), ns = cfg.num_spans(), nz = nc + ns;
  NoiseModel nm;
  nm.n_carriers = nc;
  nm.n_spans = ns;
  nm.carriers.resize(nc);
  std::vector<double> lnL(ns);
  for (std::size_t s = 0; s < ns; ++s) lnL[s] = std::log(span_transmittance(cfg, s));

  const double k1 = cum.kappa1, k2 = cum.kappa2, k3 = cum.kappa3;
  const double hvb = photon_noise_unit(cfg);

  for (std::size_t l = 0; l < nc; ++l) {
    const auto& r = routes[l];
    auto& C = nm.carriers[l];
    C.active = r.active;
    if (!r.active) continue;
    C.path = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ns));
    for (std::size_t s = r.first_span; s <= r.last_span; ++s) {
      C.path(static_cast<Eigen::Index>(s)) = 1.0;
      C.log_loss += lnL[s];
    }
    C.log_required = std::log(r.required_snr);

    TermSink sink;
    // receiver noise and ASE
    sink.add(Exponent(nz, 0), cfg.receiver_noise);
    {
      Exponent e(nz, 0);
      double lc = 0.0;
      for (std::size_t n = r.first_span; n <= r.last_span; ++n) {
        e[nc + n] = 1;
        lc += lnL[n];
      }
      const double nf = cfg.link.spans[r.first_span].amplifier.noise_figure;
      sink.add(e, nf * (cfg.link.booster_gain - 1.0) * hvb * std::exp(lc));
    }
    for (std::size_t s = r.first_span; s <= r.last_span; ++s) {
      Exponent e(nz, 0);
      double lc = 0.0;
      for (std::size_t n = s + 1; n <= r.last_span; ++n) {
        e[nc + n] = 1;
        lc += lnL[n];
      }
      const double unit = cfg.link.spans[s].amplifier.noise_figure * hvb * std::exp(lc);
      sink.add(e, -unit);
      e[nc + s] = 1;
      sink.add(e, unit);
    }

    // NLI: each H entry carries the GN weight plus the fourth/sixth-order
    // corrections whose power products coincide with it.
    for (std::size_t s = r.first_span; s <= r.last_span; ++s) {
      Exponent carry(nz, 0);
      double lc_carry = 0.0;
      for (std::size_t n = s; n <= r.last_span; ++n) {
        carry[nc + n] += 1;
        lc_carry += lnL[n];
      }
      auto add_power = [&](Exponent& e, double& lc, std::size_t a) {
        e[a] += 1;
        for (std::size_t n = routes[a].first_span; n < s; ++n) {
          e[nc + n] += 1;
          lc += lnL[n];
        }
      };
      for (std::size_t l1 = 0; l1 < nc; ++l1) {
        if (!routes[l1].present(s)) continue;
        for (std::size_t l2 = 0; l2 < nc; ++l2) {
          if (!routes[l2].present(s)) continue;
          for (std::size_t l3 = 0; l3 < nc; ++l3) {
            const double h = H.a(s, l, l1, l2, l3);
            if (h == 0.0) continue;
            double w = 0.75 * k1 * k1 * k1;
            if (l1 == l2) w += 1.25 * k2 * k1;                              // 5 X^b / 4
            if (H.channel(l2) == H.channel(l3)) w += 0.25 * k2 * k1;        // X^c / 4
            if (l1 == l2 && H.channel(l1) == H.channel(l3)) w += 0.25 * k3;  // X^d / 4
            if (w == 0.0) continue;
            Exponent e = carry;
            double lc = lc_carry;
            add_power(e, lc, l1);
            add_power(e, lc, l2);
            add_power(e, lc, l3);
            sink.add(e, w * h * std::exp(lc));
          }
        }
      }
    }
    to_matrix(sink.terms, nz, C.E, C.logc, &C.sign);
  }

  nm.sat_E.resize(ns);
  nm.sat_logc.resize(ns);
  nm.log_psat.resize(static_cast<Eigen::Index>(ns));
  nm.log_gmax.resize(static_cast<Eigen::Index>(ns));
  for (std::size_t s = 0; s < ns; ++s) {
    std::map<Exponent, double> terms;
    for (std::size_t a = 0; a < nc; ++a) {
      if (!routes[a].present(s)) continue;
      Exponent e(nz, 0);
      e[a] = 1;
      double lc = 0.0;
      for (std::size_t n = routes[a].first_span; n < s; ++n) {
        e[nc + n] = 1;
        lc += lnL[n];
      }
      terms[e] += std::exp(lc);
    }
    to_matrix(terms, nz, nm.sat_E[s], nm.sat_logc[s], nullptr);
    nm.log_psat(static_cast<Eigen::Index>(s)) = std::log(cfg.link.spans[s].amplifier.saturation_power);
    nm.log_gmax(static_cast<Eigen::Index>(s)) = std::log(cfg.link.spans[s].amplifier.max_gain);
  }
  return nm;
}

Eigen::VectorXd pack(const Eigen::VectorXd& p_hat, const Eigen::VectorXd& g) {
  Eigen::VectorXd z(p_hat.size() + g.size());
  z << p_hat, g;
  return z;
}

double margin_constraint_value(const NoiseModel& nm, std::size_t l, const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
  const auto& C = nm.carriers.at(l);
  if (!C.active) throw ConfigError("margin constraint requested for an idle carrier");
  const auto nc = static_cast<Eigen::Index>(nm.n_carriers);
  const auto ns = static_cast<Eigen::Index>(nm.n_spans);
  const double lnN = signed_lse(C.E, C.logc, &C.sign, z, grad);
  const double v = C.log_required + lnN - z(static_cast<Eigen::Index>(l)) - C.path.dot(z.tail(ns)) - C.log_loss;
  if (grad && std::isfinite(v)) {
    (*grad)(static_cast<Eigen::Index>(l)) -= 1.0;
    grad->segment(nc, ns) -= C.path;
  }
  return v;
}

double saturation_value(const NoiseModel& nm, std::size_t s, const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
  const double v = signed_lse(nm.sat_E[s], nm.sat_logc[s], nullptr, z, grad);
  if (grad && nm.sat_E[s].rows() == 0) *grad = Eigen::VectorXd::Zero(z.size());
  return v - nm.log_psat(static_cast<Eigen::Index>(s));
}

double lagrangian(const NoiseModel& nm, const DualState& dual, double beta, const Eigen::VectorXd& z,
                  Eigen::VectorXd* grad) {
  double L = 0.0;
  if (grad) *grad = Eigen::VectorXd::Zero(z.size());
  Eigen::VectorXd g;
  for (std::size_t l = 0; l < nm.n_carriers; ++l) {
    const double lam = dual.lambda(static_cast<Eigen::Index>(l));
    if (lam == 0.0 || !nm.carriers[l].active) continue;
    const double c = margin_constraint_value(nm, l, z, grad ? &g : nullptr);
    if (!std::isfinite(c)) return std::numeric_limits<double>::infinity();
    L += lam * (c - beta);
    if (grad) *grad += lam * g;
  }
  for (std::size_t s = 0; s < nm.n_spans; ++s) {
    const double mu = dual.mu(static_cast<Eigen::Index>(s));
    if (mu == 0.0 || nm.sat_E[s].rows() == 0) continue;
    L += mu * saturation_value(nm, s, z, grad ? &g : nullptr);
    if (grad) *grad += mu * g;
  }
  return L;
}

Eigen::VectorXd Box::project(const Eigen::VectorXd& z) const {
  Eigen::VectorXd p = z.cwiseMax(lo).cwiseMin(hi);
  for (Eigen::Index j = 0; j < z.size(); ++j)
    if (free(j) == 0.0) p(j) = lo(j);
  return p;
}

Box default_box(const NoiseModel& nm, const SystemConfig& cfg, bool gains_free, const Eigen::VectorXd& frozen_g) {
  (void)cfg;
  const auto nc = static_cast<Eigen::Index>(nm.n_carriers), ns = static_cast<Eigen::Index>(nm.n_spans);
  Box b;
  b.lo.resize(nc + ns);
  b.hi.resize(nc + ns);
  b.free.resize(nc + ns);
  for (Eigen::Index l = 0; l < nc; ++l) {
    b.lo(l) = std::log(1e-6);  // -30 dBm
    b.hi(l) = 0.0;             // +30 dBm
    b.free(l) = nm.carriers[static_cast<std::size_t>(l)].active ? 1.0 : 0.0;
  }
  for (Eigen::Index s = 0; s < ns; ++s) {
    if (gains_free) {
      b.lo(nc + s) = 0.0;
      b.hi(nc + s) = nm.log_gmax(s);
      b.free(nc + s) = 1.0;
    } else {
      b.lo(nc + s) = b.hi(nc + s) = frozen_g(s);
      b.free(nc + s) = 0.0;
    }
  }
  return b;
}

namespace {

// Euclidean projection onto {x >= 0, sum x = 1} restricted to `mask`.
void project_simplex(Eigen::VectorXd& x, const std::vector<char>& mask) {
  std::vector<double> v;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (mask[static_cast<std::size_t>(j)]) v.push_back(x(j));
  if (v.empty()) return;
  std::sort(v.begin(), v.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    cum += v[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (v[k] - t > 0.0) theta = t;
  }
  for (Eigen::Index j = 0; j < x.size(); ++j)
    x(j) = mask[static_cast<std::size_t>(j)] ? std::max(0.0, x(j) - theta) : 0.0;
}

struct InnerResult {
  Eigen::VectorXd z;
  double value = 0.0;
  double pg_norm = 0.0;
  bool converged = false;
};

// Projected gradient descent, Barzilai-Borwein trial step, Armijo backtracking.
InnerResult minimize_lagrangian(const NoiseModel& nm, const DualState& dual, double beta, const Box& box,
                                const Eigen::VectorXd& z0, const SolverOptions& opt) {
  auto F = [&](const Eigen::VectorXd& z, Eigen::VectorXd* g) {
    const double v = lagrangian(nm, dual, beta, z, g);
    if (g) *g = g->cwiseProduct(box.free);
    return v;
  };
  InnerResult r;
  r.z = box.project(z0);
  Eigen::VectorXd g, gt;
  double f = F(r.z, &g);
  if (!std::isfinite(f)) throw NumericError("Lagrangian is not finite at the starting point");
  double step = 1.0;
  for (int it = 0; it < opt.max_inner_iterations; ++it) {
    r.pg_norm = (r.z - box.project(r.z - g)).lpNorm<Eigen::Infinity>();
    if (r.pg_norm < opt.inner_tolerance) {
      r.converged = true;
      break;
    }
    Eigen::VectorXd zt;
    double ft = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      zt = box.project(r.z - step * g);
      ft = F(zt, &gt);
      if (std::isfinite(ft) && ft <= f + 1e-4 * g.dot(zt - r.z)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::VectorXd sv = zt - r.z, yv = gt - g;
    const double sy = sv.dot(yv);
    step = sy > 0.0 ? std::clamp(sv.squaredNorm() / sy, 1e-10, 1e10) : std::min(step * 2.0, 1e10);
    if (!g.allFinite()) throw NumericError("non-finite Lagrangian gradient");
    r.z = zt;
    f = ft;
    g = gt;
  }
  r.value = f;
  return r;
}

double max_constraint(const NoiseModel& nm, const Eigen::VectorXd& z) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < nm.n_carriers; ++l)
    if (nm.carriers[l].active) m = std::max(m, margin_constraint_value(nm, l, z));
  return m;
}

double max_saturation(const NoiseModel& nm, const Eigen::VectorXd& z) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < nm.n_spans; ++s)
    if (nm.sat_E[s].rows() > 0) m = std::max(m, saturation_value(nm, s, z));
  return m;
}

}  // namespace

FeasibilityResult dual_feasibility_solve(const NoiseModel& nm, const Box& box, double beta, const Eigen::VectorXd& z0,
                                         const SolverOptions& opt) {
  if (!std::isfinite(beta)) throw NumericError("non-finite beta");
  const auto nc = static_cast<Eigen::Index>(nm.n_carriers), ns = static_cast<Eigen::Index>(nm.n_spans);
  std::vector<char> active(static_cast<std::size_t>(nc));
  for (Eigen::Index l = 0; l < nc; ++l) active[static_cast<std::size_t>(l)] = nm.carriers[static_cast<std::size_t>(l)].active;
  DualState dual;
  dual.lambda = Eigen::VectorXd::Zero(nc);
  for (Eigen::Index l = 0; l < nc; ++l) dual.lambda(l) = active[static_cast<std::size_t>(l)] ? 1.0 : 0.0;
  dual.lambda /= dual.lambda.sum();
  dual.mu = Eigen::VectorXd::Zero(ns);
  dual.nu = Eigen::VectorXd::Zero(ns);
  dual.a = opt.step_lambda;
  dual.b = opt.step_mu;
  dual.c = opt.step_nu;

  FeasibilityResult res;
  Eigen::VectorXd z = box.project(z0), zsum = Eigen::VectorXd::Zero(z.size());
  auto feasible = [&](const Eigen::VectorXd& x, double* mc) {
    *mc = max_constraint(nm, x);
    return *mc <= beta + 1e-6 && max_saturation(nm, x) <= 1e-9;
  };
  for (int t = 1; t <= opt.max_outer_iterations; ++t) {
    res.outer_iterations = t;
    const auto inner = minimize_lagrangian(nm, dual, beta, box, z, opt);
    z = inner.z;
    double mc = 0.0;
    if (feasible(z, &mc)) {
      res.status = Feasibility::Feasible;
      res.z = z;
      res.max_constraint = mc;
      return res;
    }
    zsum += z;
    const Eigen::VectorXd zbar = zsum / t;
    double mcb = 0.0;
    if (feasible(zbar, &mcb)) {
      res.status = Feasibility::Feasible;
      res.z = zbar;
      res.max_constraint = mcb;
      return res;
    }
    // weak duality: a positive dual value rules out every feasible point
    if (inner.converged && inner.value > 1e-7) {
      res.status = Feasibility::Infeasible;
      res.z = z;
      res.max_constraint = mc;
      return res;
    }
    const double decay = 1.0 / std::sqrt(static_cast<double>(t));
    for (Eigen::Index l = 0; l < nc; ++l)
      if (active[static_cast<std::size_t>(l)])
        dual.lambda(l) += dual.a * decay * (margin_constraint_value(nm, static_cast<std::size_t>(l), z) - beta);
    project_simplex(dual.lambda, active);
    if (opt.saturation_active)
      for (Eigen::Index s = 0; s < ns; ++s)
        if (nm.sat_E[static_cast<std::size_t>(s)].rows() > 0)
          dual.mu(s) = std::max(0.0, dual.mu(s) + dual.b * decay * saturation_value(nm, static_cast<std::size_t>(s), z));
  }
  res.status = Feasibility::CapHit;
  res.z = z;
  res.max_constraint = max_constraint(nm, z);
  return res;
}

void finalize_allocation(const NoiseModel& nm, Allocation& a) {
  const Eigen::VectorXd z = pack(a.p_hat, a.g);
  a.margins_db.assign(nm.n_carriers, std::numeric_limits<double>::quiet_NaN());
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < nm.n_carriers; ++l) {
    if (!nm.carriers[l].active) continue;
    const double c = margin_constraint_value(nm, l, z);
    a.margins_db[l] = -nats_to_db(c);
    worst = std::max(worst, c);
  }
  a.beta = worst;
  a.min_margin_db = -nats_to_db(worst);
}

namespace {

struct Prepared {
  NoiseModel nm;
  Eigen::VectorXd g_transparent;  // ln
};

Prepared prepare(const SystemConfig& cfg, const HTensor& H) {
  if (cfg.num_spans() == 0) throw ConfigError("validation error: network has no spans");
  Prepared p{build_noise_model(cfg, H, cfg.cumulants()), transparent_gains(cfg).array().log()};
  return p;
}

double min_margin_nats_equal(const Prepared& pr, double power_w) {
  const auto nc = static_cast<Eigen::Index>(pr.nm.n_carriers);
  const Eigen::VectorXd z = pack(Eigen::VectorXd::Constant(nc, std::log(power_w)), pr.g_transparent);
  return -max_constraint(pr.nm, z);
}

Allocation equal_power_impl(const SystemConfig& cfg, const Prepared& pr) {
  const auto& o = cfg.solver;
  double best_dbm = o.equal_power_min_dbm, best = -std::numeric_limits<double>::infinity();
  for (double dbm = o.equal_power_min_dbm; dbm <= o.equal_power_max_dbm + 1e-9; dbm += o.equal_power_step_db) {
    const double m = min_margin_nats_equal(pr, dbm_to_watt(dbm));
    if (m > best) {
      best = m;
      best_dbm = dbm;
    }
  }
  // golden-section refinement inside the neighbouring grid cells
  double a = std::max(o.equal_power_min_dbm, best_dbm - o.equal_power_step_db);
  double b = std::min(o.equal_power_max_dbm, best_dbm + o.equal_power_step_db);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = min_margin_nats_equal(pr, dbm_to_watt(x1)), f2 = min_margin_nats_equal(pr, dbm_to_watt(x2));
  for (int it = 0; it < 60 && b - a > 1e-6; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = min_margin_nats_equal(pr, dbm_to_watt(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = min_margin_nats_equal(pr, dbm_to_watt(x2));
    }
  }
  const double dbm = f1 > f2 ? x1 : x2;
  const double refined = std::max(f1, f2);
  Allocation al;
  al.scenario = "equal";
  al.p_hat = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(pr.nm.n_carriers),
                                       std::log(dbm_to_watt(refined >= best ? dbm : best_dbm)));
  al.g = pr.g_transparent;
  finalize_allocation(pr.nm, al);
  return al;
}

Allocation bisection_impl(const SystemConfig& cfg, const Prepared& pr, bool gains_free) {
  const auto& o = cfg.solver;
  const NoiseModel& nm = pr.nm;
  const Box box = default_box(nm, cfg, gains_free, pr.g_transparent);

  // start from the best equal-power point, last amplifier at its cap
  Allocation eq = equal_power_impl(cfg, pr);
  Eigen::VectorXd g0 = pr.g_transparent;
  if (gains_free) g0(g0.size() - 1) = nm.log_gmax(g0.size() - 1);
  Eigen::VectorXd z0 = pack(eq.p_hat, g0);

  Allocation al;
  al.scenario = gains_free ? "joint" : "power";
  double u = o.beta_upper, lo = o.beta_lower;
  const auto top = dual_feasibility_solve(nm, box, u, z0, o);
  al.iterations += top.outer_iterations;
  if (top.status != Feasibility::Feasible)
    throw ConfigError("bisection: upper bound beta = " + std::to_string(u) + " is not feasible");
  const auto bottom = dual_feasibility_solve(nm, box, lo, z0, o);
  al.iterations += bottom.outer_iterations;
  if (bottom.status == Feasibility::Feasible)
    throw ConfigError("bisection: lower bound beta = " + std::to_string(lo) + " is already feasible; bounds inverted");

  Eigen::VectorXd best = top.z;
  // the equal-power start is itself feasible for its own beta
  const double beta0 = max_constraint(nm, box.project(z0));
  if (beta0 < u && max_saturation(nm, box.project(z0)) <= 1e-9) {
    u = beta0;
    best = box.project(z0);
  }
  while (u - lo > o.epsilon) {
    const double beta = 0.5 * (u + lo);
    const auto r = dual_feasibility_solve(nm, box, beta, best, o);
    al.iterations += r.outer_iterations;
    if (r.status == Feasibility::Feasible) {
      u = std::min(beta, r.max_constraint);
      best = r.z;
    } else {
      if (r.status == Feasibility::CapHit) ++al.cap_hits;
      lo = beta;
    }
  }
  const auto nc = static_cast<Eigen::Index>(nm.n_carriers);
  al.p_hat = best.head(nc);
  al.g = best.tail(static_cast<Eigen::Index>(nm.n_spans));
  finalize_allocation(nm, al);
  al.converged = std::isfinite(al.beta);
  return al;
}

}  // namespace

Allocation bisection_optimize(const SystemConfig& cfg, const HTensor& H, bool gains_free) {
  return bisection_impl(cfg, prepare(cfg, H), gains_free);
}

Allocation scenario_equal_power(const SystemConfig& cfg, const HTensor& H) {
  return equal_power_impl(cfg, prepare(cfg, H));
}

Allocation scenario_power_only(const SystemConfig& cfg, const HTensor& H) {
  return bisection_impl(cfg, prepare(cfg, H), false);
}

Allocation scenario_joint(const SystemConfig& cfg, const HTensor& H) {
  return bisection_impl(cfg, prepare(cfg, H), true);
}

}  // namespace fiberplan
