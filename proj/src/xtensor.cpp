#include "fiberplan/xtensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

namespace fiberplan {

void QuadratureSpec::check() const {
  if (points_per_band < kMinPointsPerBand)
    throw ConfigError("quadrature resolution " + std::to_string(points_per_band) +
                      " is below the minimum of " + std::to_string(kMinPointsPerBand) + " points per band");
  if (!(rel_tol > 0.0 && rel_tol < 0.1)) throw ConfigError("quadrature rel_tol must lie in (0, 0.1)");
}

XTensors::XTensors(std::size_t n_channels, std::size_t n_modes, std::vector<std::size_t> span_kind,
                   std::size_t n_kinds)
    : nch_(n_channels), nm_(n_modes), n_kinds_(n_kinds), span_kind_(std::move(span_kind)) {
  values_.assign(n_kinds_ * block_size(), 0.0);
}

double XTensors::a(std::size_t s, std::size_t i, std::size_t p, std::size_t k, std::size_t m, std::size_t n,
                   std::size_t q) const {
  if (!present(s, i, p) || !present(s, k, q) || !present(s, m, q) || !present(s, n, p)) return 0.0;
  return raw(span_kind_[s], i, p, k, m, n, q);
}

bool x_support(double ci, double ck, double cm, double cn, double bandwidth) {
  // w = u + v - f ranges over a box of half-width 3B/2 around cn + cm - ci
  return std::abs(ck - (cn + cm - ci)) < 2.0 * bandwidth * (1.0 - 1e-12);
}

namespace {

struct Integrand {
  const EtaKernelParams& k;
  double f, v;
  double operator()(double u) const { return eta_abs2(k, f, u - f, v - f); }
};

// Roots of the phase mismatch in (a, b) at fixed (f, v). u = f is always
// one; others are found by sign changes on a coarse grid.
std::vector<double> mismatch_roots(const EtaKernelParams& k, double f, double v, double a, double b) {
  std::vector<double> roots;
  if (f > a && f < b) roots.push_back(f);
  constexpr int kSamples = 16;
  auto dbeta = [&](double u) { return phase_mismatch(*k.observed, *k.interferer, f, u, v); };
  const double tiny = 1e-9 * (b - a);
  double x0 = a, y0 = dbeta(a);
  for (int j = 1; j <= kSamples; ++j) {
    const double x1 = a + (b - a) * j / kSamples;
    const double y1 = dbeta(x1);
    if (y0 * y1 < 0.0) {
      double lo = x0, hi = x1, ylo = y0;
      for (int it = 0; it < 80 && hi - lo > tiny; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double ym = dbeta(mid);
        if ((ym < 0.0) == (ylo < 0.0)) {
          lo = mid;
          ylo = ym;
        } else {
          hi = mid;
        }
      }
      const double r = 0.5 * (lo + hi);
      bool dup = false;
      for (double e : roots) dup = dup || std::abs(e - r) < 1e3 * tiny;
      if (!dup) roots.push_back(r);
    }
    x0 = x1;
    y0 = y1;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Integral over [r, e] (either orientation) of a Lorentzian-like peak
// sitting at r, via u = r + w0 tan t.
template <typename G>
quad::Estimate peak_side(G&& g, double r, double e, double w0, double rel_tol) {
  const double len = std::abs(e - r);
  if (len <= 0.0) return {};
  const double sgn = e > r ? 1.0 : -1.0;
  if (!(w0 > 0.0) || w0 * 4.0 > len) {
    auto res = quad::integrate(g, std::min(r, e), std::max(r, e), rel_tol);
    return res;
  }
  const double tmax = std::atan(len / w0);
  auto h = [&](double t) {
    const double c = std::cos(t);
    return g(r + sgn * w0 * std::tan(t)) * w0 / (c * c);
  };
  return quad::integrate(h, 0.0, tmax, rel_tol);
}

quad::Estimate u_integral(const EtaKernelParams& k, double f, double v, double a, double b, double rel_tol) {
  if (!(b > a)) return {};
  Integrand g{k, f, v};
  const auto roots = mismatch_roots(k, f, v, a, b);
  quad::Estimate total;
  double left = a;
  for (std::size_t j = 0; j < roots.size(); ++j) {
    const double r = roots[j];
    const double right = (j + 1 < roots.size()) ? 0.5 * (r + roots[j + 1]) : b;
    const double slope = std::abs(phase_mismatch_slope_u(*k.observed, *k.interferer, f, r, v));
    const double w0 = slope > 0.0 ? k.alpha / slope : 0.0;
    const auto lo = peak_side(g, r, left, w0, rel_tol);
    const auto hi = peak_side(g, r, right, w0, rel_tol);
    total.value += lo.value + hi.value;
    total.error += lo.error + hi.error;
    left = right;
  }
  if (roots.empty()) total = quad::integrate(g, a, b, rel_tol);
  return total;
}

}  // namespace

quad::Estimate x_entry(const EtaKernelParams& k, double ci, double ck, double cm, double cn, double B,
                       const QuadratureSpec& spec) {
  spec.check();
  if (!x_support(ci, ck, cm, cn, B)) return {};
  const int R = spec.points_per_band;
  const double tol = spec.rel_tol;
  quad::Estimate acc;
  for (int j = 0; j < R; ++j) {
    const double f = quad::midpoint_node(ci - 0.5 * B, ci + 0.5 * B, R, j);
    // v range where the u interval is non-empty
    const double shift = ck - cn + f;
    const double va = std::max(cm - 0.5 * B, shift - B);
    const double vb = std::min(cm + 0.5 * B, shift + B);
    if (!(vb > va)) continue;
    auto V = [&](double v) {
      const double lo = std::max(cn - 0.5 * B, ck - 0.5 * B + f - v);
      const double hi = std::min(cn + 0.5 * B, ck + 0.5 * B + f - v);
      return u_integral(k, f, v, lo, hi, 0.1 * tol).value;
    };
    // kinks of V: overlap change, the phase-matched line v = f, and where
    // an endpoint of the u interval crosses u = f
    std::vector<double> cuts = {va, vb, shift, f, ck - 0.5 * B, ck + 0.5 * B};
    std::sort(cuts.begin(), cuts.end());
    double prev = va;
    for (double c : cuts) {
      if (c <= prev || c > vb) continue;
      const auto piece = quad::integrate(V, prev, c, tol);
      acc.value += piece.value;
      acc.error += piece.error;
      prev = c;
    }
  }
  const double scale = (B / R) / (B * B * B);
  return {acc.value * scale, acc.error * scale};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> span_kinds(const SystemConfig& cfg) {
  std::map<std::pair<std::size_t, double>, std::size_t> seen;
  std::vector<std::size_t> kind(cfg.num_spans()), rep;
  for (std::size_t s = 0; s < cfg.num_spans(); ++s) {
    const auto key = std::make_pair(cfg.link.spans[s].fiber, cfg.link.spans[s].length);
    auto it = seen.find(key);
    if (it == seen.end()) {
      it = seen.emplace(key, rep.size()).first;
      rep.push_back(s);
    }
    kind[s] = it->second;
  }
  return {kind, rep};
}

std::vector<std::vector<char>> occupancy(const SystemConfig& cfg) {
  const auto routes = carrier_routes(cfg);
  std::vector<std::vector<char>> present(cfg.num_spans(), std::vector<char>(cfg.num_carriers(), 0));
  for (std::size_t s = 0; s < cfg.num_spans(); ++s)
    for (std::size_t c = 0; c < routes.size(); ++c) present[s][c] = routes[c].present(s) ? 1 : 0;
  return present;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t nt = std::min(hw, n);
  if (nt <= 1) {
    for (std::size_t j = 0; j < n; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (std::size_t j = next++; j < n; j = next++) {
        try {
          fn(j);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

XTensors compute_x_tensors(const SystemConfig& cfg, const QuadratureSpec& spec,
                           const std::function<void(std::size_t, std::size_t)>& progress) {
  spec.check();
  const auto [kind, rep] = span_kinds(cfg);
  const std::size_t nch = cfg.num_channels(), nm = cfg.num_modes();
  XTensors X(nch, nm, kind, rep.size());
  X.quad = spec;
  X.fingerprint = cfg.fingerprint;
  X.set_occupancy(occupancy(cfg));
  const double B = cfg.channels.bandwidth;

  struct Job {
    std::size_t kind, flat;
    std::size_t i, p, k, m, n, q;
  };
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < rep.size(); ++t)
    for (std::size_t i = 0; i < nch; ++i)
      for (std::size_t p = 0; p < nm; ++p)
        for (std::size_t k = 0; k < nch; ++k)
          for (std::size_t m = 0; m < nch; ++m)
            for (std::size_t n = 0; n < nch; ++n)
              for (std::size_t q = 0; q < nm; ++q) {
                const auto& ch = cfg.channels;
                if (!x_support(ch.offset(int(i)), ch.offset(int(k)), ch.offset(int(m)), ch.offset(int(n)), B))
                  continue;
                // u <-> v swap symmetry when both ride the same mode
                if (p == q && m > n) continue;
                jobs.push_back({t, X.index(i, p, k, m, n, q), i, p, k, m, n, q});
              }

  std::vector<double> rel_err(jobs.size(), 0.0);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;
  parallel_for(jobs.size(), [&](std::size_t j) {
    const Job& jb = jobs[j];
    const Span& sp = cfg.link.spans[rep[jb.kind]];
    const auto ker = EtaKernelParams::make(cfg.fibers[sp.fiber], jb.p, jb.q, sp.length);
    const auto& ch = cfg.channels;
    const auto e = x_entry(ker, ch.offset(int(jb.i)), ch.offset(int(jb.k)), ch.offset(int(jb.m)),
                           ch.offset(int(jb.n)), B, spec);
    if (!std::isfinite(e.value)) throw NumericError("non-finite X entry");
    X.raw_ref(jb.kind, jb.flat) = e.value;
    if (jb.p == jb.q && jb.m != jb.n) X.raw_ref(jb.kind, X.index(jb.i, jb.p, jb.k, jb.n, jb.m, jb.q)) = e.value;
    rel_err[j] = e.value > 0.0 ? e.error / e.value : 0.0;
    const std::size_t d = ++done;
    if (progress) {
      std::lock_guard<std::mutex> lk(progress_mu);
      progress(d, jobs.size());
    }
  });
  for (double r : rel_err) X.max_rel_error = std::max(X.max_rel_error, r);
  return X;
}

}  // namespace fiberplan
