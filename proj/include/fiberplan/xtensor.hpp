#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "fiberplan/config.hpp"
#include "fiberplan/kernel.hpp"
#include "fiberplan/quadrature.hpp"

namespace fiberplan {

struct QuadratureSpec {
  static constexpr int kMinPointsPerBand = 8;
  int points_per_band = 32;  // midpoint nodes over the observed band
  double rel_tol = 1e-4;     // adaptive inner integrals

  void check() const;
};

/// Dense storage for X^a over (i, p, k, m, n, q), one block per distinct
/// (fiber, length) span kind. The b, c, d tensors are slices of a:
///   X^b(k,k,n,q) = X^a(k,k,n,q),  X^c(k,n,k,q) = X^a(n,k,k,q),
///   X^d(n,n,n,q) = X^a(n,n,n,q).
/// Unit-height observation window over band i, so P^3 X is a power in W.
class XTensors {
 public:
  XTensors() = default;
  XTensors(std::size_t n_channels, std::size_t n_modes, std::vector<std::size_t> span_kind,
           std::size_t n_kinds);

  std::size_t n_channels() const { return nch_; }
  std::size_t n_modes() const { return nm_; }
  std::size_t n_spans() const { return span_kind_.size(); }
  std::size_t n_kinds() const { return n_kinds_; }
  std::size_t kind_of_span(std::size_t s) const { return span_kind_[s]; }
  std::size_t block_size() const { return nch_ * nch_ * nch_ * nch_ * nm_ * nm_; }

  std::size_t index(std::size_t i, std::size_t p, std::size_t k, std::size_t m, std::size_t n,
                    std::size_t q) const {
    return ((((i * nm_ + p) * nch_ + k) * nch_ + m) * nch_ + n) * nm_ + q;
  }

  /// Unmasked value for a span kind.
  double raw(std::size_t kind, std::size_t i, std::size_t p, std::size_t k, std::size_t m,
             std::size_t n, std::size_t q) const {
    return values_[kind * block_size() + index(i, p, k, m, n, q)];
  }
  double& raw_ref(std::size_t kind, std::size_t flat) { return values_[kind * block_size() + flat]; }

  /// Occupancy-masked value on span s. Zero unless (i,p), (k,q), (m,q),
  /// (n,p) are all carried on s.
  double a(std::size_t s, std::size_t i, std::size_t p, std::size_t k, std::size_t m, std::size_t n,
           std::size_t q) const;
  double b(std::size_t s, std::size_t i, std::size_t p, std::size_t k, std::size_t n, std::size_t q) const {
    return a(s, i, p, k, k, n, q);
  }
  double c(std::size_t s, std::size_t i, std::size_t p, std::size_t k, std::size_t n, std::size_t q) const {
    return a(s, i, p, n, k, k, q);
  }
  double d(std::size_t s, std::size_t i, std::size_t p, std::size_t n, std::size_t q) const {
    return a(s, i, p, n, n, n, q);
  }

  void set_occupancy(std::vector<std::vector<char>> present) { present_ = std::move(present); }
  bool present(std::size_t s, std::size_t ch, std::size_t mode) const {
    return present_.empty() || present_[s][ch * nm_ + mode] != 0;
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::size_t>& span_kinds() const { return span_kind_; }

  QuadratureSpec quad;
  std::uint64_t fingerprint = 0;
  double max_rel_error = 0.0;  // largest inner-quadrature error estimate

 private:
  std::size_t nch_ = 0, nm_ = 0, n_kinds_ = 0;
  std::vector<std::size_t> span_kind_;
  std::vector<double> values_;
  std::vector<std::vector<char>> present_;  // [span][carrier]
};

/// True when band k can hold f + f1 + f2 for f, f+f1, f+f2 in bands i, n, m.
bool x_support(double ci, double ck, double cm, double cn, double bandwidth);

/// One X^a entry: (1/B^3) * integral over f in band i, v in band m,
/// u in band n with w = u + v - f in band k, of |eta(f, u-f, v-f)|^2.
quad::Estimate x_entry(const EtaKernelParams& kernel, double ci, double ck, double cm, double cn,
                       double bandwidth, const QuadratureSpec& spec);

/// Groups spans by (fiber, length); returns kind per span and one
/// representative span per kind.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> span_kinds(const SystemConfig& cfg);

/// Occupancy per span from the lightpaths.
std::vector<std::vector<char>> occupancy(const SystemConfig& cfg);

/// Computes all supported entries; progress(done, total) is optional.
XTensors compute_x_tensors(const SystemConfig& cfg, const QuadratureSpec& spec,
                           const std::function<void(std::size_t, std::size_t)>& progress = {});

/// Runs fn(j) for j in [0, n) over hardware threads; each j is independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fiberplan
