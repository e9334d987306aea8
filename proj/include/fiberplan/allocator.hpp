#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fiberplan/config.hpp"
#include "fiberplan/xtensor.hpp"

namespace fiberplan {

/// X^a re-indexed by carrier: H_l(l1, l2, l3) = X^a_{i,p}(k, m, n, q) with
/// l = (i,p), l1 = (k,q), l2 = (m,q), l3 = (n,p); zero when the modes do
/// not line up. Carriers are channel-major.
class HTensor {
 public:
  HTensor() = default;
  HTensor(std::size_t n_carriers, std::size_t n_modes, const XTensors& X);

  std::size_t n_carriers() const { return nc_; }
  std::size_t n_spans() const { return X_ ? X_->n_spans() : 0; }
  std::size_t channel(std::size_t l) const { return l / nm_; }
  std::size_t mode(std::size_t l) const { return l % nm_; }

  /// Occupancy-masked entry on span s.
  double a(std::size_t s, std::size_t l, std::size_t l1, std::size_t l2, std::size_t l3) const;
  double b(std::size_t s, std::size_t l, std::size_t l1, std::size_t l3) const { return a(s, l, l1, l1, l3); }
  /// X^c(k, n, k, q) with l1 = (k,p), l2 = (k,q), l3 = (n,q)
  double c(std::size_t s, std::size_t l, std::size_t l1, std::size_t l2, std::size_t l3) const {
    return a(s, l, l3, l2, l1);
  }
  double d(std::size_t s, std::size_t l, std::size_t l1, std::size_t l3) const { return a(s, l, l1, l1, l3); }

 private:
  std::size_t nc_ = 0, nm_ = 1;
  const XTensors* X_ = nullptr;
};

HTensor reshape_to_h(const XTensors& X, const SystemConfig& cfg);

/// Every carrier's noise as a signed sum of exponentials of an affine map
/// of z = (p_hat per carrier, g per span):
///   N_l(z) = sum_j sign_j exp(logc_j + E_j z).
/// Terms with identical exponents are merged, so the booster/in-line ASE
/// telescopes and the receiver noise absorbs the -1 of every (G - 1).
struct NoiseModel {
  struct Carrier {
    bool active = false;
    Eigen::MatrixXd E;     // terms x nz
    Eigen::VectorXd logc;  // ln |coef|
    Eigen::VectorXd sign;  // +1 / -1
    Eigen::VectorXd path;  // 1 on the carrier's spans (gain part of z)
    double log_loss = 0.0;     // sum of ln L_n over the path
    double log_required = 0.0;
  };
  std::size_t n_carriers = 0, n_spans = 0;
  std::vector<Carrier> carriers;
  // span saturation: ln sum_a exp(S_s z + sat_logc) - ln Psat_s
  std::vector<Eigen::MatrixXd> sat_E;
  std::vector<Eigen::VectorXd> sat_logc;
  Eigen::VectorXd log_psat;
  Eigen::VectorXd log_gmax;

  std::size_t nz() const { return n_carriers + n_spans; }
};

NoiseModel build_noise_model(const SystemConfig& cfg, const HTensor& H, const Cumulants& cum);

/// z = (p_hat, g) packed.
Eigen::VectorXd pack(const Eigen::VectorXd& p_hat, const Eigen::VectorXd& g);

/// log(required) + log(ASE + NLI + sigma_rx) - (p_hat_l + sum_path(g_n + ln L_n)).
/// +inf when the signed noise sum is not positive.
double margin_constraint_value(const NoiseModel& nm, std::size_t l, const Eigen::VectorXd& z,
                               Eigen::VectorXd* grad = nullptr);

double saturation_value(const NoiseModel& nm, std::size_t s, const Eigen::VectorXd& z,
                        Eigen::VectorXd* grad = nullptr);

struct DualState {
  Eigen::VectorXd lambda;  // per carrier, on the simplex
  Eigen::VectorXd mu;      // per span
  Eigen::VectorXd nu;      // per span; stays 0, the gain cap is enforced by projection
  double a = 0.05, b = 0.05, c = 0.05;
};

/// sum_l lambda_l (c_l - beta) + sum_s mu_s sat_s
double lagrangian(const NoiseModel& nm, const DualState& dual, double beta, const Eigen::VectorXd& z,
                  Eigen::VectorXd* grad = nullptr);

struct Box {
  Eigen::VectorXd lo, hi;
  Eigen::VectorXd free;  // 1 when the coordinate is optimized
  Eigen::VectorXd project(const Eigen::VectorXd& z) const;
};

Box default_box(const NoiseModel& nm, const SystemConfig& cfg, bool gains_free, const Eigen::VectorXd& frozen_g);

enum class Feasibility { Feasible, Infeasible, CapHit };

struct FeasibilityResult {
  Feasibility status = Feasibility::Infeasible;
  Eigen::VectorXd z;
  int outer_iterations = 0;
  double max_constraint = 0.0;
};

FeasibilityResult dual_feasibility_solve(const NoiseModel& nm, const Box& box, double beta, const Eigen::VectorXd& z0,
                                         const SolverOptions& opt);

struct Allocation {
  std::string scenario;
  Eigen::VectorXd p_hat;  // ln W per carrier (inactive: -inf)
  Eigen::VectorXd g;      // ln gain per span
  double beta = 0.0;
  std::vector<double> margins_db;  // NaN for inactive carriers
  double min_margin_db = 0.0;
  int iterations = 0;
  int cap_hits = 0;
  bool converged = true;
};

/// Fills beta / margins from (p_hat, g).
void finalize_allocation(const NoiseModel& nm, Allocation& a);

Allocation bisection_optimize(const SystemConfig& cfg, const HTensor& H, bool gains_free = true);
Allocation scenario_equal_power(const SystemConfig& cfg, const HTensor& H);
Allocation scenario_power_only(const SystemConfig& cfg, const HTensor& H);
Allocation scenario_joint(const SystemConfig& cfg, const HTensor& H);

}  // namespace fiberplan
