#pragma once

// Analysis quantities measured against a known saddle point (x*, l*): the
// energy E_k, the primal-dual gap, the Q-seminorm, dual bounds and log-log
// rate fits. Everything here reads snapshots handed out by the solver's
// observer and never feeds back into a run.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "falm/linalg.hpp"
#include "falm/oracle.hpp"
#include "falm/problem.hpp"
#include "falm/solver.hpp"

namespace falm {

/// Q = Id/sigma - beta A*A.
class Metric {
 public:
  Metric(const LinearMap& a_map, double sigma, double beta);
  Metric(const Problem& prob, const ValidatedConfig& cfg) : Metric(prob.a_map(), cfg.sigma, cfg.beta) {}

  double q_shift() const { return 1.0 / sigma_; }
  double q_beta() const { return beta_; }

  /// <Qu, u> = ||u||^2/sigma - beta ||Au||^2
  double q_norm_sq(std::span<const double> u) const;

 private:
  const LinearMap* a_map_;
  double sigma_;
  double beta_;
};

/// L(x, l*) - L(x*, l).
double gap(const Problem& prob, std::span<const double> x, std::span<const double> lambda,
           const SaddlePoint& star);

/// E_k(x*, l*) for the iterate pair carried by `st`:
///   t(t-1+g)(L_b(x_k, l*) - L_b(x*, l_k)) + 1/2 ||z_k - g x*||_Q^2 + 1/(2r) ||nu_k - g l*||^2
///   + g(1-g)/2 ||x_k - x*||_Q^2 + g(1-g)/(2r) ||l_k - l*||^2 + (1-g)/(2r) (t-1) ||l_k - l_{k-1}||^2
/// with z_k = g x_k + (t-1)(x_k - x_{k-1}) and nu_k = g l_k + (t-1)(l_k - l_{k-1}).
double energy(const Problem& prob, const Metric& metric, const ValidatedConfig& cfg,
              const IterateState& st, const SaddlePoint& star);

/// Residuals of x_{k+1} - y_k = (z_{k+1} - z_k)/t_{k+1} and
/// l_{k+1} - mu_k = (nu_{k+1} - nu_k)/t_{k+1}, z_k = x_k + (t_k - 1)(x_k - x_{k-1}),
/// nu_k likewise. Each is the max-norm of the difference divided by
/// max(1, ||z_{k+1}||) resp. max(1, ||nu_{k+1}||).
struct ZIdentityResidual {
  double primal = 0.0;
  double dual = 0.0;
};
ZIdentityResidual z_identity_residual(const IterateState& before, const StepTrace& trace,
                                      const IterateState& after);

struct RunRecord {
  std::size_t k = 0;
  double t_k = 0.0;
  std::optional<double> gap;
  double feas = 0.0;
  std::optional<double> obj_err;
  double kkt_grad = 0.0;
  double kkt_feas = 0.0;
  std::optional<double> energy;
  std::size_t cg_iters = 0;
};

enum class Field { gap, feas, obj_err, kkt_grad, kkt_feas, energy };

std::string to_string(Field f);
Field parse_field(const std::string& name);
std::optional<double> field_value(const RunRecord& r, Field f);

struct SeriesPoint {
  std::size_t k = 0;
  double value = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
  /// Points in the window with value <= 1e-14 (or missing).
  std::size_t excluded = 0;
};

/// Least-squares fit of log(value) against log(k) over k_min <= k <= k_max.
/// Throws Error when fewer than 10 usable points remain.
RateFit rate_fit(std::span<const SeriesPoint> series, std::size_t k_min, std::size_t k_max);
RateFit rate_fit(std::span<const RunRecord> records, Field field, std::size_t k_min,
                 std::size_t k_max);

struct DualSample {
  std::size_t k = 0;
  double t_k = 0.0;
  Vector lambda;
};

/// t_k ||A*(l_k - l*)|| per sample.
std::vector<SeriesPoint> dual_bound_series(std::span<const DualSample> samples,
                                           std::span<const double> lambda_star,
                                           const LinearMap& a_map);

struct BoundCheck {
  bool ok = true;
  /// First failing k, 0 when none.
  std::size_t first_violation = 0;
  /// max over checked k of lhs - rhs
  double worst_excess = 0.0;
  std::size_t checked = 0;
};

/// E_{k+1} <= E_k + tol max(1, E_ref) over consecutive records with k >= from_k.
BoundCheck check_energy_monotone(std::span<const RunRecord> records, std::size_t from_k,
                                 double e_ref, double tol = 1e-9);
/// t_k^2 gap_k <= e_ref / gamma + tol.
BoundCheck check_gap_bound(std::span<const RunRecord> records, std::size_t from_k, double e_ref,
                           double gamma, double tol = 1e-9);
/// t_k ||Ax_k - b|| <= sqrt(2 e_ref / (beta gamma)) + tol; requires beta > 0.
BoundCheck check_feas_bound(std::span<const RunRecord> records, std::size_t from_k, double e_ref,
                            double beta, double gamma, double tol = 1e-9);

/// sqrt(k_hi) kkt_grad(k_hi) / (sqrt(k_lo) kkt_grad(k_lo)), using the
/// records at exactly those indices.
double kkt_decay_ratio(std::span<const RunRecord> records, std::size_t k_lo, std::size_t k_hi);

/// Builds RunRecords (and the extra series used by the rate checks) from the
/// solver's observer stream.
class Recorder {
 public:
  Recorder(const Problem& prob, const ValidatedConfig& cfg,
           std::optional<SaddlePoint> star = std::nullopt);

  Observer observer();
  void observe(const IterateState& st, const StepTrace* trace);

  const std::vector<RunRecord>& records() const { return records_; }
  const std::vector<DualSample>& dual_samples() const { return dual_; }
  bool has_oracle() const { return star_.has_value(); }

  /// First recorded k with t_k >= 1 and its energy.
  std::optional<std::size_t> anchor_k() const { return anchor_k_; }
  std::optional<double> anchor_energy() const { return anchor_energy_; }

  /// Running sums of 1/2 t_{k+1}^2 ||x_{k+1} - y_k||^2_{gQ - L Id} and
  /// g/(2r) t_{k+1}^2 ||l_{k+1} - mu_k||^2, one entry per recorded step.
  /// Only complete when every step is recorded.
  const std::vector<double>& primal_sum() const { return primal_sum_; }
  const std::vector<double>& dual_sum() const { return dual_sum_; }
  /// Worst residual of the z/nu identities over consecutive recorded steps.
  ZIdentityResidual worst_z_identity() const { return worst_z_; }

 private:
  const Problem* prob_;
  ValidatedConfig cfg_;
  Metric metric_;
  std::optional<SaddlePoint> star_;
  double f_star_ = 0.0;

  std::vector<RunRecord> records_;
  std::vector<DualSample> dual_;
  std::optional<std::size_t> anchor_k_;
  std::optional<double> anchor_energy_;
  std::vector<double> primal_sum_;
  std::vector<double> dual_sum_;
  ZIdentityResidual worst_z_;
  std::optional<IterateState> last_;
};

}  // namespace falm
