#pragma once

// Fast augmented Lagrangian method for min f(x) s.t. Ax = b.
//
// Per iteration k >= 1, with t_{k+1} from the inertial rule:
//   y_k       = x_k + (t_k - 1)/t_{k+1} (x_k - x_{k-1})
//   mu_k      = lambda_k + (t_k - 1)/t_{k+1} (lambda_k - lambda_{k-1})
//   eta_k     = A x_k + gamma/(t_{k+1} - 1 + gamma) (b - A x_k)
//   nu_k      = gamma lambda_k + (t_k - 1)(lambda_k - lambda_{k-1})
//   s_{k+1}   = (rho/gamma) t_{k+1} (t_{k+1} - 1 + gamma)
//   x_{k+1}   = argmin <grad f(y_k) + beta A*(A y_k - b), x - y_k> + 1/gamma <nu_k, Ax - b>
//                      + s_{k+1}/(2 gamma) ||Ax - eta_k||^2 + 1/(2 sigma) ||x - y_k||^2
//   z_{k+1}   = gamma x_{k+1} + (t_{k+1} - 1)(x_{k+1} - x_k)
//   lambda_{k+1} = mu_k + (rho/gamma)(A z_{k+1} - gamma b)
//
// The x-update is solved exactly through its normal equations
//   (Id/sigma + (s_{k+1}/gamma) A*A) x = y_k/sigma - grad f(y_k) - beta A*(A y_k - b)
//                                       - A* nu_k / gamma + (s_{k+1}/gamma) A* eta_k.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "falm/error.hpp"
#include "falm/inertial.hpp"
#include "falm/linalg.hpp"
#include "falm/problem.hpp"

namespace falm {

struct SolverParams {
  InertialRule rule = InertialRule::nesterov();
  /// Defaults: (m + 1)/2, which is 1 for Nesterov.
  std::optional<double> gamma;
  /// Default: 0.99 gamma / (L + gamma beta ||A||^2).
  std::optional<double> sigma;
  /// Default: sigma.
  std::optional<double> rho;
  double beta = 1.0;
  std::size_t max_iter = 1000;
  /// Stop once both KKT residuals are at or below this.
  std::optional<double> kkt_tol;
  double cg_tol = 1e-12;
  /// 0 selects max(100, 10 n).
  std::size_t cg_max_iter = 0;
  std::size_t record_every = 1;
  /// Known ||A||^2; skips power iteration when set.
  std::optional<double> a_norm_sq;
  double norm_tol = 1e-8;
  std::size_t norm_max_iter = 10000;
  /// Ask for the hypotheses under which the iterates themselves converge.
  bool require_iterate_convergence = false;
};

enum class Violation {
  m_le_gamma,
  gamma_le_one,
  sigma_positive,
  sigma_bound,
  rho_positive,
  beta_nonnegative,
  penalty_positive,
  record_every,
  cg_tol,
};

/// Text of the violated inequality, e.g. "σ ≤ γ/(L + γβ‖A‖²)".
std::string describe(Violation v);

class ValidationError : public Error {
 public:
  ValidationError(Violation v, const std::string& detail)
      : Error(describe(v) + " violated: " + detail), violation_(v) {}

  Violation violation() const noexcept { return violation_; }

 private:
  Violation violation_;
};

struct ValidatedConfig {
  InertialRule rule = InertialRule::nesterov();
  double m = 1.0;
  double phi = 0.0;
  double gamma = 1.0;
  double sigma = 0.0;
  double rho = 0.0;
  double beta = 0.0;
  double lipschitz = 0.0;
  NormEstimate a_norm;
  /// gamma / (L + gamma beta ||A||^2)
  double sigma_bound = 0.0;
  /// 0 < m < gamma < 1, sigma strictly below its bound and beta > 0.
  bool convergence_certified = false;
  std::vector<std::string> warnings;

  std::size_t max_iter = 0;
  std::optional<double> kkt_tol;
  double cg_tol = 0.0;
  std::size_t cg_max_iter = 0;
  std::size_t record_every = 1;
};

/// Checks every parameter condition and resolves defaults. Throws
/// ValidationError naming the first violated inequality.
ValidatedConfig validate(const Problem& prob, const SolverParams& params);

struct IterateState {
  std::size_t k = 1;
  Vector x;
  Vector x_prev;
  Vector lambda;
  Vector lambda_prev;
  double t_k = 1.0;
  double t_next = 1.0;
  /// Starting point for the next inner solve.
  Vector x_warm;
};

/// Transient quantities of one iteration.
struct StepTrace {
  Vector y;
  Vector mu;
  Vector eta;
  Vector nu_gamma;
  double s_next = 0.0;
  Vector rhs;
  Vector x_next;
  Vector z_next_gamma;
  Vector lambda_next;
  std::size_t cg_iters = 0;
  double cg_residual = 0.0;
};

/// x_0 = x_1 = x_init, lambda_0 = lambda_1 = lambda_init, k = 1.
IterateState initial_state(const Problem& prob, const ValidatedConfig& cfg,
                           std::span<const double> x_init, std::span<const double> lambda_init);

struct StepResult {
  IterateState state;
  StepTrace trace;
};

/// Advances k -> k+1. Inner-solve failures surface as SolveError.
StepResult step(const Problem& prob, const ValidatedConfig& cfg, const IterateState& st);

enum class Termination { iteration_budget, kkt_tolerance, solve_failure, non_finite };

std::string to_string(Termination t);

/// Called at k = 1 (trace == nullptr) and at every recorded iteration
/// afterwards. `trace` belongs to the step that produced `state`.
using Observer = std::function<void(const IterateState& state, const StepTrace* trace)>;

struct RunResult {
  Vector x;
  Vector lambda;
  /// Number of steps taken.
  std::size_t iterations = 0;
  /// Index of the final iterate (iterations + 1).
  std::size_t k = 1;
  Termination reason = Termination::iteration_budget;
  std::string error;
  KktResiduals kkt;
  std::size_t total_cg_iters = 0;
};

RunResult run(const Problem& prob, const ValidatedConfig& cfg, std::span<const double> x_init,
              std::span<const double> lambda_init, const Observer& observer = {});

/// Validates, then runs from zero (or the given) starting points.
RunResult run(const Problem& prob, const SolverParams& params,
              std::optional<std::span<const double>> x_init = std::nullopt,
              std::optional<std::span<const double>> lambda_init = std::nullopt,
              const Observer& observer = {});

}  // namespace falm
