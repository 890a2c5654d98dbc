#include "falm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace falm {

std::string describe(Violation v) {
  switch (v) {
    case Violation::m_le_gamma:
      return "0 < m ≤ γ";
    case Violation::gamma_le_one:
      return "γ ≤ 1";
    case Violation::sigma_positive:
      return "σ > 0";
    case Violation::sigma_bound:
      return "σ ≤ γ/(L + γβ‖A‖²)";
    case Violation::rho_positive:
      return "ρ > 0";
    case Violation::beta_nonnegative:
      return "β ≥ 0";
    case Violation::penalty_positive:
      return "t_2 - 1 + γ > 0";
    case Violation::record_every:
      return "record_every ≥ 1";
    case Violation::cg_tol:
      return "cg_tol > 0";
  }
  return "unknown condition";
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::iteration_budget:
      return "iteration budget";
    case Termination::kkt_tolerance:
      return "kkt tolerance";
    case Termination::solve_failure:
      return "inner solve failure";
    case Termination::non_finite:
      return "non-finite iterate";
  }
  return "unknown";
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ValidatedConfig validate(const Problem& prob, const SolverParams& params) {
  ValidatedConfig cfg;
  cfg.rule = params.rule;
  cfg.m = params.rule.m();
  cfg.phi = phi_m(cfg.m);
  cfg.lipschitz = prob.objective().lipschitz();

  if (!(params.beta >= 0.0) || !std::isfinite(params.beta)) {
    throw ValidationError(Violation::beta_nonnegative, "beta = " + fmt(params.beta));
  }
  cfg.beta = params.beta;

  cfg.gamma = params.gamma.value_or(0.5 * (cfg.m + 1.0));
  if (!(cfg.m <= cfg.gamma)) {
    throw ValidationError(Violation::m_le_gamma,
                          "m = " + fmt(cfg.m) + ", gamma = " + fmt(cfg.gamma));
  }
  if (!(cfg.gamma <= 1.0)) {
    throw ValidationError(Violation::gamma_le_one, "gamma = " + fmt(cfg.gamma));
  }

  // s_{k+1} must stay positive so the primal subproblem is strongly convex.
  const double t1 = cfg.rule.t_value(1);
  const double t2 = cfg.rule.next(1, t1);
  if (!(t2 - 1.0 + cfg.gamma > 0.0)) {
    throw ValidationError(Violation::penalty_positive,
                          "t_2 = " + fmt(t2) + ", gamma = " + fmt(cfg.gamma));
  }

  if (params.a_norm_sq) {
    if (!(*params.a_norm_sq >= 0.0)) throw InvalidArgument("a_norm_sq must be >= 0");
    cfg.a_norm.value = cfg.a_norm.raw = *params.a_norm_sq;
    cfg.a_norm.converged = true;
  } else {
    cfg.a_norm = op_norm_sq(prob.a_map(), params.norm_tol, params.norm_max_iter);
    if (!cfg.a_norm.converged) {
      cfg.warnings.push_back("power iteration for ||A||^2 did not converge; using inflated running estimate");
    }
  }
  cfg.sigma_bound = cfg.gamma / (cfg.lipschitz + cfg.gamma * cfg.beta * cfg.a_norm.value);

  cfg.sigma = params.sigma.value_or(0.99 * cfg.sigma_bound);
  if (!(cfg.sigma > 0.0)) throw ValidationError(Violation::sigma_positive, "sigma = " + fmt(cfg.sigma));
  if (!(cfg.sigma <= cfg.sigma_bound * (1.0 + 1e-12))) {
    throw ValidationError(Violation::sigma_bound,
                          "sigma = " + fmt(cfg.sigma) + " > " + fmt(cfg.sigma_bound));
  }

  cfg.rho = params.rho.value_or(cfg.sigma);
  if (!(cfg.rho > 0.0) || !std::isfinite(cfg.rho)) {
    throw ValidationError(Violation::rho_positive, "rho = " + fmt(cfg.rho));
  }
  if (params.record_every == 0) throw ValidationError(Violation::record_every, "record_every = 0");
  if (!(params.cg_tol > 0.0)) throw ValidationError(Violation::cg_tol, "cg_tol = " + fmt(params.cg_tol));

  cfg.convergence_certified = cfg.m < cfg.gamma && cfg.gamma < 1.0 &&
                              cfg.sigma < cfg.sigma_bound && cfg.beta > 0.0;
  if (params.require_iterate_convergence) {
    if (!(cfg.beta > 0.0)) {
      cfg.warnings.push_back("iterate convergence requires β > 0");
    }
    if (!(cfg.m < cfg.gamma && cfg.gamma < 1.0)) {
      cfg.warnings.push_back("iterate convergence requires 0 < m < γ < 1");
    }
    if (!(cfg.sigma < cfg.sigma_bound)) {
      cfg.warnings.push_back("iterate convergence requires σ < γ/(L + γβ‖A‖²)");
    }
  }

  cfg.max_iter = params.max_iter;
  cfg.kkt_tol = params.kkt_tol;
  cfg.cg_tol = params.cg_tol;
  cfg.cg_max_iter = params.cg_max_iter != 0 ? params.cg_max_iter : std::max<std::size_t>(100, 10 * prob.n());
  cfg.record_every = params.record_every;
  return cfg;
}

IterateState initial_state(const Problem& prob, const ValidatedConfig& cfg,
                           std::span<const double> x_init, std::span<const double> lambda_init) {
  check_dim("initial_state x", prob.n(), x_init.size());
  check_dim("initial_state lambda", prob.p(), lambda_init.size());
  IterateState st;
  st.k = 1;
  st.x.assign(x_init.begin(), x_init.end());
  st.x_prev = st.x;
  st.lambda.assign(lambda_init.begin(), lambda_init.end());
  st.lambda_prev = st.lambda;
  st.t_k = cfg.rule.t_value(1);
  st.t_next = cfg.rule.next(1, st.t_k);
  st.x_warm = st.x;
  return st;
}

StepResult step(const Problem& prob, const ValidatedConfig& cfg, const IterateState& st) {
  const std::size_t n = prob.n();
  const std::size_t p = prob.p();
  const LinearMap& a = prob.a_map();
  const Vector& b = prob.b();
  const double gamma = cfg.gamma;
  const double t = st.t_k;
  const double tn = st.t_next;
  const double momentum = (t - 1.0) / tn;

  StepResult out;
  StepTrace& tr = out.trace;

  tr.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) tr.y[i] = st.x[i] + momentum * (st.x[i] - st.x_prev[i]);

  tr.mu.resize(p);
  tr.nu_gamma.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    const double dl = st.lambda[i] - st.lambda_prev[i];
    tr.mu[i] = st.lambda[i] + momentum * dl;
    tr.nu_gamma[i] = gamma * st.lambda[i] + (t - 1.0) * dl;
  }

  const Vector ax = a.apply(st.x);
  const double eta_w = gamma / (tn - 1.0 + gamma);
  tr.eta.resize(p);
  for (std::size_t i = 0; i < p; ++i) tr.eta[i] = ax[i] + eta_w * (b[i] - ax[i]);

  tr.s_next = (cfg.rho / gamma) * tn * (tn - 1.0 + gamma);
  const double scale = tr.s_next / gamma;

  // Right-hand side of the stationarity system.
  Vector g_side(p);
  const Vector ay = a.apply(tr.y);
  for (std::size_t i = 0; i < p; ++i) {
    g_side[i] = -cfg.beta * (ay[i] - b[i]) - tr.nu_gamma[i] / gamma + scale * tr.eta[i];
  }
  const Vector at_side = a.adjoint(g_side);
  const Vector grad = prob.objective().gradient(tr.y);
  tr.rhs.resize(n);
  for (std::size_t i = 0; i < n; ++i) tr.rhs[i] = tr.y[i] / cfg.sigma - grad[i] + at_side[i];

  // Solve for the increment d = x_{k+1} - x_k. The large terms (s/γ)A'(Ax - η)
  // cancel analytically: Ax_k - η = (γ/(t_{k+1} - 1 + γ))(Ax_k - b).
  Vector r_side(p);
  for (std::size_t i = 0; i < p; ++i) {
    r_side[i] = -cfg.beta * (ay[i] - b[i]) - tr.nu_gamma[i] / gamma -
                (cfg.rho / gamma) * tn * (ax[i] - b[i]);
  }
  const Vector at_r = a.adjoint(r_side);
  Vector reduced(n);
  for (std::size_t i = 0; i < n; ++i) {
    reduced[i] = (tr.y[i] - st.x[i]) / cfg.sigma - grad[i] + at_r[i];
  }
  const Vector warm = sub(st.x_warm, st.x);

  const SpdSystem system(a, 1.0 / cfg.sigma, scale);
  SpdSolution sol = solve_spd(system, reduced, std::span<const double>(warm), cfg.cg_tol,
                              cfg.cg_max_iter);
  tr.x_next.resize(n);
  for (std::size_t i = 0; i < n; ++i) tr.x_next[i] = st.x[i] + sol.x[i];
  tr.cg_iters = sol.iterations;
  tr.cg_residual = sol.residual;

  tr.z_next_gamma.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    tr.z_next_gamma[i] = gamma * tr.x_next[i] + (tn - 1.0) * (tr.x_next[i] - st.x[i]);
  }
  const Vector az = a.apply(tr.z_next_gamma);
  tr.lambda_next.resize(p);
  for (std::size_t i = 0; i < p; ++i) {
    tr.lambda_next[i] = tr.mu[i] + (cfg.rho / gamma) * (az[i] - gamma * b[i]);
  }

  IterateState& ns = out.state;
  ns.k = st.k + 1;
  ns.x = tr.x_next;
  ns.x_prev = st.x;
  ns.lambda = tr.lambda_next;
  ns.lambda_prev = st.lambda;
  ns.t_k = tn;
  ns.t_next = cfg.rule.next(ns.k, tn);
  ns.x_warm = tr.x_next;
  return out;
}

RunResult run(const Problem& prob, const ValidatedConfig& cfg, std::span<const double> x_init,
              std::span<const double> lambda_init, const Observer& observer) {
  IterateState st = initial_state(prob, cfg, x_init, lambda_init);
  RunResult res;
  if (observer) observer(st, nullptr);

  auto finish = [&](Termination reason) {
    res.reason = reason;
    res.x = st.x;
    res.lambda = st.lambda;
    res.k = st.k;
    res.iterations = st.k - 1;
    res.kkt = kkt_residuals(prob, st.x, st.lambda);
    return res;
  };

  for (;;) {
    if (st.k - 1 >= cfg.max_iter) return finish(Termination::iteration_budget);
    if (cfg.kkt_tol) {
      const KktResiduals r = kkt_residuals(prob, st.x, st.lambda);
      if (r.stationarity <= *cfg.kkt_tol && r.feasibility <= *cfg.kkt_tol) {
        return finish(Termination::kkt_tolerance);
      }
    }

    StepResult sr;
    try {
      sr = step(prob, cfg, st);
    } catch (const SolveError& e) {
      res.error = "iteration " + std::to_string(st.k) + ": " + e.what();
      return finish(Termination::solve_failure);
    }
    res.total_cg_iters += sr.trace.cg_iters;

    if (!all_finite(sr.state.x) || !all_finite(sr.state.lambda)) {
      res.error = "iteration " + std::to_string(st.k) + ": non-finite iterate";
      return finish(Termination::non_finite);
    }
    st = std::move(sr.state);

    if (observer) {
      const bool last = st.k - 1 >= cfg.max_iter;
      bool converged = false;
      if (!last && cfg.kkt_tol) {
        const KktResiduals r = kkt_residuals(prob, st.x, st.lambda);
        converged = r.stationarity <= *cfg.kkt_tol && r.feasibility <= *cfg.kkt_tol;
      }
      if (st.k % cfg.record_every == 0 || last || converged) observer(st, &sr.trace);
    }
  }
}

RunResult run(const Problem& prob, const SolverParams& params,
              std::optional<std::span<const double>> x_init,
              std::optional<std::span<const double>> lambda_init, const Observer& observer) {
  const ValidatedConfig cfg = validate(prob, params);
  const Vector zx(prob.n(), 0.0);
  const Vector zl(prob.p(), 0.0);
  return run(prob, cfg, x_init.value_or(std::span<const double>(zx)),
             lambda_init.value_or(std::span<const double>(zl)), observer);
}

}  // namespace falm
