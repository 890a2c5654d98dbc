#include "falm/problem.hpp"

#include <algorithm>
#include <cmath>

#include "falm/error.hpp"
#include "falm/kernels.hpp"

namespace falm {

namespace {

void check_lipschitz(const char* who, double l) {
  if (!(l > 0.0) || !std::isfinite(l)) {
    throw InvalidArgument(std::string(who) + ": Lipschitz constant must be finite and > 0");
  }
}

// log(1 + exp(t)) without overflow
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

Vector Objective::gradient(std::span<const double> x) const {
  check_dim("Objective::gradient", dim(), x.size());
  Vector g(dim());
  gradient(x, g);
  return g;
}

QuadraticObjective::QuadraticObjective(std::size_t n, std::vector<double> q, Vector c,
                                       double lipschitz)
    : n_(n), q_(std::move(q)), c_(std::move(c)), lipschitz_(lipschitz) {
  check_dim("QuadraticObjective Q", n * n, q_.size());
  check_dim("QuadraticObjective c", n, c_.size());
  check_lipschitz("QuadraticObjective", lipschitz);
}

double QuadraticObjective::value(std::span<const double> x) const {
  check_dim("QuadraticObjective::value", n_, x.size());
  Vector qx(n_);
  kernels::gemv(n_, n_, q_, x, qx);
  return 0.5 * kernels::dot(qx, x) + kernels::dot(c_, x);
}

void QuadraticObjective::gradient(std::span<const double> x, std::span<double> out) const {
  kernels::gemv(n_, n_, q_, x, out);
  for (std::size_t i = 0; i < n_; ++i) out[i] += c_[i];
}

LeastSquaresObjective::LeastSquaresObjective(std::size_t rows, std::size_t n,
                                             std::vector<double> m, Vector d, double lipschitz)
    : rows_(rows), n_(n), m_(std::move(m)), d_(std::move(d)), lipschitz_(lipschitz) {
  check_dim("LeastSquaresObjective M", rows * n, m_.size());
  check_dim("LeastSquaresObjective d", rows, d_.size());
  check_lipschitz("LeastSquaresObjective", lipschitz);
}

double LeastSquaresObjective::value(std::span<const double> x) const {
  check_dim("LeastSquaresObjective::value", n_, x.size());
  Vector r(rows_);
  kernels::gemv(rows_, n_, m_, x, r);
  for (std::size_t i = 0; i < rows_; ++i) r[i] -= d_[i];
  return 0.5 * kernels::dot(r, r);
}

void LeastSquaresObjective::gradient(std::span<const double> x, std::span<double> out) const {
  Vector r(rows_);
  kernels::gemv(rows_, n_, m_, x, r);
  for (std::size_t i = 0; i < rows_; ++i) r[i] -= d_[i];
  kernels::gemv_t(rows_, n_, m_, r, out);
}

LogisticObjective::LogisticObjective(std::size_t rows, std::size_t n, std::vector<double> d,
                                     double lipschitz)
    : rows_(rows), n_(n), d_(std::move(d)), lipschitz_(lipschitz) {
  check_dim("LogisticObjective D", rows * n, d_.size());
  check_lipschitz("LogisticObjective", lipschitz);
}

double LogisticObjective::value(std::span<const double> x) const {
  check_dim("LogisticObjective::value", n_, x.size());
  Vector t(rows_);
  kernels::gemv(rows_, n_, d_, x, t);
  double s = 0.0;
  for (double ti : t) s += softplus(ti);
  return s;
}

void LogisticObjective::gradient(std::span<const double> x, std::span<double> out) const {
  Vector t(rows_);
  kernels::gemv(rows_, n_, d_, x, t);
  for (double& ti : t) ti = sigmoid(ti);
  kernels::gemv_t(rows_, n_, d_, t, out);
}

LinearObjective::LinearObjective(Vector c, double lipschitz)
    : c_(std::move(c)), lipschitz_(lipschitz) {
  check_lipschitz("LinearObjective", lipschitz);
}

double LinearObjective::value(std::span<const double> x) const {
  check_dim("LinearObjective::value", c_.size(), x.size());
  return kernels::dot(c_, x);
}

void LinearObjective::gradient(std::span<const double>, std::span<double> out) const {
  std::copy(c_.begin(), c_.end(), out.begin());
}

Problem::Problem(ObjectivePtr objective, LinearMapPtr a_map, Vector b)
    : objective_(std::move(objective)), a_map_(std::move(a_map)), b_(std::move(b)) {
  if (!objective_ || !a_map_) throw InvalidArgument("Problem: null objective or operator");
  check_dim("Problem objective vs A", a_map_->cols(), objective_->dim());
  check_dim("Problem b", a_map_->rows(), b_.size());
}

Vector Problem::residual(std::span<const double> x) const {
  Vector r = a_map_->apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b_[i];
  return r;
}

double lagrangian(const Problem& prob, std::span<const double> x, std::span<const double> lambda) {
  check_dim("lagrangian x", prob.n(), x.size());
  check_dim("lagrangian lambda", prob.p(), lambda.size());
  return prob.objective().value(x) + dot(lambda, prob.residual(x));
}

double aug_lagrangian(const Problem& prob, std::span<const double> x,
                      std::span<const double> lambda, double beta) {
  if (!(beta >= 0.0)) throw InvalidArgument("aug_lagrangian: beta must be >= 0");
  check_dim("aug_lagrangian x", prob.n(), x.size());
  check_dim("aug_lagrangian lambda", prob.p(), lambda.size());
  const Vector r = prob.residual(x);
  return prob.objective().value(x) + dot(lambda, r) + 0.5 * beta * norm_sq(r);
}

KktResiduals kkt_residuals(const Problem& prob, std::span<const double> x,
                           std::span<const double> lambda) {
  check_dim("kkt_residuals x", prob.n(), x.size());
  check_dim("kkt_residuals lambda", prob.p(), lambda.size());
  Vector g = prob.objective().gradient(x);
  const Vector at_l = prob.a_map().adjoint(lambda);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += at_l[i];
  return {norm(g), norm(prob.residual(x))};
}

double grad_check(const Objective& obj, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw InvalidArgument("grad_check: h must be > 0");
  check_dim("grad_check", obj.dim(), x.size());
  const Vector g = obj.gradient(x);
  Vector probe(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double xi = probe[i];
    probe[i] = xi + h;
    const double fp = obj.value(probe);
    probe[i] = xi - h;
    const double fm = obj.value(probe);
    probe[i] = xi;
    const double fd = (fp - fm) / (2.0 * h);
    const double scale = std::max({1.0, std::abs(g[i]), std::abs(fd)});
    worst = std::max(worst, std::abs(g[i] - fd) / scale);
  }
  return worst;
}

}  // namespace falm
