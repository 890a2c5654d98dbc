#include "falm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "falm/error.hpp"
#include "falm/kernels.hpp"
#include "falm/rng.hpp"

namespace falm {

double dot(std::span<const double> u, std::span<const double> v) {
  check_dim("dot", u.size(), v.size());
  return kernels::dot(u, v);
}

double norm_sq(std::span<const double> u) { return kernels::dot(u, u); }

double norm(std::span<const double> u) { return std::sqrt(norm_sq(u)); }

double norm_inf(std::span<const double> u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

Vector sub(std::span<const double> u, std::span<const double> v) {
  check_dim("sub", u.size(), v.size());
  Vector out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - v[i];
  return out;
}

Vector add_scaled(std::span<const double> u, double alpha, std::span<const double> v) {
  check_dim("add_scaled", u.size(), v.size());
  Vector out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + alpha * v[i];
  return out;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_dim("axpy", y.size(), x.size());
  kernels::axpby(alpha, x, 1.0, y);
}

bool all_finite(std::span<const double> u) {
  return std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); });
}

Vector LinearMap::apply(std::span<const double> x) const {
  check_dim("LinearMap::apply", cols(), x.size());
  Vector out(rows());
  apply(x, out);
  return out;
}

Vector LinearMap::adjoint(std::span<const double> lambda) const {
  check_dim("LinearMap::adjoint", rows(), lambda.size());
  Vector out(cols());
  adjoint(lambda, out);
  return out;
}

DenseMap::DenseMap(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_dim("DenseMap", rows * cols, data_.size());
}

void DenseMap::apply(std::span<const double> x, std::span<double> out) const {
  kernels::gemv(rows_, cols_, data_, x, out);
}

void DenseMap::adjoint(std::span<const double> lambda, std::span<double> out) const {
  kernels::gemv_t(rows_, cols_, data_, lambda, out);
}

void ZeroMap::apply(std::span<const double>, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

void ZeroMap::adjoint(std::span<const double>, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

void ScaledIdentity::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < n_; ++i) out[i] = scale_ * x[i];
}

void ScaledIdentity::adjoint(std::span<const double> lambda, std::span<double> out) const {
  apply(lambda, out);
}

RowSelection::RowSelection(std::size_t n, std::vector<std::size_t> indices)
    : n_(n), indices_(std::move(indices)) {
  for (std::size_t idx : indices_) {
    if (idx >= n_) throw InvalidArgument("RowSelection: index " + std::to_string(idx) + " out of range");
  }
}

void RowSelection::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < indices_.size(); ++i) out[i] = x[indices_[i]];
}

void RowSelection::adjoint(std::span<const double> lambda, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < indices_.size(); ++i) out[indices_[i]] += lambda[i];
}

SpdSystem::SpdSystem(const LinearMap& a_map, double shift, double scale)
    : a_map_(&a_map), shift_(shift), scale_(scale) {
  if (!(shift > 0.0) || !std::isfinite(shift)) throw InvalidArgument("SpdSystem: shift must be > 0");
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw InvalidArgument("SpdSystem: scale must be >= 0");
}

void SpdSystem::apply(std::span<const double> u, std::span<double> out,
                      std::span<double> scratch) const {
  if (is_diagonal()) {
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = shift_ * u[i];
    return;
  }
  a_map_->apply(u, scratch);
  a_map_->adjoint(scratch, out);
  kernels::axpby(shift_, u, scale_, out);
}

Vector SpdSystem::apply(std::span<const double> u) const {
  check_dim("SpdSystem::apply", dim(), u.size());
  Vector out(dim());
  Vector scratch(a_map_->rows());
  apply(u, out, scratch);
  return out;
}

SpdSolution solve_spd(const SpdSystem& m, std::span<const double> rhs,
                      std::optional<std::span<const double>> warm, double tol,
                      std::size_t max_iter) {
  const std::size_t n = m.dim();
  check_dim("solve_spd", n, rhs.size());
  if (!(tol > 0.0)) throw InvalidArgument("solve_spd: tol must be > 0");

  const double target = tol * std::max(1.0, norm(rhs));
  SpdSolution sol;

  if (m.is_diagonal()) {
    sol.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) sol.x[i] = rhs[i] / m.shift();
    sol.residual = norm(sub(m.apply(sol.x), rhs));
    sol.iterations = 1;
    if (sol.residual > target) {
      throw SolveError("solve_spd: diagonal solve missed tolerance", sol.residual, 1);
    }
    return sol;
  }

  if (warm) {
    check_dim("solve_spd warm start", n, warm->size());
    sol.x.assign(warm->begin(), warm->end());
  } else {
    sol.x.assign(n, 0.0);
  }

  Vector r(n), p(n), mp(n), g_scratch(m.range_dim());
  auto true_residual = [&] {
    m.apply(sol.x, mp, g_scratch);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - mp[i];
    return norm(r);
  };

  double rnorm = true_residual();
  std::size_t it = 0;
  // CG cycles, each restarted from the true residual once the recursive
  // residual reports convergence.
  while (rnorm > target && it < max_iter) {
    p = r;
    double rr = norm_sq(r);
    while (it < max_iter) {
      m.apply(p, mp, g_scratch);
      const double pmp = dot(p, mp);
      if (!(pmp > 0.0)) break;
      const double alpha = rr / pmp;
      kernels::axpby(alpha, p, 1.0, sol.x);
      kernels::axpby(-alpha, mp, 1.0, r);
      ++it;
      const double rr_new = norm_sq(r);
      if (std::sqrt(rr_new) <= target) break;
      kernels::axpby(1.0, r, rr_new / rr, p);
      rr = rr_new;
    }
    rnorm = true_residual();
  }
  sol.iterations = it;
  sol.residual = rnorm;
  if (!(rnorm <= target)) {
    throw SolveError("solve_spd: conjugate gradients did not converge", rnorm, it);
  }
  return sol;
}

NormEstimate op_norm_sq(const LinearMap& a_map, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw InvalidArgument("op_norm_sq: tol must be > 0");
  NormEstimate est;
  const std::size_t n = a_map.cols();
  if (n == 0 || a_map.rows() == 0 || a_map.is_zero()) {
    est.converged = true;
    return est;
  }

  SplitMix64 rng(0x6f705f6e6f726dULL);
  Vector x(n);
  for (double& v : x) v = rng.normal();
  double nx = norm(x);
  for (double& v : x) v /= nx;

  Vector ax(a_map.rows()), w(n);
  double rq = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    a_map.apply(x, ax);
    const double next = norm_sq(ax);  // <x, A*A x> with ||x|| = 1
    a_map.adjoint(ax, w);
    est.iterations = it;
    const double nw = norm(w);
    if (nw == 0.0) {
      rq = next;
      est.converged = true;
      break;
    }
    const bool settled = it > 1 && std::abs(next - rq) <= 0.1 * tol * next;
    rq = next;
    if (settled) {
      est.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = w[i] / nw;
  }
  est.raw = rq;
  est.value = rq * (1.0 + 10.0 * tol);
  return est;
}

}  // namespace falm
