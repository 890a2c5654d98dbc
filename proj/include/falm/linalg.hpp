#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace falm {

using Vector = std::vector<double>;

double dot(std::span<const double> u, std::span<const double> v);
double norm(std::span<const double> u);
double norm_sq(std::span<const double> u);
/// Largest absolute entry.
double norm_inf(std::span<const double> u);
/// u - v
Vector sub(std::span<const double> u, std::span<const double> v);
/// u + alpha v
Vector add_scaled(std::span<const double> u, double alpha, std::span<const double> v);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
bool all_finite(std::span<const double> u);

/// Bounded linear operator A : H -> G between finite-dimensional spaces,
/// dim H = cols(), dim G = rows().
class LinearMap {
 public:
  virtual ~LinearMap() = default;

  virtual std::size_t cols() const = 0;
  virtual std::size_t rows() const = 0;

  /// out = A x
  virtual void apply(std::span<const double> x, std::span<double> out) const = 0;
  /// out = A* lambda
  virtual void adjoint(std::span<const double> lambda, std::span<double> out) const = 0;

  virtual bool is_zero() const { return false; }

  Vector apply(std::span<const double> x) const;
  Vector adjoint(std::span<const double> lambda) const;
};

using LinearMapPtr = std::shared_ptr<const LinearMap>;

/// Dense row-major matrix.
class DenseMap final : public LinearMap {
 public:
  DenseMap(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t cols() const override { return cols_; }
  std::size_t rows() const override { return rows_; }
  void apply(std::span<const double> x, std::span<double> out) const override;
  void adjoint(std::span<const double> lambda, std::span<double> out) const override;
  using LinearMap::adjoint;
  using LinearMap::apply;

  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

class ZeroMap final : public LinearMap {
 public:
  ZeroMap(std::size_t cols, std::size_t rows) : cols_(cols), rows_(rows) {}

  std::size_t cols() const override { return cols_; }
  std::size_t rows() const override { return rows_; }
  void apply(std::span<const double> x, std::span<double> out) const override;
  void adjoint(std::span<const double> lambda, std::span<double> out) const override;
  bool is_zero() const override { return true; }
  using LinearMap::adjoint;
  using LinearMap::apply;

 private:
  std::size_t cols_;
  std::size_t rows_;
};

/// c * Id on R^n.
class ScaledIdentity final : public LinearMap {
 public:
  ScaledIdentity(std::size_t n, double scale) : n_(n), scale_(scale) {}

  std::size_t cols() const override { return n_; }
  std::size_t rows() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> out) const override;
  void adjoint(std::span<const double> lambda, std::span<double> out) const override;
  bool is_zero() const override { return scale_ == 0.0; }
  using LinearMap::adjoint;
  using LinearMap::apply;

 private:
  std::size_t n_;
  double scale_;
};

/// Picks the coordinates listed in `indices`: (A x)_i = x_{indices[i]}.
class RowSelection final : public LinearMap {
 public:
  RowSelection(std::size_t n, std::vector<std::size_t> indices);

  std::size_t cols() const override { return n_; }
  std::size_t rows() const override { return indices_.size(); }
  void apply(std::span<const double> x, std::span<double> out) const override;
  void adjoint(std::span<const double> lambda, std::span<double> out) const override;
  using LinearMap::adjoint;
  using LinearMap::apply;

 private:
  std::size_t n_;
  std::vector<std::size_t> indices_;
};

/// M = shift * Id + scale * A*A, the normal operator of the primal update.
class SpdSystem {
 public:
  SpdSystem(const LinearMap& a_map, double shift, double scale);

  std::size_t dim() const { return a_map_->cols(); }
  std::size_t range_dim() const { return a_map_->rows(); }
  double shift() const { return shift_; }
  double scale() const { return scale_; }
  /// True when M reduces to shift * Id.
  bool is_diagonal() const { return scale_ == 0.0 || a_map_->is_zero(); }

  /// out = M u. `scratch` must have a_map.rows() entries.
  void apply(std::span<const double> u, std::span<double> out, std::span<double> scratch) const;
  Vector apply(std::span<const double> u) const;

 private:
  const LinearMap* a_map_;
  double shift_;
  double scale_;
};

struct SpdSolution {
  Vector x;
  std::size_t iterations = 0;
  /// True residual norm ||M x - rhs|| at exit.
  double residual = 0.0;
};

/// Conjugate gradients for M x = rhs. Converged when
/// ||M x - rhs|| <= tol * max(1, ||rhs||); throws SolveError otherwise.
SpdSolution solve_spd(const SpdSystem& m, std::span<const double> rhs,
                      std::optional<std::span<const double>> warm, double tol,
                      std::size_t max_iter);

struct NormEstimate {
  /// Inflated estimate, raw * (1 + 10 tol).
  double value = 0.0;
  /// Last Rayleigh quotient.
  double raw = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Upper estimate of ||A||^2 = lambda_max(A*A) by power iteration.
NormEstimate op_norm_sq(const LinearMap& a_map, double tol, std::size_t max_iter);

}  // namespace falm
