#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "falm/linalg.hpp"

namespace falm {

/// Smooth convex objective with L-Lipschitz gradient. Implementations must be
/// reentrant; a Problem shares one instance across concurrent runs.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual void gradient(std::span<const double> x, std::span<double> out) const = 0;
  /// User-supplied Lipschitz constant of the gradient. Never estimated here.
  virtual double lipschitz() const = 0;

  Vector gradient(std::span<const double> x) const;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

/// f(x) = 1/2 <Qx, x> + <c, x>, Q dense symmetric row-major.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(std::size_t n, std::vector<double> q, Vector c, double lipschitz);

  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const override { return lipschitz_; }
  using Objective::gradient;

  std::span<const double> q() const { return q_; }
  std::span<const double> c() const { return c_; }

 private:
  std::size_t n_;
  std::vector<double> q_;
  Vector c_;
  double lipschitz_;
};

/// f(x) = 1/2 ||Mx - d||^2, M dense rows x n row-major.
class LeastSquaresObjective final : public Objective {
 public:
  LeastSquaresObjective(std::size_t rows, std::size_t n, std::vector<double> m, Vector d,
                        double lipschitz);

  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const override { return lipschitz_; }
  using Objective::gradient;

  std::size_t rows() const { return rows_; }
  std::span<const double> m() const { return m_; }
  std::span<const double> d() const { return d_; }

 private:
  std::size_t rows_;
  std::size_t n_;
  std::vector<double> m_;
  Vector d_;
  double lipschitz_;
};

/// f(x) = sum_i log(1 + exp(<d_i, x>)), rows d_i of a dense matrix.
/// Its gradient is Lipschitz with constant ||D||^2 / 4.
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(std::size_t rows, std::size_t n, std::vector<double> d, double lipschitz);

  std::size_t dim() const override { return n_; }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const override { return lipschitz_; }
  using Objective::gradient;

 private:
  std::size_t rows_;
  std::size_t n_;
  std::vector<double> d_;
  double lipschitz_;
};

/// f(x) = <c, x>. Any L > 0 is admissible.
class LinearObjective final : public Objective {
 public:
  LinearObjective(Vector c, double lipschitz);

  std::size_t dim() const override { return c_.size(); }
  double value(std::span<const double> x) const override;
  void gradient(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const override { return lipschitz_; }
  using Objective::gradient;

 private:
  Vector c_;
  double lipschitz_;
};

/// min f(x) subject to A x = b. Assumes the saddle-point set is nonempty;
/// infeasible data (b outside the range of A) is not detected.
class Problem {
 public:
  Problem(ObjectivePtr objective, LinearMapPtr a_map, Vector b);

  std::size_t n() const { return a_map_->cols(); }
  std::size_t p() const { return a_map_->rows(); }
  const Objective& objective() const { return *objective_; }
  const ObjectivePtr& objective_ptr() const { return objective_; }
  const LinearMap& a_map() const { return *a_map_; }
  const LinearMapPtr& a_map_ptr() const { return a_map_; }
  const Vector& b() const { return b_; }

  /// A x - b
  Vector residual(std::span<const double> x) const;

 private:
  ObjectivePtr objective_;
  LinearMapPtr a_map_;
  Vector b_;
};

/// f(x) + <lambda, Ax - b>
double lagrangian(const Problem& prob, std::span<const double> x, std::span<const double> lambda);

/// lagrangian + beta/2 ||Ax - b||^2
double aug_lagrangian(const Problem& prob, std::span<const double> x,
                      std::span<const double> lambda, double beta);

struct KktResiduals {
  /// ||grad f(x) + A* lambda||
  double stationarity = 0.0;
  /// ||Ax - b||
  double feasibility = 0.0;
};

KktResiduals kkt_residuals(const Problem& prob, std::span<const double> x,
                           std::span<const double> lambda);

/// Largest coordinatewise relative error between the analytic gradient and
/// central differences with step h. Relative to max(1, |g_i|).
double grad_check(const Objective& obj, std::span<const double> x, double h);

}  // namespace falm
