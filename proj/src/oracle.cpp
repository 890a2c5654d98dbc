#include "falm/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "falm/error.hpp"
#include "falm/rng.hpp"

namespace falm {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> view(std::span<const double> data, std::size_t rows, std::size_t cols) {
  return {data.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

}  // namespace

void QpInstance::check() const {
  check_dim("QpInstance Q", n * n, q.size());
  check_dim("QpInstance c", n, c.size());
  check_dim("QpInstance A", p * n, a.size());
  check_dim("QpInstance b", p, b.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(q[i * n + j] - q[j * n + i]) > 1e-12) {
        throw InvalidArgument("QpInstance: Q is not symmetric");
      }
    }
  }
  if (p > 0) {
    Eigen::ColPivHouseholderQR<RowMatrix> qr(view(a, p, n));
    if (static_cast<std::size_t>(qr.rank()) != p) {
      throw InvalidArgument("QpInstance: A does not have full row rank");
    }
  }
}

SaddlePoint kkt_solve(const QpInstance& qp) {
  qp.check();
  const auto n = static_cast<Eigen::Index>(qp.n);
  const auto p = static_cast<Eigen::Index>(qp.p);
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + p, n + p);
  kkt.topLeftCorner(n, n) = view(qp.q, qp.n, qp.n);
  if (p > 0) {
    kkt.topRightCorner(n, p) = view(qp.a, qp.p, qp.n).transpose();
    kkt.bottomLeftCorner(p, n) = view(qp.a, qp.p, qp.n);
  }
  Eigen::VectorXd rhs(n + p);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = -qp.c[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i < p; ++i) rhs(n + i) = qp.b[static_cast<std::size_t>(i)];

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) throw Error("kkt_solve: singular KKT matrix");
  Eigen::VectorXd sol = lu.solve(rhs);

  SaddlePoint sp;
  sp.x.assign(sol.data(), sol.data() + n);
  sp.lambda.assign(sol.data() + n, sol.data() + n + p);
  return sp;
}

Problem make_problem(const QpInstance& qp) {
  qp.check();
  const double l = dense_max_eigenvalue(qp.n, qp.q);
  auto obj = std::make_shared<QuadraticObjective>(qp.n, qp.q, qp.c, l);
  LinearMapPtr a_map;
  if (qp.p == 0) {
    a_map = std::make_shared<ZeroMap>(qp.n, 0);
  } else {
    a_map = std::make_shared<DenseMap>(qp.p, qp.n, qp.a);
  }
  return Problem(std::move(obj), std::move(a_map), qp.b);
}

SaddleReport verify_saddle(const Problem& prob, std::span<const double> x_star,
                           std::span<const double> lambda_star, std::size_t probes,
                           std::uint64_t seed) {
  check_dim("verify_saddle x", prob.n(), x_star.size());
  check_dim("verify_saddle lambda", prob.p(), lambda_star.size());
  SplitMix64 rng(seed);
  const double center = lagrangian(prob, x_star, lambda_star);
  const double tol = -1e-9 * std::max(1.0, std::abs(center));

  SaddleReport rep;
  rep.probes = probes;
  rep.worst_left = rep.worst_right = std::numeric_limits<double>::infinity();
  Vector x(prob.n()), l(prob.p());
  for (std::size_t s = 0; s < probes; ++s) {
    const double radius = std::pow(10.0, -3.0 + 4.0 * rng.uniform());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = x_star[i] + radius * rng.normal();
    for (std::size_t i = 0; i < l.size(); ++i) l[i] = lambda_star[i] + radius * rng.normal();
    const double left = center - lagrangian(prob, x_star, l);
    const double right = lagrangian(prob, x, lambda_star) - center;
    rep.worst_left = std::min(rep.worst_left, left);
    rep.worst_right = std::min(rep.worst_right, right);
    if ((left < tol || right < tol) && !rep.witness) {
      rep.passed = false;
      rep.witness = SaddleWitness{x, l};
    }
  }
  if (probes == 0) rep.worst_left = rep.worst_right = 0.0;
  return rep;
}

double dense_max_eigenvalue(std::size_t n, std::span<const double> sym) {
  check_dim("dense_max_eigenvalue", n * n, sym.size());
  if (n == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(view(sym, n, n)),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double dense_spectral_norm_sq(std::size_t rows, std::size_t cols, std::span<const double> m) {
  check_dim("dense_spectral_norm_sq", rows * cols, m.size());
  if (rows == 0 || cols == 0) return 0.0;
  const auto mm = view(m, rows, cols);
  const Eigen::MatrixXd gram = mm.transpose() * mm;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

}  // namespace falm
