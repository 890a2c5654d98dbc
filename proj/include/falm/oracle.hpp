#pragma once

// Ground truth for quadratic test problems via dense factorizations. Nothing
// here touches the iterative machinery it is used to check.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "falm/linalg.hpp"
#include "falm/problem.hpp"

namespace falm {

/// min 1/2 <Qx, x> + <c, x> s.t. A x = b, all dense row-major.
struct QpInstance {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> q;
  Vector c;
  std::vector<double> a;
  Vector b;

  /// Throws InvalidArgument unless Q is symmetric (1e-12) and A has full row rank.
  void check() const;
};

struct SaddlePoint {
  Vector x;
  Vector lambda;
};

/// Solves [[Q, A^T], [A, 0]] [x; lambda] = [-c; b]. Throws Error when the KKT
/// matrix is singular.
SaddlePoint kkt_solve(const QpInstance& qp);

/// Problem over the same data, L = lambda_max(Q) from a dense eigensolver.
Problem make_problem(const QpInstance& qp);

struct SaddleWitness {
  Vector x;
  Vector lambda;
};

struct SaddleReport {
  bool passed = true;
  /// min over probes of L(x*, l*) - L(x*, l)
  double worst_left = 0.0;
  /// min over probes of L(x, l*) - L(x*, l*)
  double worst_right = 0.0;
  std::size_t probes = 0;
  std::optional<SaddleWitness> witness;
};

/// Samples `probes` random pairs around the candidate and checks
/// L(x*, l) <= L(x*, l*) <= L(x, l*) with slack >= -1e-9 max(1, |L(x*, l*)|).
SaddleReport verify_saddle(const Problem& prob, std::span<const double> x_star,
                           std::span<const double> lambda_star, std::size_t probes,
                           std::uint64_t seed = 1);

/// Largest eigenvalue of a dense symmetric n x n matrix.
double dense_max_eigenvalue(std::size_t n, std::span<const double> sym);

/// ||M||^2 for a dense rows x cols matrix.
double dense_spectral_norm_sq(std::size_t rows, std::size_t cols, std::span<const double> m);

}  // namespace falm
