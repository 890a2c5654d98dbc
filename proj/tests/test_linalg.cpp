#include <cmath>
#include <memory>

#include "doctest.h"
#include "falm/error.hpp"
#include "falm/linalg.hpp"
#include "test_support.hpp"

using namespace falm;
using test::em;
using test::randn;

namespace {

double adjoint_gap(const LinearMap& a, std::uint64_t seed) {
  const auto x = randn(a.cols(), seed), l = randn(a.rows(), seed + 1000);
  const double lhs = dot(a.apply(x), l);
  const double rhs = dot(x, a.adjoint(l));
  return std::abs(lhs - rhs) / std::max(1.0, std::max(std::abs(lhs), std::abs(rhs)));
}

}  // namespace

TEST_CASE("dot") {
  CHECK(dot(Vector{1, 2}, Vector{3, 4}) == 11.0);
  CHECK(dot(Vector{1, -2, 3}, Vector(3, 0.0)) == 0.0);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto u = randn(17, s);
    CHECK(dot(u, u) >= 0.0);
  }
  CHECK_THROWS_AS(dot(Vector{1, 2}, Vector{1, 2, 3}), DimensionError);
}

TEST_CASE("adjoint consistency of every shipped LinearMap") {
  const DenseMap dense(7, 11, randn(77, 5));
  const ZeroMap zero(11, 4);
  const ScaledIdentity scaled(9, -2.5);
  const RowSelection select(12, {3, 0, 11, 3, 7});
  const LinearMap* maps[] = {&dense, &zero, &scaled, &select};
  for (const LinearMap* a : maps) {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) worst = std::max(worst, adjoint_gap(*a, s));
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("RowSelection rejects out-of-range indices") {
  CHECK_THROWS_AS(RowSelection(3, {0, 3}), InvalidArgument);
}

TEST_CASE("op_norm_sq examples") {
  const double tol = 1e-8;
  SUBCASE("scaled identity") {
    const ScaledIdentity a(3, 2.0);
    const NormEstimate e = op_norm_sq(a, tol, 1000);
    CHECK(e.converged);
    CHECK(e.value == doctest::Approx(4.0).epsilon(11 * tol));
    CHECK(e.value >= 4.0 * (1 - tol));
  }
  SUBCASE("zero map") {
    const ZeroMap a(4, 3);
    CHECK(op_norm_sq(a, tol, 1000).value == 0.0);
  }
  SUBCASE("dense 5x3 with singular values 3, 2, 1") {
    const Eigen::MatrixXd u = test::orthonormal(5, 3, 41);
    const Eigen::MatrixXd v = test::orthonormal(3, 3, 42);
    const test::RowMatrix a = u * Eigen::Vector3d(3, 2, 1).asDiagonal() * v.transpose();
    // Oracle: eigen-decomposition of A^T A.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a);
    const double truth = es.eigenvalues().maxCoeff();
    CHECK(truth == doctest::Approx(9.0).epsilon(1e-12));
    const DenseMap map(5, 3, test::flat(a));
    const NormEstimate e = op_norm_sq(map, tol, 10000);
    CHECK(e.value >= truth * (1 - tol));
    CHECK(e.value <= truth * (1 + 11 * tol));
  }
}

TEST_CASE("op_norm_sq never underestimates on random dense operators") {
  const double tol = 1e-8;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::size_t rows = 3 + s % 7, cols = 4 + (s * 5) % 11;
    const auto data = randn(rows * cols, 300 + s);
    const auto a = em(data, rows, cols);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a);
    const double truth = es.eigenvalues().maxCoeff();
    const NormEstimate e = op_norm_sq(DenseMap(rows, cols, data), tol, 100000);
    CHECK(e.value >= truth * (1 - tol));
  }
}

TEST_CASE("op_norm_sq flags non-convergence and still returns an inflated estimate") {
  const DenseMap a(6, 6, randn(36, 9));
  const NormEstimate e = op_norm_sq(a, 1e-14, 2);
  CHECK_FALSE(e.converged);
  CHECK(e.value == doctest::Approx(e.raw * (1 + 1e-13)));
  CHECK_THROWS_AS(op_norm_sq(a, 0.0, 10), InvalidArgument);
}

TEST_CASE("SpdSystem is symmetric and validates its coefficients") {
  const DenseMap a(4, 8, randn(32, 1));
  const SpdSystem m(a, 3.0, 0.7);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto u = randn(8, s), v = randn(8, s + 50);
    const double l = dot(m.apply(u), v), r = dot(u, m.apply(v));
    CHECK(std::abs(l - r) <= 1e-10 * std::max(1.0, std::abs(l)));
    CHECK(dot(m.apply(u), u) > 0.0);
  }
  CHECK_THROWS_AS(SpdSystem(a, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(SpdSystem(a, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("solve_spd examples") {
  SUBCASE("identity system") {
    const DenseMap a(2, 3, randn(6, 2));
    const SpdSystem m(a, 1.0, 0.0);
    const Vector r{1.5, -2.0, 0.25};
    CHECK(solve_spd(m, r, std::nullopt, 1e-12, 10).x == r);
  }
  SUBCASE("diagonal system") {
    const ZeroMap a(2, 1);
    const SpdSystem m(a, 2.0, 5.0);
    const SpdSolution s = solve_spd(m, Vector{4, 6}, std::nullopt, 1e-12, 10);
    CHECK(s.x == Vector{2, 3});
  }
  SUBCASE("dense system against a Cholesky oracle") {
    const std::size_t n = 12, p = 5;
    const auto data = randn(p * n, 3);
    const DenseMap a(p, n, data);
    const double sigma = 0.01, s = 37.0, gamma = 0.8;
    const SpdSystem m(a, 1.0 / sigma, s / gamma);
    const auto rhs = randn(n, 4);

    const auto ae = em(data, p, n);
    const Eigen::MatrixXd dense =
        Eigen::MatrixXd::Identity(n, n) / sigma + (s / gamma) * (ae.transpose() * ae);
    const Eigen::VectorXd oracle = dense.llt().solve(test::ev(rhs));

    const SpdSolution sol = solve_spd(m, rhs, std::nullopt, 1e-13, 1000);
    CHECK(test::max_abs_diff(sol.x, test::sv(oracle)) <= 1e-8);
  }
}

TEST_CASE("solve_spd residual contract on random SPD systems") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SplitMix64 rng(seed);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 64);
    const std::size_t p = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    const DenseMap a(p, n, randn(p * n, seed + 77));
    const double shift = std::pow(10.0, 4 * rng.uniform() - 2);
    const double scale = std::pow(10.0, 6 * rng.uniform() - 3);
    const SpdSystem m(a, shift, scale);
    const auto rhs = randn(n, seed + 99, 10.0);
    const double tol = 1e-10;
    const SpdSolution sol = solve_spd(m, rhs, std::nullopt, tol, 20 * n + 100);
    const double resid = norm(sub(m.apply(sol.x), rhs));
    CHECK(resid <= tol * std::max(1.0, norm(rhs)));
    CHECK(sol.residual == doctest::Approx(resid).epsilon(1e-6));
  }
}

TEST_CASE("solve_spd warm start and failure") {
  const DenseMap a(6, 20, randn(120, 8));
  const SpdSystem m(a, 1.0, 50.0);
  const auto rhs = randn(20, 9);
  const SpdSolution cold = solve_spd(m, rhs, std::nullopt, 1e-12, 500);
  const SpdSolution warm = solve_spd(m, rhs, std::span<const double>(cold.x), 1e-12, 500);
  CHECK(warm.iterations == 0);
  CHECK(warm.x == cold.x);

  try {
    (void)solve_spd(m, rhs, std::nullopt, 1e-14, 1);
    FAIL("expected SolveError");
  } catch (const SolveError& e) {
    CHECK(e.residual() > 0.0);
    CHECK(e.iterations() == 1);
  }
  CHECK_THROWS_AS(solve_spd(m, Vector(3, 0.0), std::nullopt, 1e-12, 10), DimensionError);
}
