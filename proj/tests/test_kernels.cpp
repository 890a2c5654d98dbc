#include <cstring>
#include <vector>

#include "doctest.h"
#include "falm/kernels.hpp"
#include "test_support.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace k = falm::kernels;
using falm::test::randn;

namespace {

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_CASE("parallel kernels reproduce the serial reference bit for bit") {
#ifdef _OPENMP
  omp_set_num_threads(4);
#endif
  for (std::size_t n : {1u, 7u, 255u, 256u, 257u, 5000u, 70000u}) {
    const auto a = randn(n, 11 + n), b = randn(n, 12 + n);
    CHECK(bit_equal(k::serial::dot(a, b), k::omp::dot(a, b)));
    CHECK(bit_equal(k::serial::dot(a, b), k::dot(a, b)));
  }
  for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{3, 5}, {64, 700}, {300, 130}}) {
    const auto a = randn(rows * cols, rows * 31 + cols);
    const auto x = randn(cols, 5), xt = randn(rows, 6);
    std::vector<double> y1(rows), y2(rows), z1(cols), z2(cols);
    k::serial::gemv(rows, cols, a, x, y1);
    k::omp::gemv(rows, cols, a, x, y2);
    CHECK(bit_equal(y1, y2));
    k::serial::gemv_t(rows, cols, a, xt, z1);
    k::omp::gemv_t(rows, cols, a, xt, z2);
    CHECK(bit_equal(z1, z2));
  }
  const auto x = randn(1000, 3);
  auto y1 = randn(1000, 4), y2 = y1;
  k::serial::axpby(0.3, x, -1.7, y1);
  k::omp::axpby(0.3, x, -1.7, y2);
  CHECK(bit_equal(y1, y2));
}

TEST_CASE("gemv and gemv_t agree with a dense product") {
  const std::size_t rows = 9, cols = 13;
  const auto a = randn(rows * cols, 21);
  const auto x = randn(cols, 22), l = randn(rows, 23);
  std::vector<double> y(rows), z(cols);
  k::gemv(rows, cols, a, x, y);
  k::gemv_t(rows, cols, a, l, z);
  const auto m = falm::test::em(a, rows, cols);
  const Eigen::VectorXd ye = m * falm::test::ev(x);
  const Eigen::VectorXd ze = m.transpose() * falm::test::ev(l);
  for (std::size_t i = 0; i < rows; ++i) CHECK(y[i] == doctest::Approx(ye(static_cast<Eigen::Index>(i))).epsilon(1e-13));
  for (std::size_t j = 0; j < cols; ++j) CHECK(z[j] == doctest::Approx(ze(static_cast<Eigen::Index>(j))).epsilon(1e-13));
}

TEST_CASE("empty inputs") {
  std::vector<double> e;
  CHECK(k::dot(e, e) == 0.0);
  CHECK(k::omp::dot(e, e) == 0.0);
}
