#include "falm/kernels.hpp"

#include <algorithm>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace falm::kernels {

namespace {

std::size_t num_blocks(std::size_t n) { return (n + kBlock - 1) / kBlock; }

double block_dot(const double* a, const double* b, std::size_t lo, std::size_t hi) {
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
  return s;
}

// y_j = sum_i a_ij x_i for j in [lo, hi), accumulated in increasing i.
void gemv_t_columns(std::size_t rows, std::size_t cols, const double* a, const double* x,
                    double* y, std::size_t lo, std::size_t hi) {
  std::fill(y + lo, y + hi, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double xi = x[i];
    const double* row = a + i * cols;
    for (std::size_t j = lo; j < hi; ++j) y[j] += row[j] * xi;
  }
}

}  // namespace

namespace serial {

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double total = 0.0;
  for (std::size_t blk = 0; blk < num_blocks(n); ++blk) {
    total += block_dot(a.data(), b.data(), blk * kBlock, std::min(n, (blk + 1) * kBlock));
  }
  return total;
}

void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < rows; ++i) {
    y[i] = dot(a.subspan(i * cols, cols), x);
  }
}

void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y) {
  gemv_t_columns(rows, cols, a.data(), x.data(), y.data(), 0, cols);
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = alpha * x[i] + beta * y[i];
}

}  // namespace serial

namespace omp {

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const auto nb = static_cast<std::ptrdiff_t>(num_blocks(n));
  std::vector<double> partial(static_cast<std::size_t>(nb));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < nb; ++blk) {
    const auto ub = static_cast<std::size_t>(blk);
    partial[ub] = block_dot(a.data(), b.data(), ub * kBlock, std::min(n, (ub + 1) * kBlock));
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y) {
  const auto r = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < r; ++i) {
    y[static_cast<std::size_t>(i)] =
        serial::dot(a.subspan(static_cast<std::size_t>(i) * cols, cols), x);
  }
}

void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y) {
  constexpr std::size_t chunk = 64;
  const auto nchunks = static_cast<std::ptrdiff_t>((cols + chunk - 1) / chunk);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < nchunks; ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * chunk;
    gemv_t_columns(rows, cols, a.data(), x.data(), y.data(), lo, std::min(cols, lo + chunk));
  }
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    y[ui] = alpha * x[ui] + beta * y[ui];
  }
}

}  // namespace omp

double dot(std::span<const double> a, std::span<const double> b) {
  return a.size() >= kParallelThreshold ? omp::dot(a, b) : serial::dot(a, b);
}

void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y) {
  if (rows * cols >= kParallelThreshold) {
    omp::gemv(rows, cols, a, x, y);
  } else {
    serial::gemv(rows, cols, a, x, y);
  }
}

void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y) {
  if (rows * cols >= kParallelThreshold) {
    omp::gemv_t(rows, cols, a, x, y);
  } else {
    serial::gemv_t(rows, cols, a, x, y);
  }
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y) {
  if (y.size() >= kParallelThreshold) {
    omp::axpby(alpha, x, beta, y);
  } else {
    serial::axpby(alpha, x, beta, y);
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace falm::kernels
