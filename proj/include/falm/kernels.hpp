#pragma once

// Dense data-parallel kernels. Every kernel exists twice: a serial reference
// (namespace serial) and an OpenMP version (namespace omp). Both accumulate in
// the same order, so their results agree bit for bit regardless of the thread
// count; tests rely on that, and so does run-to-run reproducibility.

#include <cstddef>
#include <span>

namespace falm::kernels {

/// Reduction block length. Partial sums are formed per block, then summed in
/// block order.
inline constexpr std::size_t kBlock = 256;

/// Below this many multiply-adds the dispatching kernels stay serial.
inline constexpr std::size_t kParallelThreshold = std::size_t{1} << 15;

namespace serial {
double dot(std::span<const double> a, std::span<const double> b);
// y = A x, A row-major rows x cols
void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y);
// y = A^T x
void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y);
// y = alpha x + beta y
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);
}  // namespace serial

namespace omp {
double dot(std::span<const double> a, std::span<const double> b);
void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y);
void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y);
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);
}  // namespace omp

// Size-dispatched entry points used by the rest of the library.
double dot(std::span<const double> a, std::span<const double> b);
void gemv(std::size_t rows, std::size_t cols, std::span<const double> a,
          std::span<const double> x, std::span<double> y);
void gemv_t(std::size_t rows, std::size_t cols, std::span<const double> a,
            std::span<const double> x, std::span<double> y);
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);

/// Number of threads the OpenMP kernels would use (1 when built without OpenMP).
int max_threads();

}  // namespace falm::kernels
