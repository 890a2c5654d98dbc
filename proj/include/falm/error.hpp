#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace falm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  DimensionError(const std::string& where, std::size_t expected, std::size_t got)
      : Error(where + ": dimension mismatch (expected " + std::to_string(expected) +
              ", got " + std::to_string(got) + ")"),
        expected_(expected),
        got_(got) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t got() const noexcept { return got_; }

 private:
  std::size_t expected_;
  std::size_t got_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Raised when conjugate gradients exhausts its iteration budget.
class SolveError : public Error {
 public:
  SolveError(const std::string& msg, double residual, std::size_t iterations)
      : Error(msg), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

inline void check_dim(const char* where, std::size_t expected, std::size_t got) {
  if (expected != got) throw DimensionError(where, expected, got);
}

}  // namespace falm
