#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "falm/oracle.hpp"
#include "falm/problem.hpp"

namespace falm {

enum class GenKind { random_qp, constrained_least_squares, unconstrained };

std::string to_string(GenKind kind);
GenKind parse_gen_kind(const std::string& name);

/// Seeded description of a generated instance.
///
/// random_qp: Q = U diag(e) U^T with U from modified Gram-Schmidt on a
///   Gaussian matrix and e_i = cond^{u_i} (u_0 = 0, u_{n-1} = 1, the rest
///   uniform), c Gaussian, A Gaussian p x n, b = A x_feas for Gaussian x_feas.
/// constrained_least_squares: f(x) = 1/2 ||Mx - d||^2 with M Gaussian
///   (2n x n, entries scaled by 1/sqrt(2n)), A and b as above. cond is unused.
/// unconstrained: Q and c as in random_qp, A = 0 (n -> p), b = 0.
///
/// All draws come from one SplitMix64 stream in the order listed.
struct GenSpec {
  GenKind kind = GenKind::random_qp;
  std::size_t n = 50;
  std::size_t p = 10;
  std::uint64_t seed = 7;
  double cond = 100.0;

  void check() const;
};

struct Generated {
  Problem problem;
  /// Present for random_qp and constrained_least_squares.
  std::optional<QpInstance> qp;
  /// The point b was built from.
  Vector x_feas;
};

Generated generate(const GenSpec& spec);

/// Exact L of a generated objective: lambda_max(Q) or ||M||^2 from a dense
/// eigensolver. Throws InvalidArgument for other objective kinds.
double lipschitz_of(const Objective& obj);

}  // namespace falm
