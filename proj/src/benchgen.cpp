#include "falm/benchgen.hpp"

#include <cmath>
#include <memory>

#include "falm/error.hpp"
#include "falm/kernels.hpp"
#include "falm/rng.hpp"

namespace falm {

std::string to_string(GenKind kind) {
  switch (kind) {
    case GenKind::random_qp:
      return "random_qp";
    case GenKind::constrained_least_squares:
      return "constrained_least_squares";
    case GenKind::unconstrained:
      return "unconstrained";
  }
  return "unknown";
}

GenKind parse_gen_kind(const std::string& name) {
  if (name == "random_qp") return GenKind::random_qp;
  if (name == "constrained_least_squares") return GenKind::constrained_least_squares;
  if (name == "unconstrained") return GenKind::unconstrained;
  throw InvalidArgument("unknown generator kind '" + name + "'");
}

void GenSpec::check() const {
  if (n == 0) throw InvalidArgument("GenSpec: n must be >= 1");
  if (kind != GenKind::unconstrained && p > n) throw InvalidArgument("GenSpec: p must be <= n");
  if (!(cond >= 1.0) || !std::isfinite(cond)) throw InvalidArgument("GenSpec: cond must be finite and >= 1");
}

namespace {

std::vector<double> gaussian(SplitMix64& rng, std::size_t count, double scale = 1.0) {
  std::vector<double> v(count);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

// Orthonormal columns by modified Gram-Schmidt on a Gaussian n x n matrix.
std::vector<double> random_orthogonal(SplitMix64& rng, std::size_t n) {
  std::vector<double> u = gaussian(rng, n * n);  // row-major, columns are the basis
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += u[i * n + k] * u[i * n + j];
      for (std::size_t i = 0; i < n; ++i) u[i * n + j] -= proj * u[i * n + k];
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += u[i * n + j] * u[i * n + j];
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) u[i * n + j] /= nrm;
  }
  return u;
}

std::vector<double> spectrum_matrix(SplitMix64& rng, std::size_t n, double cond) {
  const std::vector<double> u = random_orthogonal(rng, n);
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    double expo = rng.uniform();
    if (i == 0) expo = 0.0;
    if (i + 1 == n && n > 1) expo = 1.0;
    e[i] = std::pow(cond, expo);
  }
  std::vector<double> q(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += u[i * n + k] * e[k] * u[j * n + k];
      q[i * n + j] = s;
      q[j * n + i] = s;
    }
  }
  return q;
}

}  // namespace

Generated generate(const GenSpec& spec) {
  spec.check();
  SplitMix64 rng(spec.seed);
  const std::size_t n = spec.n;
  const std::size_t p = spec.p;

  QpInstance qp;
  qp.n = n;
  qp.p = p;
  ObjectivePtr objective;

  if (spec.kind == GenKind::constrained_least_squares) {
    const std::size_t rows = 2 * n;
    std::vector<double> m = gaussian(rng, rows * n, 1.0 / std::sqrt(static_cast<double>(rows)));
    Vector d = gaussian(rng, rows);
    qp.q.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < rows; ++r) s += m[r * n + i] * m[r * n + j];
        qp.q[i * n + j] = s;
        qp.q[j * n + i] = s;
      }
    }
    qp.c.assign(n, 0.0);
    kernels::serial::gemv_t(rows, n, m, d, qp.c);
    for (double& v : qp.c) v = -v;
    const double l = dense_spectral_norm_sq(rows, n, m);
    objective = std::make_shared<LeastSquaresObjective>(rows, n, std::move(m), std::move(d), l);
  } else {
    qp.q = spectrum_matrix(rng, n, spec.cond);
    qp.c = gaussian(rng, n);
    objective = std::make_shared<QuadraticObjective>(n, qp.q, qp.c, dense_max_eigenvalue(n, qp.q));
  }

  if (spec.kind == GenKind::unconstrained) {
    auto a_map = std::make_shared<ZeroMap>(n, p);
    return Generated{Problem(std::move(objective), std::move(a_map), Vector(p, 0.0)), std::nullopt,
                     Vector(n, 0.0)};
  }

  qp.a = gaussian(rng, p * n);
  Vector x_feas = gaussian(rng, n);
  qp.b.assign(p, 0.0);
  kernels::serial::gemv(p, n, qp.a, x_feas, qp.b);
  qp.check();

  auto a_map = std::make_shared<DenseMap>(p, n, qp.a);
  Problem prob(std::move(objective), std::move(a_map), qp.b);
  return Generated{std::move(prob), std::move(qp), std::move(x_feas)};
}

double lipschitz_of(const Objective& obj) {
  if (const auto* q = dynamic_cast<const QuadraticObjective*>(&obj)) {
    return dense_max_eigenvalue(q->dim(), q->q());
  }
  if (const auto* ls = dynamic_cast<const LeastSquaresObjective*>(&obj)) {
    return dense_spectral_norm_sq(ls->rows(), ls->dim(), ls->m());
  }
  throw InvalidArgument("lipschitz_of: only quadratic and least-squares objectives are supported");
}

}  // namespace falm
