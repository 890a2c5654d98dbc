#include <cstring>

#include "doctest.h"
#include "falm/benchgen.hpp"
#include "falm/error.hpp"
#include "falm/oracle.hpp"
#include "test_support.hpp"

using namespace falm;
using test::randn;

namespace {

QpInstance unit_qp() {
  QpInstance qp;
  qp.n = 2;
  qp.p = 1;
  qp.q = {1, 0, 0, 1};
  qp.c = {0, 0};
  qp.a = {1, 1};
  qp.b = {2};
  return qp;
}

}  // namespace

TEST_CASE("kkt_solve examples") {
  SUBCASE("projection onto a hyperplane") {
    const SaddlePoint s = kkt_solve(unit_qp());
    CHECK(s.x[0] == doctest::Approx(1.0));
    CHECK(s.x[1] == doctest::Approx(1.0));
    CHECK(s.lambda[0] == doctest::Approx(-1.0));
  }
  SUBCASE("unconstrained quadratic") {
    QpInstance qp;
    qp.n = 2;
    qp.q = {2, 0, 0, 4};
    qp.c = {-2, -8};
    const SaddlePoint s = kkt_solve(qp);
    CHECK(s.x[0] == doctest::Approx(1.0));
    CHECK(s.x[1] == doctest::Approx(2.0));
    CHECK(s.lambda.empty());
  }
}

TEST_CASE("kkt_solve residuals on generated instances") {
  for (std::uint64_t seed : {1u, 7u, 19u}) {
    GenSpec spec;
    spec.n = 20;
    spec.p = 5;
    spec.seed = seed;
    const Generated g = generate(spec);
    const SaddlePoint s = kkt_solve(*g.qp);
    const KktResiduals r = kkt_residuals(g.problem, s.x, s.lambda);
    CHECK(r.stationarity <= 1e-9);
    CHECK(r.feasibility <= 1e-9);
  }
}

TEST_CASE("verify_saddle accepts the oracle and flags perturbations") {
  GenSpec spec;
  spec.n = 12;
  spec.p = 4;
  spec.seed = 3;
  const Generated g = generate(spec);
  const SaddlePoint s = kkt_solve(*g.qp);

  const SaddleReport ok = verify_saddle(g.problem, s.x, s.lambda, 1000);
  CHECK(ok.passed);
  CHECK(ok.probes == 1000);
  CHECK_FALSE(ok.witness.has_value());

  Vector xp = s.x;
  xp[0] += 1e-2;
  const SaddleReport bad_x = verify_saddle(g.problem, xp, s.lambda, 1000);
  CHECK_FALSE(bad_x.passed);
  CHECK(bad_x.worst_left < 0.0);
  REQUIRE(bad_x.witness.has_value());

  Vector lp = s.lambda;
  lp[0] += 1e-2;
  const SaddleReport bad_l = verify_saddle(g.problem, s.x, lp, 1000);
  CHECK_FALSE(bad_l.passed);
  CHECK(bad_l.worst_right < 0.0);
}

TEST_CASE("kkt_solve is bitwise deterministic") {
  GenSpec spec;
  spec.seed = 7;
  const Generated g = generate(spec);
  const SaddlePoint a = kkt_solve(*g.qp), b = kkt_solve(*g.qp);
  CHECK(std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)) == 0);
  CHECK(std::memcmp(a.lambda.data(), b.lambda.data(), a.lambda.size() * sizeof(double)) == 0);
}

TEST_CASE("QpInstance::check rejects malformed instances") {
  QpInstance qp = unit_qp();
  qp.q = {1, 0.5, 0, 1};
  CHECK_THROWS_AS(qp.check(), InvalidArgument);

  qp = unit_qp();
  qp.p = 2;
  qp.a = {1, 1, 2, 2};
  qp.b = {2, 4};
  CHECK_THROWS_AS(qp.check(), InvalidArgument);

  qp = unit_qp();
  qp.q = {0, 0, 0, 0};
  CHECK_THROWS_AS(kkt_solve(qp), Error);
}

TEST_CASE("make_problem reproduces the quadratic") {
  const QpInstance qp = unit_qp();
  const Problem prob = make_problem(qp);
  CHECK(prob.n() == 2);
  CHECK(prob.p() == 1);
  CHECK(prob.objective().value(Vector{1, 2}) == doctest::Approx(2.5));
  CHECK(prob.objective().lipschitz() == doctest::Approx(1.0));
}

TEST_CASE("dense spectral helpers") {
  CHECK(dense_max_eigenvalue(3, std::vector<double>{1, 0, 0, 0, 4, 0, 0, 0, 9}) ==
        doctest::Approx(9.0));
  CHECK(dense_spectral_norm_sq(2, 2, std::vector<double>{3, 0, 0, 1}) == doctest::Approx(9.0));
  CHECK(dense_spectral_norm_sq(0, 3, std::vector<double>{}) == 0.0);
}
