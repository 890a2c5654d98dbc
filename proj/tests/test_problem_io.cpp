#include "doctest.h"
#include "falm/benchgen.hpp"
#include "falm/error.hpp"
#include "falm/problem_io.hpp"
#include "test_support.hpp"

using namespace falm;

TEST_CASE("problem JSON round trip") {
  for (GenKind kind : {GenKind::random_qp, GenKind::constrained_least_squares}) {
    GenSpec spec;
    spec.kind = kind;
    spec.n = 8;
    spec.p = 3;
    spec.seed = 17;
    const Generated g = generate(spec);
    const json doc = problem_to_json(g.problem);
    const Problem back = problem_from_json(json::parse(doc.dump()));
    CHECK(back.n() == 8);
    CHECK(back.p() == 3);
    CHECK(back.b() == g.problem.b());
    CHECK(back.objective().lipschitz() == g.problem.objective().lipschitz());
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto x = test::randn(8, s);
      CHECK(back.objective().value(x) == g.problem.objective().value(x));
      CHECK(back.a_map().apply(x) == g.problem.a_map().apply(x));
    }
    const auto qa = qp_view(g.problem), qb = qp_view(back);
    REQUIRE(qa.has_value());
    REQUIRE(qb.has_value());
    CHECK(qa->q == qb->q);
    CHECK(qa->c == qb->c);
  }
}

TEST_CASE("nested matrices and computed Lipschitz constants") {
  const json doc = json::parse(R"({
    "n": 2, "p": 1,
    "A": [[1, 1]],
    "b": [2],
    "objective": {"kind": "quadratic", "Q": [[1, 0], [0, 4]], "c": [0, 0]}
  })");
  const Problem prob = problem_from_json(doc);
  CHECK(prob.objective().lipschitz() == doctest::Approx(4.0));
  CHECK(prob.objective().value(Vector{1, 1}) == doctest::Approx(2.5));
  CHECK(prob.a_map().apply(Vector{1, 2}) == Vector{3});
}

TEST_CASE("malformed problem documents are rejected") {
  CHECK_THROWS_AS(problem_from_json(json::parse(R"({"n": 2, "p": 1})")), InvalidArgument);
  CHECK_THROWS_AS(problem_from_json(json::parse(R"({
    "n": 2, "p": 1, "A": [1, 1, 1], "b": [2],
    "objective": {"kind": "quadratic", "Q": [1, 0, 0, 1], "c": [0, 0]}})")),
                  DimensionError);
  CHECK_THROWS_AS(problem_from_json(json::parse(R"({
    "n": 2, "p": 1, "A": [1, 1], "b": [2],
    "objective": {"kind": "cubic"}})")),
                  InvalidArgument);
}

TEST_CASE("generator spec and rule documents") {
  const GenSpec spec = genspec_from_json(json::parse(R"({"kind": "constrained_least_squares", "n": 9, "p": 2, "seed": 5})"));
  CHECK(spec.kind == GenKind::constrained_least_squares);
  CHECK(spec.n == 9);
  CHECK(spec.seed == 5);
  const GenSpec back = genspec_from_json(genspec_to_json(spec));
  CHECK(back.n == spec.n);
  CHECK(back.p == spec.p);

  const InertialRule cd = rule_from_json(json::parse(R"({"rule": "chambolle_dossal", "alpha": 4})"));
  CHECK(cd.kind() == RuleKind::chambolle_dossal);
  CHECK(cd.alpha() == 4.0);
  const InertialRule c = rule_from_json(json::parse(R"({"rule": "constant", "m": 0.5})"));
  CHECK(c.m() == 0.5);
  CHECK(rule_from_json(rule_to_json(cd)).name() == cd.name());
  CHECK_THROWS_AS(rule_from_json(json::parse(R"({"rule": "heavy_ball"})")), InvalidArgument);
}
