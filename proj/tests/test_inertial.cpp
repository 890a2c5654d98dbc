#include <cmath>

#include "doctest.h"
#include "falm/error.hpp"
#include "falm/inertial.hpp"

using namespace falm;

TEST_CASE("t sequences: examples") {
  const InertialRule nes = InertialRule::nesterov();
  CHECK(nes.t_value(1) == 1.0);
  CHECK(nes.t_value(2) == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-15));
  const double t2 = (1 + std::sqrt(5.0)) / 2;
  CHECK(nes.t_value(3) == doctest::Approx((1 + std::sqrt(1 + 4 * t2 * t2)) / 2).epsilon(1e-15));

  const InertialRule cd = InertialRule::chambolle_dossal(4);
  CHECK(cd.t_value(1) == 1.0);
  CHECK(cd.t_value(4) == doctest::Approx(2.0));
  CHECK(cd.m() == doctest::Approx(2.0 / 3.0));

  const InertialRule ac = InertialRule::attouch_cabot(4);
  CHECK(ac.t_value(1) == 0.0);
  CHECK(ac.t_value(4) == doctest::Approx(1.0));

  const InertialRule c = InertialRule::constant(0.5);
  CHECK(c.t_value(1) == 1.0);
  CHECK(c.t_value(1000) == 1.0);
}

TEST_CASE("lazy sequence matches the closed forms") {
  InertialSequence seq(InertialRule::nesterov());
  const InertialRule nes = InertialRule::nesterov();
  for (std::size_t k : {1u, 2u, 10u, 57u, 300u}) CHECK(seq(k) == nes.t_value(k));
  CHECK_THROWS_AS(seq(0), InvalidArgument);
}

TEST_CASE("phi_m examples") {
  CHECK(phi_m(1.0) == doctest::Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-15));
  const double m = 2.0 / 3.0;
  CHECK(phi_m(m) == doctest::Approx((m - 2 + std::sqrt(m * m + 4)) / 2).epsilon(1e-15));
  CHECK(phi_m(1.0) == doctest::Approx(0.6180339887498949));
  CHECK_THROWS_AS(phi_m(0.0), InvalidArgument);
  CHECK_THROWS_AS(phi_m(1.5), InvalidArgument);
}

TEST_CASE("certify: examples") {
  SUBCASE("nesterov satisfies the defining inequality with equality") {
    const CertReport r = certify(InertialRule::nesterov(), 1000);
    CHECK(r.ok());
    CHECK(r.max_abs_slack <= 1e-9);
  }
  SUBCASE("chambolle_dossal alpha=3 slack at k=1") {
    // t_1 = 1, t_2 = 1.5, m = 1: 2.25 - 1.5 - 1 = -0.25.
    const CertReport r = certify(InertialRule::chambolle_dossal(3), 2);
    CHECK(r.ok());
    CHECK(r.max_slack == doctest::Approx(-0.25).epsilon(1e-12));
  }
  SUBCASE("attouch_cabot alpha=4 reaches t >= 1 at k = 4") {
    const CertReport r = certify(InertialRule::attouch_cabot(4), 100);
    CHECK(r.ok());
    CHECK(r.k1 == 4);
  }
}

TEST_CASE("certify: properties over 10^4 steps") {
  const InertialRule rules[] = {InertialRule::nesterov(), InertialRule::chambolle_dossal(3),
                                InertialRule::chambolle_dossal(4),
                                InertialRule::chambolle_dossal(7.5),
                                InertialRule::attouch_cabot(4), InertialRule::constant(1.0),
                                InertialRule::constant(0.3)};
  for (const InertialRule& rule : rules) {
    CAPTURE(rule.name());
    const CertReport r = certify(rule, 10000);
    CHECK(r.ok());
    CHECK(r.nondecreasing);
    CHECK(r.max_slack <= 1e-9);
    CHECK(r.max_step <= phi_m(rule.m()) + 1e-12);
    CHECK(r.kappa > 0.0);
    if (rule.t_value(1) == 1.0) CHECK(r.growth_bound);

    // Independent recomputation of the inequality from the closed forms.
    InertialSequence seq(rule);
    double worst = -1e300;
    for (std::size_t k = 1; k < 10000; ++k) {
      const double a = seq(k), b = seq(k + 1);
      worst = std::max(worst, (b * b - rule.m() * b - a * a) / std::max(1.0, b * b));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("accelerated rules have linear growth") {
  const CertReport nes = certify(InertialRule::nesterov(), 10000);
  CHECK(nes.kappa == doctest::Approx(0.5).epsilon(0.01));
  const CertReport cd = certify(InertialRule::chambolle_dossal(4), 10000);
  CHECK(cd.kappa == doctest::Approx(1.0 / 3.0).epsilon(0.01));
  const CertReport c = certify(InertialRule::constant(1.0), 10000);
  CHECK(c.kappa == doctest::Approx(1e-4));
}

TEST_CASE("factories reject invalid parameters") {
  CHECK_THROWS_AS(InertialRule::chambolle_dossal(2.5), InvalidArgument);
  CHECK_THROWS_AS(InertialRule::attouch_cabot(1.0), InvalidArgument);
  CHECK_THROWS_AS(InertialRule::constant(0.0), InvalidArgument);
  CHECK_THROWS_AS(InertialRule::constant(1.01), InvalidArgument);
  CHECK_THROWS_AS(certify(InertialRule::nesterov(), 1), InvalidArgument);
  CHECK_THROWS_AS(parse_rule_kind("heavy_ball"), InvalidArgument);
  CHECK(parse_rule_kind("attouch_cabot") == RuleKind::attouch_cabot);
  CHECK(InertialRule::chambolle_dossal(4).name() == "chambolle_dossal(alpha=4)");
  CHECK(InertialRule::attouch_cabot(7.5).name() == "attouch_cabot(alpha=7.5)");
}
