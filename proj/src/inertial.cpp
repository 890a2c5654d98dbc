#include "falm/inertial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "falm/error.hpp"

namespace falm {

std::string to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::nesterov:
      return "nesterov";
    case RuleKind::chambolle_dossal:
      return "chambolle_dossal";
    case RuleKind::attouch_cabot:
      return "attouch_cabot";
    case RuleKind::constant:
      return "constant";
  }
  return "unknown";
}

RuleKind parse_rule_kind(const std::string& name) {
  if (name == "nesterov") return RuleKind::nesterov;
  if (name == "chambolle_dossal") return RuleKind::chambolle_dossal;
  if (name == "attouch_cabot") return RuleKind::attouch_cabot;
  if (name == "constant") return RuleKind::constant;
  throw InvalidArgument("unknown inertial rule '" + name + "'");
}

namespace {

void check_alpha(const char* who, double alpha) {
  if (!(alpha >= 3.0) || !std::isfinite(alpha)) {
    throw InvalidArgument(std::string(who) + ": alpha must be >= 3");
  }
}

}  // namespace

InertialRule InertialRule::nesterov() { return {RuleKind::nesterov, 0.0, 1.0}; }

InertialRule InertialRule::chambolle_dossal(double alpha) {
  check_alpha("chambolle_dossal", alpha);
  return {RuleKind::chambolle_dossal, alpha, 2.0 / (alpha - 1.0)};
}

InertialRule InertialRule::attouch_cabot(double alpha) {
  check_alpha("attouch_cabot", alpha);
  return {RuleKind::attouch_cabot, alpha, 2.0 / (alpha - 1.0)};
}

InertialRule InertialRule::constant(double m) {
  if (!(m > 0.0 && m <= 1.0)) throw InvalidArgument("constant rule: m must lie in (0, 1]");
  return {RuleKind::constant, 0.0, m};
}

std::string InertialRule::name() const {
  switch (kind_) {
    case RuleKind::chambolle_dossal:
    case RuleKind::attouch_cabot: {
      std::string a = std::to_string(alpha_);
      a.erase(a.find_last_not_of('0') + 1);
      if (a.back() == '.') a.pop_back();
      return to_string(kind_) + "(alpha=" + a + ")";
    }
    default:
      return to_string(kind_);
  }
}

double InertialRule::step(std::size_t /*k*/, double t_k) const {
  switch (kind_) {
    case RuleKind::nesterov:
      // (1 + sqrt(1 + 4t^2))/2 - t = (1 + 1/(sqrt(1 + 4t^2) + 2t))/2
      return 0.5 * (1.0 + 1.0 / (std::sqrt(1.0 + 4.0 * t_k * t_k) + 2.0 * t_k));
    case RuleKind::chambolle_dossal:
    case RuleKind::attouch_cabot:
      return 1.0 / (alpha_ - 1.0);
    case RuleKind::constant:
      return 0.0;
  }
  return 0.0;
}

double InertialRule::next(std::size_t k, double t_k) const {
  return kind_ == RuleKind::nesterov ? t_k + step(k, t_k) : t_value(k + 1);
}

double InertialRule::t_value(std::size_t k) const {
  if (k == 0) throw InvalidArgument("t_value: k must be >= 1");
  const double km1 = static_cast<double>(k - 1);
  switch (kind_) {
    case RuleKind::nesterov: {
      double t = 1.0;
      for (std::size_t j = 1; j < k; ++j) t += step(j, t);
      return t;
    }
    case RuleKind::chambolle_dossal:
      return 1.0 + km1 / (alpha_ - 1.0);
    case RuleKind::attouch_cabot:
      return km1 / (alpha_ - 1.0);
    case RuleKind::constant:
      return 1.0;
  }
  return 1.0;
}

InertialSequence::InertialSequence(InertialRule rule) : rule_(rule) {}

double InertialSequence::operator()(std::size_t k) {
  if (k == 0) throw InvalidArgument("InertialSequence: k must be >= 1");
  if (rule_.kind() != RuleKind::nesterov) return rule_.t_value(k);
  if (t_.empty()) t_.push_back(1.0);
  while (t_.size() < k) {
    t_.push_back(rule_.next(t_.size(), t_.back()));
  }
  return t_[k - 1];
}

double phi_m(double m) {
  if (!(m > 0.0 && m <= 1.0)) throw InvalidArgument("phi_m: m must lie in (0, 1]");
  return 0.5 * (m - 2.0 + std::sqrt(m * m + 4.0));
}

CertReport certify(const InertialRule& rule, std::size_t horizon) {
  if (horizon < 2) throw InvalidArgument("certify: horizon must be >= 2");
  CertReport rep;
  rep.horizon = horizon;
  rep.step_bound = phi_m(rule.m());
  rep.max_slack = -std::numeric_limits<double>::infinity();
  rep.kappa = std::numeric_limits<double>::infinity();

  InertialSequence seq(rule);
  const double m = rule.m();
  const bool starts_at_one = seq(1) == 1.0;
  auto fail = [&](std::size_t k, std::string what) {
    if (!rep.failure) rep.failure = CertFailure{k, std::move(what)};
  };

  for (std::size_t k = 1; k <= horizon; ++k) {
    const double t = seq(k);
    if (rep.k1 == 0 && t >= 1.0) rep.k1 = k;
    if (rep.k1 != 0) rep.kappa = std::min(rep.kappa, t / static_cast<double>(k));
    if (k == horizon) break;

    const double dt = rule.step(k, t);
    const double t_next = seq(k + 1);
    // t_{k+1}^2 - m t_{k+1} - t_k^2 = dt (t_{k+1} + t_k) - m t_{k+1}
    const double slack = dt * (t_next + t) - m * t_next;
    if (slack > rep.max_slack) {
      rep.max_slack = slack;
      rep.max_slack_index = k;
    }
    rep.max_abs_slack = std::max(rep.max_abs_slack, std::abs(slack));
    rep.max_step = std::max(rep.max_step, dt);

    if (dt < 0.0) {
      rep.nondecreasing = false;
      fail(k, "sequence decreases: t_{k+1} < t_k");
    }
    if (slack > 1e-9) fail(k, "t_{k+1}^2 - m t_{k+1} <= t_k^2 violated");
    if (dt > rep.step_bound + 1e-12) fail(k, "t_{k+1} - t_k <= phi_m violated");
    if (starts_at_one && t_next > 1.0 + static_cast<double>(k) * rep.step_bound + 1e-9) {
      rep.growth_bound = false;
      fail(k, "t_{k+1} <= 1 + k phi_m violated");
    }
  }
  if (rep.k1 == 0) rep.kappa = 0.0;
  return rep;
}

}  // namespace falm
