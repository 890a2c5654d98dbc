#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace falm {

enum class RuleKind { nesterov, chambolle_dossal, attouch_cabot, constant };

std::string to_string(RuleKind kind);
RuleKind parse_rule_kind(const std::string& name);

/// One of the four supported inertial-parameter rules together with the
/// constant m for which t_{k+1}^2 - m t_{k+1} <= t_k^2 holds.
class InertialRule {
 public:
  /// t_1 = 1, t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2; m = 1.
  static InertialRule nesterov();
  /// t_k = 1 + (k-1)/(alpha-1), alpha >= 3; m = 2/(alpha-1).
  static InertialRule chambolle_dossal(double alpha);
  /// t_k = (k-1)/(alpha-1), alpha >= 3; m = 2/(alpha-1). Note t_1 = 0.
  static InertialRule attouch_cabot(double alpha);
  /// t_k = 1, any m in (0, 1].
  static InertialRule constant(double m = 1.0);

  RuleKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double m() const { return m_; }
  std::string name() const;

  /// t_k for k >= 1. Nesterov values are produced by running the recurrence.
  double t_value(std::size_t k) const;

  /// t_{k+1} - t_k in a cancellation-free form.
  double step(std::size_t k, double t_k) const;

  /// t_{k+1} given t_k: the recurrence for Nesterov, the closed form otherwise.
  double next(std::size_t k, double t_k) const;

 private:
  InertialRule(RuleKind kind, double alpha, double m) : kind_(kind), alpha_(alpha), m_(m) {}

  RuleKind kind_;
  double alpha_;
  double m_;
};

/// Lazily extended table of t_k for one run. Not shared between threads.
class InertialSequence {
 public:
  explicit InertialSequence(InertialRule rule);

  const InertialRule& rule() const { return rule_; }
  /// t_k, k >= 1.
  double operator()(std::size_t k);

 private:
  InertialRule rule_;
  std::vector<double> t_;  // t_[i] = t_{i+1}
};

/// Step bound (m - 2 + sqrt(m^2 + 4)) / 2 on t_{k+1} - t_k; requires 0 < m <= 1.
double phi_m(double m);

struct CertFailure {
  std::size_t index = 0;
  std::string what;
};

struct CertReport {
  std::size_t horizon = 0;
  /// max_k (t_{k+1}^2 - m t_{k+1} - t_k^2), k = 1..K-1
  double max_slack = 0.0;
  std::size_t max_slack_index = 0;
  /// max_k |t_{k+1}^2 - m t_{k+1} - t_k^2|
  double max_abs_slack = 0.0;
  double max_step = 0.0;
  double step_bound = 0.0;
  /// min over k1 <= k <= K of t_k / k
  double kappa = 0.0;
  /// first k with t_k >= 1
  std::size_t k1 = 0;
  bool nondecreasing = true;
  /// t_{k+1} <= 1 + k phi_m; only meaningful when t_1 = 1
  bool growth_bound = true;
  std::optional<CertFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

/// Checks the growth condition, the step bound and monotonicity for
/// k = 1..K. Violations are reported in `failure`, naming the first index.
CertReport certify(const InertialRule& rule, std::size_t horizon);

}  // namespace falm
