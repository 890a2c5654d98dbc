#pragma once

// Dense transcription of one iteration of the method, written directly from the
// update formulas with Eigen and used as an oracle for falm::step.

#include <Eigen/Dense>

#include "falm/oracle.hpp"
#include "falm/solver.hpp"
#include "test_support.hpp"

namespace falm::test {

struct ReferenceStep {
  Eigen::VectorXd x_next;
  Eigen::VectorXd lambda_next;
  Eigen::VectorXd y;
  Eigen::VectorXd mu;
  double s_next = 0.0;
};

inline ReferenceStep reference_step(const QpInstance& qp, const ValidatedConfig& cfg,
                                    const IterateState& st) {
  const auto n = static_cast<Eigen::Index>(qp.n);
  const RowMatrix q = em(qp.q, qp.n, qp.n);
  const RowMatrix a = em(qp.a, qp.p, qp.n);
  const Eigen::VectorXd c = ev(qp.c), b = ev(qp.b);
  const Eigen::VectorXd x = ev(st.x), xp = ev(st.x_prev);
  const Eigen::VectorXd l = ev(st.lambda), lp = ev(st.lambda_prev);
  const double t = st.t_k, tn = st.t_next;
  const double g = cfg.gamma, sigma = cfg.sigma, rho = cfg.rho, beta = cfg.beta;

  ReferenceStep out;
  const double theta = (t - 1.0) / tn;
  out.y = x + theta * (x - xp);
  out.mu = l + theta * (l - lp);
  const Eigen::VectorXd ax = a * x;
  const Eigen::VectorXd eta = ax + (g / (tn - 1.0 + g)) * (b - ax);
  const Eigen::VectorXd nu = g * l + (t - 1.0) * (l - lp);
  out.s_next = (rho / g) * tn * (tn - 1.0 + g);

  const Eigen::MatrixXd m =
      Eigen::MatrixXd::Identity(n, n) / sigma + (out.s_next / g) * (a.transpose() * a);
  const Eigen::VectorXd grad = q * out.y + c;
  const Eigen::VectorXd rhs = out.y / sigma - grad - beta * a.transpose() * (a * out.y - b) -
                              a.transpose() * nu / g + (out.s_next / g) * a.transpose() * eta;
  out.x_next = m.llt().solve(rhs);

  const Eigen::VectorXd z = g * out.x_next + (tn - 1.0) * (out.x_next - x);
  out.lambda_next = out.mu + (rho / g) * (a * z - g * b);
  return out;
}

}  // namespace falm::test
