#include "falm/problem_io.hpp"

#include <memory>

#include "falm/error.hpp"
#include "falm/oracle.hpp"

namespace falm {

namespace {

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw InvalidArgument(std::string("missing field '") + key + "'");
  }
  return doc.at(key);
}

std::vector<double> read_vector(const json& arr, std::size_t expected, const char* what) {
  if (!arr.is_array()) throw InvalidArgument(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const json& v : arr) {
    if (!v.is_number()) throw InvalidArgument(std::string(what) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  check_dim(what, expected, out.size());
  return out;
}

std::vector<double> read_matrix(const json& arr, std::size_t rows, std::size_t cols,
                                const char* what) {
  if (!arr.is_array()) throw InvalidArgument(std::string(what) + " must be an array");
  if (!arr.empty() && arr.front().is_array()) {
    check_dim(what, rows, arr.size());
    std::vector<double> out;
    out.reserve(rows * cols);
    for (const json& row : arr) {
      std::vector<double> r = read_vector(row, cols, what);
      out.insert(out.end(), r.begin(), r.end());
    }
    return out;
  }
  return read_vector(arr, rows * cols, what);
}

std::vector<double> dense_of(const LinearMap& a) {
  if (const auto* d = dynamic_cast<const DenseMap*>(&a)) {
    return {d->data().begin(), d->data().end()};
  }
  // Materialize column by column through the operator.
  std::vector<double> out(a.rows() * a.cols(), 0.0);
  Vector e(a.cols(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    e[j] = 1.0;
    const Vector col = a.apply(e);
    for (std::size_t i = 0; i < a.rows(); ++i) out[i * a.cols() + j] = col[i];
    e[j] = 0.0;
  }
  return out;
}

}  // namespace

json problem_to_json(const Problem& prob) {
  json doc;
  doc["n"] = prob.n();
  doc["p"] = prob.p();
  doc["A"] = dense_of(prob.a_map());
  doc["b"] = prob.b();
  json obj;
  if (const auto* q = dynamic_cast<const QuadraticObjective*>(&prob.objective())) {
    obj["kind"] = "quadratic";
    obj["Q"] = std::vector<double>(q->q().begin(), q->q().end());
    obj["c"] = std::vector<double>(q->c().begin(), q->c().end());
  } else if (const auto* ls = dynamic_cast<const LeastSquaresObjective*>(&prob.objective())) {
    obj["kind"] = "least_squares";
    obj["M"] = std::vector<double>(ls->m().begin(), ls->m().end());
    obj["d"] = std::vector<double>(ls->d().begin(), ls->d().end());
  } else {
    throw InvalidArgument("problem_to_json: only quadratic and least-squares objectives serialize");
  }
  doc["objective"] = obj;
  doc["lipschitz"] = prob.objective().lipschitz();
  return doc;
}

Problem problem_from_json(const json& doc) {
  const auto n = require(doc, "n").get<std::size_t>();
  const auto p = require(doc, "p").get<std::size_t>();
  std::vector<double> a = read_matrix(require(doc, "A"), p, n, "A");
  Vector b = read_vector(require(doc, "b"), p, "b");
  const json& obj = require(doc, "objective");
  const auto kind = require(obj, "kind").get<std::string>();
  std::optional<double> lip;
  if (doc.contains("lipschitz")) lip = doc.at("lipschitz").get<double>();

  ObjectivePtr objective;
  if (kind == "quadratic") {
    std::vector<double> q = read_matrix(require(obj, "Q"), n, n, "Q");
    Vector c = read_vector(require(obj, "c"), n, "c");
    const double l = lip ? *lip : dense_max_eigenvalue(n, q);
    objective = std::make_shared<QuadraticObjective>(n, std::move(q), std::move(c), l);
  } else if (kind == "least_squares") {
    const json& dj = require(obj, "d");
    if (!dj.is_array()) throw InvalidArgument("d must be an array");
    const std::size_t rows = dj.size();
    std::vector<double> m = read_matrix(require(obj, "M"), rows, n, "M");
    Vector d = read_vector(dj, rows, "d");
    const double l = lip ? *lip : dense_spectral_norm_sq(rows, n, m);
    objective = std::make_shared<LeastSquaresObjective>(rows, n, std::move(m), std::move(d), l);
  } else {
    throw InvalidArgument("unknown objective kind '" + kind + "'");
  }
  return Problem(std::move(objective), std::make_shared<DenseMap>(p, n, std::move(a)), std::move(b));
}

std::optional<QpInstance> qp_view(const Problem& prob) {
  QpInstance qp;
  qp.n = prob.n();
  qp.p = prob.p();
  qp.b = prob.b();
  if (const auto* q = dynamic_cast<const QuadraticObjective*>(&prob.objective())) {
    qp.q.assign(q->q().begin(), q->q().end());
    qp.c.assign(q->c().begin(), q->c().end());
  } else if (const auto* ls = dynamic_cast<const LeastSquaresObjective*>(&prob.objective())) {
    const std::size_t n = ls->dim();
    const std::size_t rows = ls->rows();
    const auto m = ls->m();
    const auto d = ls->d();
    qp.q.assign(n * n, 0.0);
    qp.c.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < rows; ++r) s += m[r * n + i] * m[r * n + j];
        qp.q[i * n + j] = qp.q[j * n + i] = s;
      }
      double s = 0.0;
      for (std::size_t r = 0; r < rows; ++r) s += m[r * n + i] * d[r];
      qp.c[i] = -s;
    }
  } else {
    return std::nullopt;
  }
  if (prob.a_map().is_zero() && prob.p() > 0) return std::nullopt;
  qp.a = dense_of(prob.a_map());
  return qp;
}

json genspec_to_json(const GenSpec& spec) {
  return json{{"kind", to_string(spec.kind)},
              {"n", spec.n},
              {"p", spec.p},
              {"seed", spec.seed},
              {"cond", spec.cond}};
}

GenSpec genspec_from_json(const json& doc) {
  GenSpec spec;
  spec.kind = parse_gen_kind(require(doc, "kind").get<std::string>());
  spec.n = require(doc, "n").get<std::size_t>();
  spec.p = doc.value("p", spec.kind == GenKind::unconstrained ? std::size_t{0} : spec.p);
  spec.seed = doc.value("seed", spec.seed);
  spec.cond = doc.value("cond", spec.cond);
  spec.check();
  return spec;
}

json rule_to_json(const InertialRule& rule) {
  json doc{{"rule", to_string(rule.kind())}, {"m", rule.m()}};
  if (rule.kind() == RuleKind::chambolle_dossal || rule.kind() == RuleKind::attouch_cabot) {
    doc["alpha"] = rule.alpha();
  }
  return doc;
}

InertialRule rule_from_json(const json& doc) {
  const RuleKind kind = parse_rule_kind(require(doc, "rule").get<std::string>());
  switch (kind) {
    case RuleKind::nesterov:
      return InertialRule::nesterov();
    case RuleKind::chambolle_dossal:
      return InertialRule::chambolle_dossal(require(doc, "alpha").get<double>());
    case RuleKind::attouch_cabot:
      return InertialRule::attouch_cabot(require(doc, "alpha").get<double>());
    case RuleKind::constant:
      return InertialRule::constant(doc.value("m", 1.0));
  }
  throw InvalidArgument("unknown rule");
}

}  // namespace falm
