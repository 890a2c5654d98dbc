#include "falm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "falm/error.hpp"

namespace falm {

Metric::Metric(const LinearMap& a_map, double sigma, double beta)
    : a_map_(&a_map), sigma_(sigma), beta_(beta) {
  if (!(sigma > 0.0)) throw InvalidArgument("Metric: sigma must be > 0");
}

double Metric::q_norm_sq(std::span<const double> u) const {
  check_dim("q_norm_sq", a_map_->cols(), u.size());
  double s = norm_sq(u) / sigma_;
  if (beta_ != 0.0) s -= beta_ * norm_sq(a_map_->apply(u));
  return s;
}

double gap(const Problem& prob, std::span<const double> x, std::span<const double> lambda,
           const SaddlePoint& star) {
  return lagrangian(prob, x, star.lambda) - lagrangian(prob, star.x, lambda);
}

double energy(const Problem& prob, const Metric& metric, const ValidatedConfig& cfg,
              const IterateState& st, const SaddlePoint& star) {
  const std::size_t n = prob.n();
  const std::size_t p = prob.p();
  check_dim("energy x", n, st.x.size());
  check_dim("energy lambda", p, st.lambda.size());
  check_dim("energy x*", n, star.x.size());
  check_dim("energy lambda*", p, star.lambda.size());
  const double g = cfg.gamma;
  const double r = cfg.rho;
  const double t = st.t_k;

  const double lag_gap = aug_lagrangian(prob, st.x, star.lambda, cfg.beta) -
                         aug_lagrangian(prob, star.x, st.lambda, cfg.beta);

  Vector zdiff(n), xdiff(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = g * st.x[i] + (t - 1.0) * (st.x[i] - st.x_prev[i]);
    zdiff[i] = z - g * star.x[i];
    xdiff[i] = st.x[i] - star.x[i];
  }
  Vector nudiff(p), ldiff(p), lstep(p);
  for (std::size_t i = 0; i < p; ++i) {
    lstep[i] = st.lambda[i] - st.lambda_prev[i];
    nudiff[i] = g * st.lambda[i] + (t - 1.0) * lstep[i] - g * star.lambda[i];
    ldiff[i] = st.lambda[i] - star.lambda[i];
  }

  return t * (t - 1.0 + g) * lag_gap + 0.5 * metric.q_norm_sq(zdiff) + norm_sq(nudiff) / (2.0 * r) +
         0.5 * g * (1.0 - g) * metric.q_norm_sq(xdiff) + g * (1.0 - g) / (2.0 * r) * norm_sq(ldiff) +
         (1.0 - g) / (2.0 * r) * (t - 1.0) * norm_sq(lstep);
}

ZIdentityResidual z_identity_residual(const IterateState& before, const StepTrace& trace,
                                      const IterateState& after) {
  const double tn = after.t_k;
  const double t = before.t_k;
  ZIdentityResidual res;

  const std::size_t n = before.x.size();
  Vector z0(n), z1(n), diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    z0[i] = before.x[i] + (t - 1.0) * (before.x[i] - before.x_prev[i]);
    z1[i] = after.x[i] + (tn - 1.0) * (after.x[i] - after.x_prev[i]);
    diff[i] = (after.x[i] - trace.y[i]) - (z1[i] - z0[i]) / tn;
  }
  res.primal = norm_inf(diff) / std::max(1.0, norm(z1));

  const std::size_t p = before.lambda.size();
  Vector nu0(p), nu1(p), ddiff(p);
  for (std::size_t i = 0; i < p; ++i) {
    nu0[i] = before.lambda[i] + (t - 1.0) * (before.lambda[i] - before.lambda_prev[i]);
    nu1[i] = after.lambda[i] + (tn - 1.0) * (after.lambda[i] - after.lambda_prev[i]);
    ddiff[i] = (after.lambda[i] - trace.mu[i]) - (nu1[i] - nu0[i]) / tn;
  }
  res.dual = p == 0 ? 0.0 : norm_inf(ddiff) / std::max(1.0, norm(nu1));
  return res;
}

std::string to_string(Field f) {
  switch (f) {
    case Field::gap:
      return "gap";
    case Field::feas:
      return "feas";
    case Field::obj_err:
      return "obj_err";
    case Field::kkt_grad:
      return "kkt_grad";
    case Field::kkt_feas:
      return "kkt_feas";
    case Field::energy:
      return "energy";
  }
  return "unknown";
}

Field parse_field(const std::string& name) {
  for (Field f : {Field::gap, Field::feas, Field::obj_err, Field::kkt_grad, Field::kkt_feas,
                  Field::energy}) {
    if (to_string(f) == name) return f;
  }
  throw InvalidArgument("unknown record field '" + name + "'");
}

std::optional<double> field_value(const RunRecord& r, Field f) {
  switch (f) {
    case Field::gap:
      return r.gap;
    case Field::feas:
      return r.feas;
    case Field::obj_err:
      return r.obj_err;
    case Field::kkt_grad:
      return r.kkt_grad;
    case Field::kkt_feas:
      return r.kkt_feas;
    case Field::energy:
      return r.energy;
  }
  return std::nullopt;
}

RateFit rate_fit(std::span<const SeriesPoint> series, std::size_t k_min, std::size_t k_max) {
  constexpr double floor_value = 1e-14;
  RateFit fit;
  std::vector<double> lx, ly;
  for (const SeriesPoint& pt : series) {
    if (pt.k < k_min || pt.k > k_max) continue;
    if (!(pt.value > floor_value) || !std::isfinite(pt.value)) {
      ++fit.excluded;
      continue;
    }
    lx.push_back(std::log(static_cast<double>(pt.k)));
    ly.push_back(std::log(pt.value));
  }
  fit.used = lx.size();
  if (fit.used < 10) {
    throw Error("rate_fit: only " + std::to_string(fit.used) + " usable points in [" +
                std::to_string(k_min) + ", " + std::to_string(k_max) + "] (" +
                std::to_string(fit.excluded) + " excluded)");
  }
  const double cnt = static_cast<double>(fit.used);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < fit.used; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= cnt;
  my /= cnt;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < fit.used; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw Error("rate_fit: window holds a single k");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < fit.used; ++i) {
    const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
    sse += e * e;
  }
  // A flat series is fitted exactly.
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

RateFit rate_fit(std::span<const RunRecord> records, Field field, std::size_t k_min,
                 std::size_t k_max) {
  std::vector<SeriesPoint> series;
  series.reserve(records.size());
  std::size_t missing = 0;
  for (const RunRecord& r : records) {
    if (r.k < k_min || r.k > k_max) continue;
    const auto v = field_value(r, field);
    if (!v) {
      ++missing;
      continue;
    }
    series.push_back({r.k, *v});
  }
  RateFit fit = rate_fit(series, k_min, k_max);
  fit.excluded += missing;
  return fit;
}

std::vector<SeriesPoint> dual_bound_series(std::span<const DualSample> samples,
                                           std::span<const double> lambda_star,
                                           const LinearMap& a_map) {
  std::vector<SeriesPoint> out;
  out.reserve(samples.size());
  for (const DualSample& s : samples) {
    const Vector d = sub(s.lambda, lambda_star);
    out.push_back({s.k, s.t_k * norm(a_map.adjoint(d))});
  }
  return out;
}

namespace {

template <typename Lhs, typename Rhs>
BoundCheck check_each(std::span<const RunRecord> records, std::size_t from_k, Lhs lhs, Rhs rhs) {
  BoundCheck c;
  c.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].k < from_k) continue;
    const auto l = lhs(i);
    if (!l) continue;
    const double excess = *l - rhs(i);
    ++c.checked;
    c.worst_excess = std::max(c.worst_excess, excess);
    if (excess > 0.0 && c.ok) {
      c.ok = false;
      c.first_violation = records[i].k;
    }
  }
  if (c.checked == 0) c.worst_excess = 0.0;
  return c;
}

}  // namespace

BoundCheck check_energy_monotone(std::span<const RunRecord> records, std::size_t from_k,
                                 double e_ref, double tol) {
  const double slack = tol * std::max(1.0, e_ref);
  BoundCheck c;
  c.worst_excess = -std::numeric_limits<double>::infinity();
  const RunRecord* prev = nullptr;
  for (const RunRecord& r : records) {
    if (r.k < from_k || !r.energy) continue;
    if (prev != nullptr) {
      const double excess = *r.energy - (*prev->energy + slack);
      ++c.checked;
      c.worst_excess = std::max(c.worst_excess, excess);
      if (excess > 0.0 && c.ok) {
        c.ok = false;
        c.first_violation = r.k;
      }
    }
    prev = &r;
  }
  if (c.checked == 0) c.worst_excess = 0.0;
  return c;
}

BoundCheck check_gap_bound(std::span<const RunRecord> records, std::size_t from_k, double e_ref,
                           double gamma, double tol) {
  return check_each(
      records, from_k,
      [&](std::size_t i) -> std::optional<double> {
        const RunRecord& r = records[i];
        if (!r.gap) return std::nullopt;
        return r.t_k * r.t_k * *r.gap;
      },
      [&](std::size_t) { return e_ref / gamma + tol; });
}

BoundCheck check_feas_bound(std::span<const RunRecord> records, std::size_t from_k, double e_ref,
                            double beta, double gamma, double tol) {
  if (!(beta > 0.0)) throw InvalidArgument("check_feas_bound: beta must be > 0");
  const double bound = std::sqrt(2.0 * std::max(0.0, e_ref) / (beta * gamma)) + tol;
  return check_each(
      records, from_k,
      [&](std::size_t i) -> std::optional<double> { return records[i].t_k * records[i].feas; },
      [&](std::size_t) { return bound; });
}

double kkt_decay_ratio(std::span<const RunRecord> records, std::size_t k_lo, std::size_t k_hi) {
  const RunRecord* lo = nullptr;
  const RunRecord* hi = nullptr;
  for (const RunRecord& r : records) {
    if (r.k == k_lo) lo = &r;
    if (r.k == k_hi) hi = &r;
  }
  if (lo == nullptr || hi == nullptr) {
    throw Error("kkt_decay_ratio: records for k = " + std::to_string(k_lo) + " and " +
                std::to_string(k_hi) + " are required");
  }
  const double a = std::sqrt(static_cast<double>(k_lo)) * lo->kkt_grad;
  const double b = std::sqrt(static_cast<double>(k_hi)) * hi->kkt_grad;
  if (a == 0.0) return b == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return b / a;
}

Recorder::Recorder(const Problem& prob, const ValidatedConfig& cfg, std::optional<SaddlePoint> star)
    : prob_(&prob), cfg_(cfg), metric_(prob, cfg), star_(std::move(star)) {
  if (star_) {
    check_dim("Recorder x*", prob.n(), star_->x.size());
    check_dim("Recorder lambda*", prob.p(), star_->lambda.size());
    f_star_ = prob.objective().value(star_->x);
  }
}

Observer Recorder::observer() {
  return [this](const IterateState& st, const StepTrace* trace) { observe(st, trace); };
}

void Recorder::observe(const IterateState& st, const StepTrace* trace) {
  const Problem& prob = *prob_;
  RunRecord rec;
  rec.k = st.k;
  rec.t_k = st.t_k;
  const KktResiduals kkt = kkt_residuals(prob, st.x, st.lambda);
  rec.kkt_grad = kkt.stationarity;
  rec.kkt_feas = kkt.feasibility;
  rec.feas = kkt.feasibility;
  rec.cg_iters = trace != nullptr ? trace->cg_iters : 0;

  if (star_) {
    rec.gap = gap(prob, st.x, st.lambda, *star_);
    rec.obj_err = std::abs(prob.objective().value(st.x) - f_star_);
    rec.energy = energy(prob, metric_, cfg_, st, *star_);
    dual_.push_back({st.k, st.t_k, st.lambda});
    if (!anchor_k_ && st.t_k >= 1.0) {
      anchor_k_ = st.k;
      anchor_energy_ = rec.energy;
    }
  }

  if (trace != nullptr) {
    const double tn2 = st.t_k * st.t_k;  // st.t_k is t_{k+1} of the step just taken
    const Vector dx = sub(st.x, trace->y);
    const double qx = cfg_.gamma * metric_.q_norm_sq(dx) - cfg_.lipschitz * norm_sq(dx);
    const Vector dl = sub(st.lambda, trace->mu);
    const double prev_p = primal_sum_.empty() ? 0.0 : primal_sum_.back();
    const double prev_d = dual_sum_.empty() ? 0.0 : dual_sum_.back();
    primal_sum_.push_back(prev_p + 0.5 * tn2 * qx);
    dual_sum_.push_back(prev_d + cfg_.gamma / (2.0 * cfg_.rho) * tn2 * norm_sq(dl));

    if (last_ && last_->k + 1 == st.k) {
      const ZIdentityResidual z = z_identity_residual(*last_, *trace, st);
      worst_z_.primal = std::max(worst_z_.primal, z.primal);
      worst_z_.dual = std::max(worst_z_.dual, z.dual);
    }
  }
  last_ = st;
  records_.push_back(std::move(rec));
}

}  // namespace falm
