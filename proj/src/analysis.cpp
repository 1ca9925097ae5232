// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include "snear/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "snear/error.hpp"

namespace snear {

TheoryInputs theory_inputs(const AlgoConfig& cfg, int p) {
  TheoryInputs in;
  in.alpha = cfg.alpha;
  in.t = cfg.schedule.increasing ? 1 : cfg.schedule.t;
  in.sigma_c_sq = cfg.comm.variance_bound(p);
  switch (cfg.grad.kind) {
    case GradOperator::Kind::exact: in.sigma_g_sq = 0.0; break;
    case GradOperator::Kind::gaussian: in.sigma_g_sq = cfg.grad.sigma_g * cfg.grad.sigma_g; break;
    case GradOperator::Kind::minibatch: in.sigma_g_sq = cfg.grad.sigma_g_sq_bound; break;
  }
  return in;
}

namespace {

void fill_alpha_dependent(TheoryConstants& c) {
  c.nu = 2.0 * c.alpha * c.mu * c.L / (c.mu + c.L);
  c.rho = 1.0 - c.alpha * c.gamma;
  c.C = c.rho * c.L * c.L / (c.gamma * c.gamma);
  c.theta = std::max(c.rho, c.beta * c.beta);
  c.eta = 1.0 / std::abs(c.beta * c.beta - c.rho);
}

}  // namespace

TheoryConstants compute_constants(const Objective& obj, const ConsensusMatrix& w,
                                  const GroundTruth& gt, const NodeBlock& y0,
                                  const TheoryInputs& in) {
  if (!(in.alpha > 0.0)) fail(ErrorCode::parameter, "alpha must be positive");
  if (in.t < 1) fail(ErrorCode::parameter, "t must be >= 1");
  const int n = obj.nodes();
  if (w.nodes() != n || y0.rows() != n || y0.cols() != obj.dim() ||
      static_cast<int>(gt.u_star.size()) != n)
    fail(ErrorCode::parameter, "inconsistent dimensions for theory constants");

  const ConvexityConstants& cc = obj.constants();
  TheoryConstants c;
  c.n = n;
  c.p = obj.dim();
  c.t = in.t;
  c.alpha = in.alpha;
  c.mu = cc.mu;
  c.L = cc.L;
  c.mu_bar = cc.mu_bar;
  c.L_bar = cc.L_bar;
  c.kappa = cc.kappa;
  c.gamma = cc.gamma_bar;
  c.beta = w.beta();
  c.sigma_c_sq = in.sigma_c_sq;
  c.sigma_g_sq = in.sigma_g_sq;

  const double limit = steplength_limit(cc);
  if (!(c.alpha < limit)) {
    c.applicable = false;
    std::ostringstream os;
    os << "alpha=" << c.alpha << " is not below " << limit << "; bounds inapplicable";
    c.warnings.push_back(os.str());
  }
  fill_alpha_dependent(c);
  if (std::abs(c.beta * c.beta - c.rho) < 1e-9) {
    c.alpha *= 1.0 + 1e-6;
    fill_alpha_dependent(c);
    c.warnings.push_back("beta^2 == rho; alpha perturbed by 1e-6 relative to define eta");
  }

  double y0_gap = 0.0, u_norm = 0.0;
  for (int i = 0; i < n; ++i) {
    y0_gap += (y0.row(i).transpose() - gt.u_star[i]).squaredNorm();
    u_norm += gt.u_star[i].squaredNorm();
  }
  c.D = 2.0 * y0_gap + 2.0 * (1.0 + 4.0 / (c.nu * c.nu * c.nu)) * u_norm;
  const Vec xbar0 = y0.colwise().mean().transpose();
  c.gap0 = (xbar0 - gt.x_star).squaredNorm();
  return c;
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::t_Q1: return "t_Q1";
    case BoundKind::plus_Q1: return "plus_Q1";
    case BoundKind::t_Q2: return "t_Q2";
    case BoundKind::plus_Q2: return "plus_Q2";
  }
  return "?";
}

BoundKind parse_bound_kind(const std::string& s) {
  if (s == "t_Q1") return BoundKind::t_Q1;
  if (s == "plus_Q1") return BoundKind::plus_Q1;
  if (s == "t_Q2") return BoundKind::t_Q2;
  if (s == "plus_Q2") return BoundKind::plus_Q2;
  fail(ErrorCode::config, "unknown bound kind '" + s + "'");
}

double NeighborhoodBound::category_total(BoundTerm::Category c) const {
  double s = 0.0;
  for (const auto& term : terms)
    if (term.category == c) s += term.value;
  return s;
}

namespace {

using Cat = BoundTerm::Category;

struct Sym {
  double a, r, g, L, D, n, k1, sc, sg, om, b2t;
  explicit Sym(const TheoryConstants& c, int t)
      : a(c.alpha), r(c.rho), g(c.gamma), L(c.L), D(c.D), n(c.n),
        k1((1.0 + c.kappa) * (1.0 + c.kappa)), sc(c.sigma_c_sq), sg(c.sigma_g_sq),
        om(1.0 - c.beta * c.beta), b2t(std::pow(c.beta, 2.0 * t)) {}
};

NeighborhoodBound assemble(const TheoryConstants& c, BoundKind kind, int t, int k,
                           bool with_transient) {
  NeighborhoodBound b;
  b.kind = kind;
  b.t = t;
  b.k = k;
  const Sym s(c, t);
  auto add = [&b](const char* name, Cat cat, double v) { b.terms.push_back({name, cat, v}); };
  if (with_transient) add("transient", Cat::initial, std::pow(s.r, k) * c.gap0);

  switch (kind) {
    case BoundKind::plus_Q1:
      if (k > 0) {
        const double e = c.eta * std::pow(c.theta, k);
        add("connectivity", Cat::connectivity, e * s.a * s.r * s.L * s.L * s.D / (s.n * s.g));
        add("gradient", Cat::gradient, s.a * s.sg / (s.n * s.g));
        add("gradient_transient", Cat::gradient, e * s.a * s.k1 * s.r * s.sg / (2.0 * s.g));
        add("comm", Cat::comm, 4.0 * s.r * s.L * s.L * s.sc / (s.om * s.g * s.g));
        add("comm_transient", Cat::comm, 2.0 * e * s.k1 * s.r * s.sc / (s.a * s.om * s.g));
      } else {
        add("gradient", Cat::gradient, s.a * s.sg / (s.n * s.g));
        add("comm", Cat::comm, 4.0 * s.r * s.L * s.L * s.sc / (s.om * s.g * s.g));
      }
      break;
    case BoundKind::t_Q1: {
      const double g2 = s.g * s.g;
      add("connectivity", Cat::connectivity, s.b2t * s.r * s.L * s.L * s.D / (s.n * g2));
      add("gradient", Cat::gradient, s.a * s.sg / (s.n * s.g));
      add("gradient_connectivity", Cat::gradient, s.b2t * s.k1 * s.r * s.sg / (2.0 * g2));
      add("comm", Cat::comm, 4.0 * s.r * s.L * s.L * s.sc / (s.om * g2));
      add("comm_connectivity", Cat::comm,
          2.0 * s.b2t * s.k1 * s.r * s.sc / (s.a * s.a * s.om * g2));
      break;
    }
    case BoundKind::t_Q2: {
      const double g2 = s.g * s.g;
      add("connectivity", Cat::connectivity, s.b2t * s.r * s.L * s.L * s.D / (s.n * g2));
      add("gradient", Cat::gradient, s.a * s.sg / (s.n * s.g));
      add("gradient_connectivity", Cat::gradient, s.b2t * s.k1 * s.r * s.sg / (2.0 * g2));
      add("comm_average", Cat::comm, t * s.sc / (s.n * s.a * s.g));
      add("comm", Cat::comm, s.r * s.L * s.L * t * s.sc / g2);
      add("comm_connectivity", Cat::comm,
          s.b2t * s.k1 * s.r * t * s.sc / (2.0 * s.a * s.a * g2));
      break;
    }
    case BoundKind::plus_Q2: {
      const double e = c.eta * std::pow(c.theta, k);
      const double km1 = k - 1.0;
      add("connectivity", Cat::connectivity, e * s.a * s.r * s.L * s.L * s.D / (s.n * s.g));
      add("gradient", Cat::gradient, s.a * s.sg / (s.n * s.g));
      add("gradient_transient", Cat::gradient, e * s.a * s.k1 * s.r * s.sg / (2.0 * s.g));
      add("comm_average", Cat::comm, km1 * s.sc / (s.n * s.a * s.g));
      add("comm", Cat::comm, s.r * s.L * s.L * km1 * s.sc / (s.g * s.g));
      add("comm_transient", Cat::comm, e * s.k1 * s.r * km1 * s.sc / (2.0 * s.a * s.g));
      break;
    }
  }
  for (const auto& term : b.terms) b.value += term.value;
  b.vacuous = !c.applicable || !(c.theta < 1.0) || !std::isfinite(b.value);
  return b;
}

}  // namespace

NeighborhoodBound bound_limit(const TheoryConstants& c, BoundKind kind, int k) {
  switch (kind) {
    case BoundKind::plus_Q1: return assemble(c, kind, 0, 0, false);
    case BoundKind::t_Q1:
    case BoundKind::t_Q2: return assemble(c, kind, c.t, 0, false);
    case BoundKind::plus_Q2:
      if (k < 1) fail(ErrorCode::parameter, "plus_Q2 bound needs an iteration k >= 1");
      return assemble(c, kind, 0, k, true);
  }
  fail(ErrorCode::parameter, "unknown bound kind");
}

NeighborhoodBound bound_at(const TheoryConstants& c, BoundKind kind, int k) {
  if (k < 1) fail(ErrorCode::parameter, "bound_at needs k >= 1");
  const int t = (kind == BoundKind::t_Q1 || kind == BoundKind::t_Q2) ? c.t : 0;
  NeighborhoodBound b = assemble(c, kind, t, k, true);
  b.k = k;
  return b;
}

double comm_error_bound_q1(const TheoryConstants& c) {
  return 4.0 * c.n * c.sigma_c_sq / (1.0 - c.beta * c.beta);
}

double comm_error_bound_q2(const TheoryConstants& c, int t) {
  return static_cast<double>(c.n) * t * c.sigma_c_sq;
}

IterateBounds iterate_bounds(const TheoryConstants& c, Variant variant, int k) {
  const Sym s(c, c.t);
  const double L2 = s.L * s.L;
  const double C = c.C;
  const double t = c.t;
  const double grad_avg = 2.0 * s.a * s.sg / (s.n * s.g);
  IterateBounds out;
  if (variant == Variant::Q2) {
    const double base = s.D + s.k1 * s.n * s.sg / (2.0 * L2) +
                        s.k1 * s.n * t * s.sc / (2.0 * s.a * s.a * L2);
    out.y_norm_sq = base;
    out.x_norm_sq = base + s.n * t * s.sc;
    out.x_disagree = s.b2t * s.D + s.b2t * s.k1 * s.n * s.sg / (2.0 * L2) +
                     s.b2t * s.k1 * s.n * t * s.sc / (2.0 * s.a * s.a * L2) + s.n * t * s.sc;
    out.y_disagree = base;
    out.local_x = 2.0 * std::pow(s.r, k) * c.gap0 + 2.0 * s.b2t * (1.0 + C / s.n) * s.D +
                  grad_avg + s.b2t * s.k1 * (s.n + C) * s.sg / L2 +
                  2.0 * (s.n + C) * t * s.sc +
                  s.b2t * s.k1 * (s.n + C) * t * s.sc / (s.a * s.a * L2) +
                  2.0 * t * s.sc / (s.n * s.a * s.g);
    out.local_y = 2.0 * std::pow(s.r, k) * c.gap0 + 2.0 * s.D + 2.0 * s.b2t * C * s.D / s.n +
                  2.0 * s.a * s.sg / (s.n * s.g * s.g) +
                  s.k1 * (s.n + s.b2t * C) * s.sg / L2 + 2.0 * C * t * s.sc +
                  s.k1 * (s.n + s.b2t * C) * t * s.sc / (s.a * s.a * L2) +
                  2.0 * s.r * t * s.sc / (s.n * s.a * s.g);
    return out;
  }
  const double base = s.D + s.k1 * s.n * s.sg / (2.0 * L2) +
                      2.0 * s.k1 * s.n * s.sc / (s.a * s.om * L2);
  out.y_norm_sq = base;
  out.x_norm_sq = base + 4.0 * s.n * s.sc / s.om;
  out.x_disagree = s.b2t * s.D + s.b2t * s.k1 * s.n * s.sg / (2.0 * L2) +
                   2.0 * s.b2t * s.k1 * s.n * s.sc / (s.a * s.a * s.om * L2) +
                   4.0 * s.n * s.sc / s.om;
  out.y_disagree = s.D + s.k1 * s.n * s.sg / (2.0 * L2) +
                   2.0 * s.k1 * s.n * s.sc / (s.a * s.a * s.om * L2);
  out.local_x = 2.0 * std::pow(s.r, k) * c.gap0 + 2.0 * s.b2t * (1.0 + C / s.n) * s.D +
                grad_avg + s.b2t * s.k1 * (s.n + C) * s.sg / L2 +
                8.0 * (s.n + C) * s.sc / s.om +
                4.0 * s.b2t * s.k1 * (s.n + C) * s.sc / (s.a * s.a * s.om * L2);
  out.local_y = 2.0 * std::pow(s.r, k) * c.gap0 + 2.0 * (1.0 + s.b2t * C / s.n) * s.D +
                grad_avg + s.k1 * (s.n + s.b2t * C) * s.sg / L2 + 8.0 * C * s.sc / s.om +
                4.0 * s.k1 * (s.n + s.b2t * C) * s.sc / (s.a * s.a * s.om * L2);
  return out;
}

Metrics measure(const NodeBlock& x, const Objective& obj, const GroundTruth& gt) {
  Metrics m;
  const Vec xbar = x.colwise().mean().transpose();
  m.err_sq = (xbar - gt.x_star).squaredNorm();
  m.fval = obj.total_value(xbar);
  const double denom = gt.f_star != 0.0 ? std::abs(gt.f_star) : 1.0;
  m.fval_rel_err = (m.fval - gt.f_star) / denom;
  m.consensus_viol = (x.rowwise() - xbar.transpose()).squaredNorm();
  return m;
}

double welford_update(double mean, long long k, double value) {
  if (k < 1) fail(ErrorCode::parameter, "welford_update needs k >= 1");
  return mean + (value - mean) / static_cast<double>(k);
}

bool should_terminate(double mean_k, double mean_prev, double eps) {
  const double change = mean_k - mean_prev;
  if (mean_prev == 0.0) return std::abs(change) < eps;
  return std::abs(change / mean_prev) < eps;
}

double cost(long long communications, long long computations, double c_c, double c_g) {
  if (c_c < 0.0 || c_g < 0.0) fail(ErrorCode::parameter, "prices must be nonnegative");
  return c_c * static_cast<double>(communications) + c_g * static_cast<double>(computations);
}

std::string to_string(TraceStatus s) {
  switch (s) {
    case TraceStatus::converged: return "converged";
    case TraceStatus::max_iters: return "max_iters";
    case TraceStatus::diverged: return "diverged";
  }
  return "?";
}

Metric parse_metric(const std::string& s) {
  if (s == "err_sq") return Metric::err_sq;
  if (s == "fval_rel_err") return Metric::fval_rel_err;
  if (s == "consensus_viol") return Metric::consensus_viol;
  fail(ErrorCode::config, "unknown metric '" + s + "'");
}

double metric_of(const TraceRow& row, Metric m) {
  switch (m) {
    case Metric::err_sq: return row.err_sq;
    case Metric::fval_rel_err: return row.fval_rel_err;
    case Metric::consensus_viol: return row.consensus_viol;
  }
  return 0.0;
}

double steady_state_error(const RunTrace& trace, int tail, Metric m) {
  if (trace.status == TraceStatus::diverged) return std::numeric_limits<double>::infinity();
  if (tail < 1) fail(ErrorCode::parameter, "tail window must be positive");
  if (static_cast<int>(trace.rows.size()) < tail)
    fail(ErrorCode::parameter, "trace shorter than the tail window");
  double s = 0.0;
  for (auto it = trace.rows.end() - tail; it != trace.rows.end(); ++it) s += metric_of(*it, m);
  return s / tail;
}

TraceRecorder::TraceRecorder(const Objective& obj, const GroundTruth& gt, double eps,
                             bool stop_on_termination)
    : obj_(obj), gt_(gt), eps_(eps), stop_(stop_on_termination) {}

TraceRow TraceRecorder::row_for(const AlgoState& st) {
  const Metrics m = measure(st.x, obj_, gt_);
  TraceRow row;
  row.k = st.k;
  row.err_sq = m.err_sq;
  row.fval_rel_err = m.fval_rel_err;
  row.consensus_viol = m.consensus_viol;
  row.comm_count = st.communications;
  row.comp_count = st.computations;
  if (st.k == 0) {
    mean_ = m.fval;
  } else {
    const double prev = mean_;
    mean_ = welford_update(mean_, st.k, m.fval);
    if (eps_ > 0.0 && trace_.termination_k < 0 && std::isfinite(mean_) &&
        should_terminate(mean_, prev, eps_))
      trace_.termination_k = st.k;
  }
  row.welford_mean = mean_;
  return row;
}

void TraceRecorder::on_start(const AlgoState& st, const Vec&) {
  trace_ = RunTrace{};
  trace_.rows.push_back(row_for(st));
}

bool TraceRecorder::on_step(const AlgoState& st, const StepReport&) {
  trace_.rows.push_back(row_for(st));
  return stop_ && trace_.termination_k >= 0;
}

RunTrace TraceRecorder::finish(RunStatus status) {
  switch (status) {
    case RunStatus::diverged: trace_.status = TraceStatus::diverged; break;
    case RunStatus::stopped: trace_.status = TraceStatus::converged; break;
    case RunStatus::max_iters:
      trace_.status = trace_.termination_k >= 0 ? TraceStatus::converged : TraceStatus::max_iters;
      break;
  }
  return std::move(trace_);
}

const char* const kTraceHeader =
    "k,err_sq,fval_rel_err,consensus_viol,comm_count,comp_count,welford_mean";

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << kTraceHeader << '\n';
  char buf[256];
  for (const auto& r : trace.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%lld,%lld,%.17g\n", r.k, r.err_sq,
                  r.fval_rel_err, r.consensus_viol, r.comm_count, r.comp_count,
                  r.welford_mean);
    os << buf;
  }
}

namespace {

void kv(std::ostream& os, const std::string& key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << key << " = " << buf << '\n';
}

}  // namespace

void write_bounds_text(std::ostream& os, const TheoryConstants& c,
                       const std::vector<NeighborhoodBound>& bounds) {
  os << "n = " << c.n << "\np = " << c.p << "\nt = " << c.t << '\n';
  kv(os, "alpha", c.alpha);
  kv(os, "mu", c.mu);
  kv(os, "L", c.L);
  kv(os, "mu_bar", c.mu_bar);
  kv(os, "L_bar", c.L_bar);
  kv(os, "kappa", c.kappa);
  kv(os, "gamma_bar", c.gamma);
  kv(os, "beta", c.beta);
  kv(os, "nu", c.nu);
  kv(os, "rho", c.rho);
  kv(os, "D", c.D);
  kv(os, "C", c.C);
  kv(os, "eta", c.eta);
  kv(os, "theta", c.theta);
  kv(os, "sigma_c_sq", c.sigma_c_sq);
  kv(os, "sigma_g_sq", c.sigma_g_sq);
  os << "applicable = " << (c.applicable ? "true" : "false") << '\n';
  for (const auto& w : c.warnings) os << "warning = \"" << w << "\"\n";
  for (const auto& b : bounds) {
    std::string prefix = "bound." + to_string(b.kind);
    if (b.kind == BoundKind::plus_Q2 || b.k > 0) prefix += ".k" + std::to_string(b.k);
    kv(os, prefix + ".value", b.value);
    for (const auto& term : b.terms) kv(os, prefix + "." + term.name, term.value);
    os << prefix << ".vacuous = " << (b.vacuous ? "true" : "false") << '\n';
  }
}

double median(std::vector<double> v) {
  if (v.empty()) fail(ErrorCode::parameter, "median of an empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (m + lower);
  }
  return m;
}

SampleSummary summarize(std::vector<double> values) {
  SampleSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  s.median = median(values);
  const std::size_t groups = std::min<std::size_t>(values.size(), 5);
  std::vector<double> means;
  for (std::size_t g = 0; g < groups; ++g) {
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = g; i < values.size(); i += groups, ++cnt) acc += values[i];
    means.push_back(acc / cnt);
  }
  s.median_of_means = median(means);
  return s;
}

}  // namespace snear
