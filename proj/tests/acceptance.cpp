// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Values that a criterion compares against
// (rates, bounds, iteration budgets) are recomputed here from first
// principles rather than read back from the library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "snear/experiment.hpp"
#include "snear/presets.hpp"

namespace fs = std::filesystem;
using namespace snear;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("snear_acc_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::vector<std::uint64_t> seeds(int count) {
  std::vector<std::uint64_t> s;
  for (int i = 1; i <= count; ++i) s.push_back(static_cast<std::uint64_t>(i));
  return s;
}

Problem quadratic_problem(GraphKind kind, int n, int p, std::uint64_t seed,
                          QuadraticSpec q = {}) {
  ObjectiveSpec o;
  o.kind = ObjectiveSpec::Kind::quadratic;
  o.p = p;
  o.quadratic = q;
  o.seed = seed;
  GraphSpec g;
  g.kind = kind;
  g.n = n;
  g.seed = seed;
  return build_problem(o, g, "");
}

double window_mean(const RunTrace& t, int lo, int hi) {
  double s = 0.0;
  int c = 0;
  for (const auto& r : t.rows)
    if (r.k >= lo && r.k <= hi) {
      s += r.err_sq;
      ++c;
    }
  return c ? s / c : NAN;
}

// 1. Quantizer statistics.
Outcome quantizer_statistics() {
  const int p = 118;
  const long draws = 1000000;
  bool ok = true;
  std::string detail;
  for (int delta : {1, 10, 100}) {
    CommOperator op = CommOperator::quantizer(delta);
    std::vector<double> sum(p, 0.0), sum2(p, 0.0);
    std::vector<double> v(p), q(p);
    double norm_sq = 0.0;
    for (long d = 0; d < draws; ++d) {
      RngStream src(17, StreamKey{Purpose::test, static_cast<std::uint64_t>(delta),
                                  static_cast<std::uint64_t>(d), 0});
      for (int k = 0; k < p; ++k) v[k] = 20.0 * src.uniform() - 10.0;
      RngStream rng(17, StreamKey{Purpose::comm, static_cast<std::uint64_t>(delta),
                                  static_cast<std::uint64_t>(d), 1});
      op.apply_into(v.data(), q.data(), p, rng);
      double e2 = 0.0;
      for (int k = 0; k < p; ++k) {
        const double e = q[k] - v[k];
        sum[k] += e;
        sum2[k] += e * e;
        e2 += e * e;
      }
      norm_sq += e2;
    }
    double worst_z = 0.0;
    for (int k = 0; k < p; ++k) {
      const double mean = sum[k] / draws;
      const double var = sum2[k] / draws - mean * mean;
      const double se = std::sqrt(var / draws);
      const double z = se > 0.0 ? std::abs(mean) / se : (mean == 0.0 ? 0.0 : INFINITY);
      worst_z = std::max(worst_z, z);
    }
    const double msq = norm_sq / draws;
    const double bound = p / (4.0 * delta * delta);
    ok = ok && worst_z <= 4.0 && msq <= bound;
    detail += fmt("delta=%d max|z|=%.2f E||e||^2=%.4g<=%.4g; ", delta, worst_z, msq, bound);
  }
  return {ok, detail};
}

// 2. Consensus matrix invariants.
Outcome consensus_invariants() {
  int checked = 0, bad = 0;
  double worst_stoch = 0.0, worst_beta = 0.0;
  for (GraphKind kind : {GraphKind::complete, GraphKind::ring, GraphKind::path,
                         GraphKind::k_cyclic, GraphKind::erdos_renyi}) {
    for (int n = 5; n <= 25; ++n) {
      GraphSpec s;
      s.kind = kind;
      s.n = n;
      s.k = 4;
      s.p_edge = 0.5;
      s.seed = static_cast<std::uint64_t>(n);
      Graph g = build_graph(s);
      ConsensusMatrix cm = metropolis_weights(g);
      const Eigen::MatrixXd& w = cm.matrix();
      ++checked;
      const double rows = (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
      const double cols = (w.colwise().sum().array() - 1.0).abs().maxCoeff();
      worst_stoch = std::max({worst_stoch, rows, cols});
      bool good = rows <= 1e-12 && cols <= 1e-12 && w == w.transpose();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const bool expect = i == j || g.has_edge(i, j);
          good = good && ((w(i, j) != 0.0) == expect) && w(i, j) >= 0.0;
        }
      // beta from an independent dense solve of W - 11'/n.
      Eigen::MatrixXd centred = w - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(centred);
      const double beta = es.eigenvalues().cwiseAbs().maxCoeff();
      good = good && beta < 1.0 && std::abs(beta - cm.beta()) < 1e-10;
      worst_beta = std::max(worst_beta, beta);
      if (!good) ++bad;
    }
  }
  return {bad == 0, fmt("%d matrices, %d bad, max stochasticity error %.2g, max beta %.6f",
                        checked, bad, worst_stoch, worst_beta)};
}

// 3. Exact-operator linear convergence.
Outcome exact_linear_convergence() {
  Problem pr = quadratic_problem(GraphKind::complete, 5, 5, 3);
  const ConvexityConstants& c = pr.objective->constants();
  const double limit = std::min(2.0 / (c.mu + c.L), 2.0 / (c.mu_bar + c.L_bar));
  const double alpha = 0.9 * limit;
  const double gamma = c.mu_bar * c.L_bar / (c.mu_bar + c.L_bar);
  const double rho = 1.0 - alpha * gamma;
  const int margin = 10;
  const int budget = static_cast<int>(std::ceil(16.0 * std::log(10.0) / -std::log(rho))) + margin;

  AlgoConfig a;
  a.alpha = alpha;
  a.schedule.t = 3;
  a.max_iters = budget;
  RunTrace tr = run_trace(pr, a, 1, RunOptions{InitKind::gaussian, 1.0}, 0.0, false);
  const double gap0 = tr.rows.front().err_sq;
  int reached = -1;
  for (const auto& r : tr.rows)
    if (r.err_sq <= 1e-16 * gap0) {
      reached = r.k;
      break;
    }
  double worst_ratio = 0.0;
  const int last = reached > 0 ? reached : budget;
  for (int k = 11; k <= last; ++k)
    worst_ratio = std::max(worst_ratio, tr.rows[k].err_sq / tr.rows[k - 1].err_sq);
  const bool ok = reached > 0 && worst_ratio <= rho + 0.05;
  return {ok, fmt("complete n=5, alpha=%.4f, rho=%.4f, reached 1e-16 at k=%d (budget %d), "
                  "max ratio after k=10 %.4f <= %.4f",
                  alpha, rho, reached, budget, worst_ratio, rho + 0.05)};
}

// 4. Communication error growth under Q1 and Q2.
Outcome comm_error_growth() {
  const int n = 10, p = 10, reps = 10000;
  const double sigma_c = 0.1;
  Graph g = build_graph(GraphSpec{GraphKind::ring, n});
  ConsensusMatrix w = metropolis_weights(g);
  const double beta = w.beta();
  NodeBlock y = initial_point({InitKind::gaussian, 1.0}, n, p, 99);
  CommOperator comm = CommOperator::gaussian(sigma_c);
  const double q1_bound = 4.0 * n * sigma_c * sigma_c / (1.0 - beta * beta);

  bool ok = true;
  std::string detail;
  for (Variant v : {Variant::Q1, Variant::Q2}) {
    std::vector<double> means;
    for (int t : {1, 2, 5, 10}) {
      NodeBlock exact = y;
      for (int j = 0; j < t; ++j) exact = (w.matrix() * exact).eval();
      double acc = 0.0;
      for (int r = 0; r < reps; ++r) {
        NodeBlock x = y;
        for (int j = 1; j <= t; ++j)
          consensus_round(v, x, w, comm, static_cast<std::uint64_t>(r + 1), 1, j);
        acc += (x - exact).squaredNorm();
      }
      const double m = acc / reps;
      means.push_back(m);
      const double bound = v == Variant::Q1 ? q1_bound : n * t * sigma_c * sigma_c;
      ok = ok && m <= 1.1 * bound;
      detail += fmt("%s t=%d %.4f<=%.4f; ", to_string(v).c_str(), t, m, 1.1 * bound);
    }
    const double ratio = means.back() / means.front();
    if (v == Variant::Q1) {
      ok = ok && ratio < 1.5;
      detail += fmt("Q1 t10/t1=%.3f<1.5; ", ratio);
    } else {
      const bool increasing = std::is_sorted(means.begin(), means.end());
      ok = ok && ratio > 5.0 && increasing;
      detail += fmt("Q2 t10/t1=%.3f>5 %s; ", ratio, increasing ? "increasing" : "not increasing");
    }
  }
  return {ok, detail};
}

const MethodReport* find_method(const CellReport& cell, const std::string& name) {
  for (const auto& m : cell.methods)
    if (m.name == name) return &m;
  return nullptr;
}

KeyValues fig1_config(const fs::path& out, int n_seeds) {
  KeyValues kv = preset("fig1_coarse");
  kv["seeds.count"] = std::to_string(n_seeds);
  kv["output.dir"] = out.string();
  kv["output.traces"] = "none";
  return kv;
}

// 5. Method comparison under coarse quantization.
Outcome method_comparison() {
  const fs::path out = scratch("fig1");
  ExperimentConfig cfg = resolve_config(fig1_config(out, 10));
  const ConvexityConstants& cc = build_objective(cfg.objective, cfg.graph.n)->constants();
  const double limit = steplength_limit(cc);
  ExperimentReport rep = run_experiment(cfg, Mode::compare);
  fs::remove_all(out);
  const CellReport& cell = rep.cells.at(0);

  bool div_ok = true, q1_ok = true;
  std::string detail = fmt("alpha=%.3f (limit %.3f); ", cfg.methods[0].algo.alpha, limit);
  const double alpha_ok = cfg.methods[0].algo.alpha < limit;
  const MethodReport* dgd_q1 = find_method(cell, "dgd_Q1");
  for (const char* m : {"extra", "diging"})
    for (const char* v : {"Q2", "Q3"}) {
      const std::string name = std::string(m) + "_" + v;
      const MethodReport* r = find_method(cell, name);
      const MethodReport* q1 = find_method(cell, std::string(m) + "_Q1");
      const bool all = r->diverged == static_cast<int>(r->runs.size());
      div_ok = div_ok && all;
      detail += fmt("%s diverged %d/%zu (median err %.3g vs Q1 %.3g); ", name.c_str(), r->diverged,
                    r->runs.size(), r->steady_err.median, q1->steady_err.median);
    }
  int q1_bad = 0;
  for (const auto& m : cell.methods) {
    if (m.name.size() < 3 || m.name.compare(m.name.size() - 3, 3, "_Q1") != 0) continue;
    for (const auto& r : m.runs)
      if (r.status == TraceStatus::diverged || !std::isfinite(r.steady_err)) ++q1_bad;
  }
  q1_ok = q1_bad == 0;
  const MethodReport* t5 = find_method(cell, "snear_t5_Q1");
  const double ratio = dgd_q1->steady_err.median / t5->steady_err.median;
  detail += fmt("Q1 non-finite runs %d; dgd/snear_t5 median steady err %.4g/%.4g = %.3f (>=2)",
                q1_bad, dgd_q1->steady_err.median, t5->steady_err.median, ratio);
  return {alpha_ok && div_ok && q1_ok && ratio >= 2.0, detail};
}

// Closed-form t_Q1 limit, written out independently of the library.
double t_q1_limit(const ConvexityConstants& c, double beta, double alpha, int t, double D, int n,
                  double sc, double sg) {
  const double gamma = c.mu_bar * c.L_bar / (c.mu_bar + c.L_bar);
  const double rho = 1.0 - alpha * gamma;
  const double k1 = (1.0 + c.kappa) * (1.0 + c.kappa);
  const double b2t = std::pow(beta, 2.0 * t);
  const double om = 1.0 - beta * beta;
  const double g2 = gamma * gamma;
  const double L2 = c.L * c.L;
  return b2t * rho * L2 * D / (n * g2) + alpha * sg / (n * gamma) +
         b2t * k1 * rho * sg / (2.0 * g2) + 4.0 * rho * L2 * sc / (om * g2) +
         2.0 * b2t * k1 * rho * sc / (alpha * alpha * om * g2);
}

// 6. Neighborhood monotonicity in t.
Outcome neighborhood_monotonicity() {
  const int n = 10, p = 4, iters = 3000, tail = 1000;
  Problem pr = quadratic_problem(GraphKind::ring, n, p, 5);
  const ConvexityConstants& c = pr.objective->constants();
  const double alpha = 0.5 * steplength_limit(c);
  const double s = 0.05;
  // D for y0 = 0: 2(1 + 4/nu^3) sum ||u_i*||^2.
  const double nu = 2.0 * alpha * c.mu * c.L / (c.mu + c.L);
  double u = 0.0;
  for (const auto& ui : pr.truth.u_star) u += ui.squaredNorm();
  const double D = 2.0 * u + 2.0 * (1.0 + 4.0 / (nu * nu * nu)) * u;

  std::vector<double> med;
  std::vector<double> bounds;
  for (int t : {1, 5}) {
    AlgoConfig a;
    a.alpha = alpha;
    a.schedule.t = t;
    a.max_iters = iters;
    a.comm = CommOperator::gaussian(s);
    a.grad = GradOperator::gaussian(s);
    std::vector<double> errs;
    for (auto sd : seeds(30))
      errs.push_back(steady_state_error(run_trace(pr, a, sd, {}, 0.0, false), tail));
    med.push_back(median(errs));
    bounds.push_back(t_q1_limit(c, pr.weights.beta(), alpha, t, D, n, s * s, s * s));
  }
  const bool ok = med[1] <= med[0] && med[0] <= bounds[0] && med[1] <= bounds[1];
  return {ok, fmt("alpha=%.4f beta=%.4f; median steady err t=1 %.4g (bound %.4g), t=5 %.4g "
                  "(bound %.4g)",
                  alpha, pr.weights.beta(), med[0], bounds[0], med[1], bounds[1])};
}

// 7. Variance reduction in n.
Outcome variance_reduction() {
  const int iters = 3000, tail = 2000;
  QuadraticSpec q;
  q.identical = true;
  std::vector<double> med;
  double alpha = 0.0;
  for (int n : {5, 25}) {
    Problem pr = quadratic_problem(GraphKind::complete, n, 4, 6, q);
    alpha = 0.5 * steplength_limit(pr.objective->constants());
    AlgoConfig a;
    a.alpha = alpha;
    a.max_iters = iters;
    a.grad = GradOperator::gaussian(0.1);
    std::vector<double> errs;
    for (auto sd : seeds(30))
      errs.push_back(steady_state_error(run_trace(pr, a, sd, {}, 0.0, false), tail));
    med.push_back(median(errs));
  }
  const double ratio = med[1] / med[0];
  return {ratio <= 0.6, fmt("alpha=%.4f; median steady err n=5 %.4g, n=25 %.4g, ratio %.3f "
                            "(<=0.6, theory 0.2)",
                            alpha, med[0], med[1], ratio)};
}

// 8. Geometric envelope of the increasing schedule.
Outcome plus_envelope() {
  const int K = 200;
  Problem pr = quadratic_problem(GraphKind::ring, 10, 4, 8);
  const ConvexityConstants& c = pr.objective->constants();
  const double alpha = 0.5 * steplength_limit(c);
  const double gamma = c.mu_bar * c.L_bar / (c.mu_bar + c.L_bar);
  const double rho = 1.0 - alpha * gamma;
  const double beta = pr.weights.beta();
  const double theta = std::max(rho, beta * beta);
  AlgoConfig a;
  a.alpha = alpha;
  a.schedule.increasing = true;
  a.max_iters = K;
  RunTrace tr = run_trace(pr, a, 1, RunOptions{InitKind::gaussian, 1.0}, 0.0, false);
  const double m0 = tr.rows[5].err_sq / std::pow(theta, 5);
  double worst = 0.0;
  int worst_k = 5;
  for (int k = 5; k <= K; ++k) {
    const double r = tr.rows[k].err_sq / (m0 * std::pow(theta, k));
    if (r > worst) {
      worst = r;
      worst_k = k;
    }
  }
  return {worst <= 1.05, fmt("theta=max(%.4f, %.4f)=%.4f, M0=%.4g; max err/(M0 theta^k) over "
                             "k=5..%d is %.4f at k=%d (<=1.05); final err %.3g",
                             rho, beta * beta, theta, m0, K, worst, worst_k,
                             tr.rows[K].err_sq)};
}

// 9. Q2 degradation of the increasing schedule.
Outcome q2_degradation() {
  Problem pr = quadratic_problem(GraphKind::ring, 10, 4, 9);
  AlgoConfig a;
  a.alpha = 0.5 * steplength_limit(pr.objective->constants());
  a.schedule.increasing = true;
  a.variant = Variant::Q2;
  a.comm = CommOperator::gaussian(0.1);
  a.max_iters = 200;
  std::vector<double> early, late;
  for (auto sd : seeds(30)) {
    RunTrace tr = run_trace(pr, a, sd, {}, 0.0, false);
    early.push_back(window_mean(tr, 50, 100));
    late.push_back(window_mean(tr, 150, 200));
  }
  const double e = median(early), l = median(late);
  return {l > e, fmt("median window mean k in [50,100] %.4g, k in [150,200] %.4g, ratio %.3f", e,
                     l, l / e)};
}

KeyValues cost_config(const fs::path& out, const std::string& traces) {
  KeyValues kv = preset("scaling");
  kv["sweep.kinds"] = "ring";
  kv["sweep.n"] = "15";
  kv["sweep.t"] = "1,7";
  kv["output.dir"] = out.string();
  kv["output.traces"] = traces;
  return kv;
}

// 10. Cost framework.
Outcome cost_tradeoff() {
  const fs::path out = scratch("cost");
  ExperimentConfig cfg = resolve_config(cost_config(out, "none"));
  ExperimentReport rep = run_experiment(cfg, Mode::sweep);
  fs::remove_all(out);
  const MethodReport* t1 = nullptr;
  const MethodReport* t7 = nullptr;
  for (const auto& cell : rep.cells) (cell.t == 1 ? t1 : t7) = &cell.methods.at(0);
  // prices: index 0 is c_c = c_g, index 1 is c_c = 0.01 c_g.
  const bool cheap_comm = t7->median_costs[1] < t1->median_costs[1];
  const bool equal_price = t1->median_costs[0] < t7->median_costs[0];
  return {cheap_comm && equal_price,
          fmt("median steps t=1 %.0f, t=7 %.0f; c_c=0.01c_g: t=7 %.1f vs t=1 %.1f (%s); "
              "c_c=c_g: t=1 %.1f vs t=7 %.1f (%s)",
              t1->median_steps, t7->median_steps, t7->median_costs[1], t1->median_costs[1],
              cheap_comm ? "t=7 cheaper" : "t=7 not cheaper", t1->median_costs[0],
              t7->median_costs[0], equal_price ? "t=1 cheaper" : "t=1 not cheaper")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs cfg twice (once single-threaded) and compares every trace CSV byte for byte.
std::pair<int, int> compare_twice(const std::function<KeyValues(const fs::path&)>& make,
                                  Mode mode) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run_experiment(resolve_config(make(a)), mode);
  ::setenv("SNEAR_WORKERS", "1", 1);
  run_experiment(resolve_config(make(b)), mode);
  ::unsetenv("SNEAR_WORKERS");
  int files = 0, diff = 0;
  for (const auto& e : fs::recursive_directory_iterator(a / "traces")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path twin = b / fs::relative(e.path(), a);
    if (!fs::exists(twin) || slurp(e.path()) != slurp(twin)) ++diff;
  }
  fs::remove_all(a);
  fs::remove_all(b);
  return {files, diff};
}

// 11. Determinism.
Outcome determinism() {
  auto fig1 = [](const fs::path& out) {
    KeyValues kv = fig1_config(out, 2);
    kv["output.traces"] = "all";
    kv["termination.max_iters"] = "2000";
    kv["metrics.tail"] = "100";
    return kv;
  };
  auto cost = [](const fs::path& out) {
    KeyValues kv = cost_config(out, "all");
    kv["seeds.count"] = "3";
    return kv;
  };
  auto quad = [](const fs::path& out) {
    KeyValues kv = preset("quick");
    kv["output.dir"] = out.string();
    kv["init.kind"] = "gaussian";
    return kv;
  };
  auto [f1, d1] = compare_twice(fig1, Mode::compare);
  auto [f2, d2] = compare_twice(cost, Mode::sweep);
  auto [f3, d3] = compare_twice(quad, Mode::run);
  const int files = f1 + f2 + f3, diff = d1 + d2 + d3;
  return {files > 0 && diff == 0,
          fmt("%d trace files compared across repeated runs (different worker counts), %d differ",
              files, diff)};
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  Outcome (*fn)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "quantizer statistics", 10, quantizer_statistics},
      {2, "consensus matrix invariants", 5, consensus_invariants},
      {3, "exact-operator linear convergence", 5, exact_linear_convergence},
      {4, "communication error growth Q1 vs Q2", 30, comm_error_growth},
      {5, "method comparison under coarse quantization", 600, method_comparison},
      {6, "neighborhood monotonicity in t", 120, neighborhood_monotonicity},
      {7, "variance reduction in n", 120, variance_reduction},
      {8, "increasing-schedule geometric envelope", 10, plus_envelope},
      {9, "Q2 increasing-schedule degradation", 60, q2_degradation},
      {10, "communication/computation cost trade-off", 600, cost_tradeoff},
      {11, "determinism of trace CSVs", 600, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s AC%d %s: %s [%.1f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id,
                c.title, o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
