// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNEAR_ANALYSIS_HPP
#define SNEAR_ANALYSIS_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "snear/algorithms.hpp"

namespace snear {

struct TheoryInputs {
  double alpha = 0.1;
  int t = 1;
  double sigma_c_sq = 0.0;  // per node and round
  double sigma_g_sq = 0.0;  // per node
};

/// sigma_c^2 from the channel's variance bound; sigma_g^2 from the gradient
/// operator (sigma_g^2 for gaussian, the supplied estimate for minibatch).
TheoryInputs theory_inputs(const AlgoConfig& cfg, int p);

struct TheoryConstants {
  int n = 0;
  int p = 0;
  int t = 1;
  double alpha = 0.0;
  double mu = 0.0, L = 0.0, mu_bar = 0.0, L_bar = 0.0, kappa = 0.0, gamma = 0.0;
  double beta = 0.0;
  double nu = 0.0;     // 2 alpha mu L / (mu + L)
  double rho = 0.0;    // 1 - alpha gamma
  double D = 0.0;      // 2||y0 - u*||^2 + 2(1 + 4/nu^3)||u*||^2
  double C = 0.0;      // rho L^2 / gamma^2
  double eta = 0.0;    // 1 / |beta^2 - rho|
  double theta = 0.0;  // max(rho, beta^2)
  double sigma_c_sq = 0.0;
  double sigma_g_sq = 0.0;
  double gap0 = 0.0;   // ||xbar_0 - x*||^2
  bool applicable = true;
  std::vector<std::string> warnings;
};

/// y0 is the realized initial block, so D carries no expectation.
TheoryConstants compute_constants(const Objective& obj, const ConsensusMatrix& w,
                                  const GroundTruth& gt, const NodeBlock& y0,
                                  const TheoryInputs& in);

enum class BoundKind { t_Q1, plus_Q1, t_Q2, plus_Q2 };
std::string to_string(BoundKind k);
BoundKind parse_bound_kind(const std::string& s);

struct BoundTerm {
  enum class Category { initial, connectivity, gradient, comm };
  std::string name;
  Category category;
  double value;
};

struct NeighborhoodBound {
  BoundKind kind = BoundKind::plus_Q1;
  int t = 0;  // consensus rounds used (t variants)
  int k = 0;  // iteration index (0 for limits)
  double value = 0.0;
  std::vector<BoundTerm> terms;
  bool vacuous = false;

  double category_total(BoundTerm::Category c) const;
  double gradient_term() const { return category_total(BoundTerm::Category::gradient); }
  double comm_term() const { return category_total(BoundTerm::Category::comm); }
  double connectivity_term() const { return category_total(BoundTerm::Category::connectivity); }
};

/// lim sup of E||xbar_k - x*||^2. plus_Q2 has no finite limit; its value at
/// iteration k (k >= 1) is returned instead.
NeighborhoodBound bound_limit(const TheoryConstants& c, BoundKind kind, int k = 0);
/// Finite-k bound including the rho^k ||xbar_0 - x*||^2 transient.
NeighborhoodBound bound_at(const TheoryConstants& c, BoundKind kind, int k);

/// Total communication error E||x^t_k - Z^t y_k||^2 in one iteration.
double comm_error_bound_q1(const TheoryConstants& c);
double comm_error_bound_q2(const TheoryConstants& c, int t);

/// Logged-only bounds on the iterates (Q1 or Q2 consensus), for a given t.
struct IterateBounds {
  double y_norm_sq = 0.0;    // E||y_k||^2
  double x_norm_sq = 0.0;    // E||x_k||^2
  double x_disagree = 0.0;   // E||x_k - M x_k||^2
  double y_disagree = 0.0;   // E||y_k - M y_k||^2
  double local_x = 0.0;      // E||x_{i,k} - x*||^2
  double local_y = 0.0;      // E||y_{i,k} - x*||^2
};
IterateBounds iterate_bounds(const TheoryConstants& c, Variant variant, int k);

/// Metrics of one iterate block against the ground truth.
struct Metrics {
  double err_sq = 0.0;          // ||xbar - x*||^2
  double fval_rel_err = 0.0;    // (f(xbar) - f*) / |f*|
  double consensus_viol = 0.0;  // ||x - M x||^2
  double fval = 0.0;            // f(xbar)
};
Metrics measure(const NodeBlock& x, const Objective& obj, const GroundTruth& gt);

double welford_update(double mean, long long k, double value);
/// |(f_k - f_{k-1}) / f_{k-1}| < eps, absolute change when f_{k-1} = 0.
bool should_terminate(double mean_k, double mean_prev, double eps);

double cost(long long communications, long long computations, double c_c, double c_g);

struct TraceRow {
  int k = 0;
  double err_sq = 0.0;
  double fval_rel_err = 0.0;
  double consensus_viol = 0.0;
  long long comm_count = 0;
  long long comp_count = 0;
  double welford_mean = 0.0;
};

enum class TraceStatus { converged, max_iters, diverged };
std::string to_string(TraceStatus s);

struct RunTrace {
  std::vector<TraceRow> rows;
  TraceStatus status = TraceStatus::max_iters;
  int termination_k = -1;  // first k meeting the Welford test, -1 if never
};

enum class Metric { err_sq, fval_rel_err, consensus_viol };
Metric parse_metric(const std::string& s);
double metric_of(const TraceRow& row, Metric m);

/// Mean of the metric over the last `tail` rows; +inf for a diverged trace.
double steady_state_error(const RunTrace& trace, int tail, Metric m = Metric::err_sq);

/// Observer that records one row per iteration. With eps > 0 the first k
/// passing the Welford test is recorded, and the run stops there when
/// stop_on_termination is set.
class TraceRecorder final : public RunObserver {
 public:
  TraceRecorder(const Objective& obj, const GroundTruth& gt, double eps = 0.0,
                bool stop_on_termination = false);

  void on_start(const AlgoState& st, const Vec& x_bar) override;
  bool on_step(const AlgoState& st, const StepReport& rep) override;

  /// Moves the trace out and stamps the terminal status.
  RunTrace finish(RunStatus status);

 private:
  TraceRow row_for(const AlgoState& st);

  const Objective& obj_;
  const GroundTruth& gt_;
  double eps_;
  bool stop_;
  double mean_ = 0.0;
  RunTrace trace_;
};

void write_trace_csv(std::ostream& os, const RunTrace& trace);
extern const char* const kTraceHeader;

/// key = value lines.
void write_bounds_text(std::ostream& os, const TheoryConstants& c,
                       const std::vector<NeighborhoodBound>& bounds);

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double median_of_means = 0.0;
};
/// Median of means uses min(count, 5) groups.
SampleSummary summarize(std::vector<double> values);
double median(std::vector<double> values);

}  // namespace snear

#endif  // SNEAR_ANALYSIS_HPP
