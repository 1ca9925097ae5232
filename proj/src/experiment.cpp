// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include "snear/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "snear/error.hpp"

namespace fs = std::filesystem;

namespace snear {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::run: return "run";
    case Mode::sweep: return "sweep";
    case Mode::compare: return "compare";
    case Mode::bounds: return "bounds";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  if (s == "run") return Mode::run;
  if (s == "sweep") return Mode::sweep;
  if (s == "compare") return Mode::compare;
  if (s == "bounds") return Mode::bounds;
  fail(ErrorCode::config, "unknown mode '" + s + "'");
}

int worker_count() {
  if (const char* env = std::getenv("SNEAR_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min(v, 256L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::shared_ptr<const Objective> build_objective(const ObjectiveSpec& spec, int n) {
  if (spec.kind == ObjectiveSpec::Kind::quadratic)
    return make_quadratic(n, spec.p, spec.quadratic, spec.seed);
  std::shared_ptr<Dataset> data;
  if (!spec.data_path.empty()) {
    data = std::make_shared<Dataset>(load_libsvm(spec.data_path, parse_label_map(spec.label_map)));
  } else {
    data = std::make_shared<Dataset>(make_synthetic_dataset(spec.samples, spec.dim, spec.seed));
  }
  return make_logistic(std::move(data), n, spec.seed);
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

GroundTruth cached_truth(const Objective& obj, const std::string& cache_dir) {
  if (cache_dir.empty()) return solve_centralized(obj);
  char name[64];
  std::snprintf(name, sizeof name, "truth_%016llx.txt",
                static_cast<unsigned long long>(fnv1a(obj.fingerprint())));
  const fs::path path = fs::path(cache_dir) / name;
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      GroundTruth gt = read_ground_truth(in);
      if (gt.x_star.size() == obj.dim() && static_cast<int>(gt.u_star.size()) == obj.nodes())
        return gt;
    } catch (const Error&) {
      // Unreadable cache entries are recomputed.
    }
  }
  GroundTruth gt = solve_centralized(obj);
  std::error_code ec;
  fs::create_directories(cache_dir, ec);
  const fs::path tmp = path.string() + ".tmp" + std::to_string(fnv1a(path.string()) & 0xffff);
  {
    std::ofstream out(tmp);
    if (out) write_ground_truth(out, gt);
  }
  fs::rename(tmp, path, ec);
  return gt;
}

}  // namespace

Problem build_problem(const ObjectiveSpec& ospec, const GraphSpec& gspec,
                      const std::string& cache_dir) {
  Graph g = build_graph(gspec);
  ConsensusMatrix w = metropolis_weights(g);
  auto obj = build_objective(ospec, gspec.n);
  GroundTruth gt = cached_truth(*obj, cache_dir);
  return Problem{gspec, std::move(g), std::move(w), std::move(obj), std::move(gt)};
}

RunTrace run_trace(const Problem& problem, const AlgoConfig& algo, std::uint64_t seed,
                   const RunOptions& init, double epsilon, bool stop_on_termination) {
  TraceRecorder rec(*problem.objective, problem.truth, epsilon, stop_on_termination);
  RunResult r = run(algo, problem.weights, *problem.objective, seed, init, &rec);
  return rec.finish(r.status);
}

namespace {

struct Cell {
  CellReport report;
  const Problem* problem = nullptr;
};

std::vector<NeighborhoodBound> method_bounds(const TheoryConstants& c, const AlgoConfig& a) {
  std::vector<NeighborhoodBound> out;
  if (a.method != Method::snear_dgd || a.variant == Variant::Q3) return out;
  const int k = std::max(1, a.max_iters);
  if (a.variant == Variant::Q1) {
    if (a.schedule.increasing) {
      out.push_back(bound_limit(c, BoundKind::plus_Q1));
      out.push_back(bound_at(c, BoundKind::plus_Q1, k));
    } else {
      out.push_back(bound_limit(c, BoundKind::t_Q1));
      out.push_back(bound_limit(c, BoundKind::plus_Q1));
    }
  } else {
    if (a.schedule.increasing) {
      out.push_back(bound_limit(c, BoundKind::plus_Q2, k));
    } else {
      out.push_back(bound_limit(c, BoundKind::t_Q2));
    }
  }
  return out;
}

std::string cell_label(const CellReport& c, bool swept) {
  if (!swept) return "main";
  std::string s = to_string(c.kind) + "_n" + std::to_string(c.n);
  if (c.t > 0) s += "_t" + std::to_string(c.t);
  if (c.delta > 0) s += "_d" + std::to_string(c.delta);
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, Mode mode) {
  if (cfg.methods.empty()) fail(ErrorCode::config, "no methods configured");
  if (cfg.seeds.empty()) fail(ErrorCode::config, "seed list is empty");
  ExperimentReport report;
  report.config = cfg;
  report.mode = mode;
  const std::string cache_dir = (fs::path(cfg.output_dir) / "cache").string();

  const bool swept = mode == Mode::sweep && !cfg.sweep.empty();
  std::vector<GraphKind> kinds{cfg.graph.kind};
  std::vector<int> sizes{cfg.graph.n}, rounds{0}, deltas{0};
  if (swept) {
    if (!cfg.sweep.kinds.empty()) kinds = cfg.sweep.kinds;
    if (!cfg.sweep.sizes.empty()) sizes = cfg.sweep.sizes;
    if (!cfg.sweep.rounds.empty()) rounds = cfg.sweep.rounds;
    if (!cfg.sweep.deltas.empty()) deltas = cfg.sweep.deltas;
  }

  std::map<std::pair<int, int>, std::unique_ptr<Problem>> problems;
  std::map<std::pair<int, int>, double> variance_cache;  // (problem, batch)
  std::vector<Cell> cells;
  for (GraphKind kind : kinds) {
    for (int n : sizes) {
      GraphSpec gs = cfg.graph;
      gs.kind = kind;
      gs.n = n;
      auto key = std::make_pair(static_cast<int>(kind), n);
      if (!problems.count(key))
        problems[key] = std::make_unique<Problem>(build_problem(cfg.objective, gs, cache_dir));
      const Problem& prob = *problems[key];
      for (int t : rounds) {
        for (int delta : deltas) {
          Cell cell;
          cell.problem = &prob;
          cell.report.kind = kind;
          cell.report.n = n;
          cell.report.t = t;
          cell.report.delta = delta;
          cell.report.beta = prob.weights.beta();
          cell.report.label = cell_label(cell.report, swept);
          const NodeBlock y0 =
              initial_point(cfg.init, n, prob.objective->dim(), cfg.seeds.front());
          for (const auto& m : cfg.methods) {
            MethodReport mr;
            mr.name = m.name;
            mr.algo = m.algo;
            mr.algo.max_iters = cfg.max_iters;
            if (t > 0 && mr.algo.method == Method::snear_dgd && !mr.algo.schedule.increasing)
              mr.algo.schedule.t = t;
            if (delta > 0 && mr.algo.comm.kind == CommOperator::Kind::quantizer)
              mr.algo.comm.delta = delta;
            if (mr.algo.grad.kind == GradOperator::Kind::minibatch &&
                mr.algo.grad.sigma_g_sq_bound <= 0.0) {
              auto vkey = std::make_pair(static_cast<int>(kind) * 100000 + n, mr.algo.grad.batch);
              if (!variance_cache.count(vkey))
                variance_cache[vkey] = estimate_minibatch_variance(
                    *prob.objective, mr.algo.grad, Vec::Zero(prob.objective->dim()),
                    cfg.variance_draws, cfg.objective.seed);
              mr.algo.grad.sigma_g_sq_bound = variance_cache[vkey];
            }
            if (auto w = steplength_warning(mr.algo, prob.objective->constants()))
              report.warnings.push_back(cell.report.label + "/" + m.name + ": " + *w);
            mr.constants = compute_constants(*prob.objective, prob.weights, prob.truth, y0,
                                             theory_inputs(mr.algo, prob.objective->dim()));
            mr.bounds = method_bounds(mr.constants, mr.algo);
            cell.report.methods.push_back(std::move(mr));
          }
          cells.push_back(std::move(cell));
        }
      }
    }
  }

  if (mode != Mode::bounds) {
    struct Job {
      std::size_t cell, method, seed;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < cells.size(); ++c)
      for (std::size_t m = 0; m < cells[c].report.methods.size(); ++m) {
        cells[c].report.methods[m].runs.resize(cfg.seeds.size());
        if (mode != Mode::sweep) cells[c].report.methods[m].err_series.resize(cfg.seeds.size());
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) jobs.push_back({c, m, s});
      }

    auto trace_path = [&](const Job& j) -> std::string {
      const bool keep = cfg.traces == TracePolicy::all ||
                        (cfg.traces == TracePolicy::first && j.seed == 0);
      if (!keep) return {};
      const fs::path dir = fs::path(cfg.output_dir) / "traces" / cells[j.cell].report.label /
                           cells[j.cell].report.methods[j.method].name;
      return (dir / ("seed_" + std::to_string(cfg.seeds[j.seed]) + ".csv")).string();
    };
    for (const auto& j : jobs) {
      const std::string p = trace_path(j);
      if (!p.empty()) fs::create_directories(fs::path(p).parent_path());
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
      for (;;) {
        const std::size_t idx = next.fetch_add(1);
        if (idx >= jobs.size()) return;
        const Job& j = jobs[idx];
        try {
          MethodReport& mr = cells[j.cell].report.methods[j.method];
          const Problem& prob = *cells[j.cell].problem;
          const RunTrace tr = run_trace(prob, mr.algo, cfg.seeds[j.seed], cfg.init, cfg.epsilon,
                                        cfg.stop_on_termination);
          RunSummary s;
          s.seed = cfg.seeds[j.seed];
          s.status = tr.status;
          s.iterations = tr.rows.back().k;
          s.termination_k = tr.termination_k;
          const int tail = std::min<int>(cfg.tail, static_cast<int>(tr.rows.size()));
          s.steady_err = steady_state_error(tr, tail, Metric::err_sq);
          s.steady_fval = steady_state_error(tr, tail, Metric::fval_rel_err);
          const TraceRow& at = tr.termination_k >= 0 ? tr.rows[tr.termination_k] : tr.rows.back();
          s.communications = at.comm_count;
          s.computations = at.comp_count;
          for (const auto& [cc, cg] : cfg.prices)
            s.costs.push_back(cost(s.communications, s.computations, cc, cg));
          s.trace_path = trace_path(j);
          if (!s.trace_path.empty()) {
            std::ofstream out(s.trace_path, std::ios::binary);
            if (!out) fail(ErrorCode::io, "cannot write " + s.trace_path);
            write_trace_csv(out, tr);
          }
          if (!mr.err_series.empty()) {
            std::vector<double>& series = mr.err_series[j.seed];
            series.reserve(tr.rows.size());
            for (const auto& row : tr.rows) series.push_back(row.err_sq);
          }
          mr.runs[j.seed] = std::move(s);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
          next.store(jobs.size());
        }
      }
    };
    const int workers = std::max(1, std::min<int>(worker_count(), static_cast<int>(jobs.size())));
    if (workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (auto& cell : cells) {
      for (auto& mr : cell.report.methods) {
        std::vector<double> errs, fvals, steps;
        std::vector<std::vector<double>> costs(cfg.prices.size());
        for (const auto& r : mr.runs) {
          errs.push_back(r.steady_err);
          fvals.push_back(r.steady_fval);
          steps.push_back(r.termination_k >= 0 ? r.termination_k : r.iterations);
          if (r.status == TraceStatus::diverged) ++mr.diverged;
          for (std::size_t p = 0; p < r.costs.size(); ++p) costs[p].push_back(r.costs[p]);
        }
        mr.steady_err = summarize(errs);
        mr.steady_fval = summarize(fvals);
        mr.median_steps = median(steps);
        for (auto& c : costs) mr.median_costs.push_back(median(c));
      }
    }
  }

  for (auto& cell : cells) report.cells.push_back(std::move(cell.report));
  return report;
}

void emit_plot_data(const ExperimentReport& report, PlotKind kind, const std::string& path) {
  if (report.cells.empty()) fail(ErrorCode::parameter, "empty report");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  if (kind == PlotKind::error_series) {
    const CellReport& cell = report.cells.front();
    std::size_t len = 0;
    for (const auto& m : cell.methods)
      for (const auto& s : m.err_series) len = std::max(len, s.size());
    if (len == 0) fail(ErrorCode::parameter, "report holds no error series");
    out << "k";
    for (const auto& m : cell.methods) out << ',' << m.name;
    out << '\n';
    for (std::size_t k = 0; k < len; ++k) {
      out << k;
      for (const auto& m : cell.methods) {
        std::vector<double> vals;
        for (std::size_t s = 0; s < m.err_series.size(); ++s) {
          if (k < m.err_series[s].size()) vals.push_back(m.err_series[s][k]);
          else if (m.runs[s].status == TraceStatus::diverged)
            vals.push_back(std::numeric_limits<double>::infinity());
        }
        out << ',' << (vals.empty() ? std::string("nan") : fmt(median(vals)));
      }
      out << '\n';
    }
    return;
  }
  out << "network_type,n,t,method,beta,steady_fval_err,steady_err_sq,steps,diverged";
  for (const auto& [cc, cg] : report.config.prices) out << ",cost_cc" << fmt(cc) << "_cg" << fmt(cg);
  out << '\n';
  for (const auto& cell : report.cells) {
    for (const auto& m : cell.methods) {
      if (m.runs.empty()) fail(ErrorCode::parameter, "report holds no runs");
      const int t = m.algo.schedule.increasing ? 0 : m.algo.schedule.t;
      out << to_string(cell.kind) << ',' << cell.n << ',' << t << ',' << m.name << ','
          << fmt(cell.beta) << ',' << fmt(m.steady_fval.median) << ','
          << fmt(m.steady_err.median) << ',' << fmt(m.median_steps) << ',' << m.diverged;
      for (double c : m.median_costs) out << ',' << fmt(c);
      out << '\n';
    }
  }
}

std::string summary_text(const ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  std::ostringstream os;
  os << "# " << cfg.name << "\n";
  os << "mode = " << to_string(report.mode) << "\n";
  os << "replicates = " << cfg.seeds.size() << "\n";
  os << "max_iters = " << cfg.max_iters << "\ntail = " << cfg.tail
     << "\nepsilon = " << fmt(cfg.epsilon) << "\n";
  for (const auto& w : report.warnings) os << "warning = \"" << w << "\"\n";
  for (const auto& cell : report.cells) {
    os << "\n[" << cell.label << "] network = " << to_string(cell.kind) << " n = " << cell.n
       << " beta = " << fmt(cell.beta) << "\n";
    for (const auto& m : cell.methods) {
      os << "  " << m.name << ": algo = " << to_string(m.algo.method)
         << " variant = " << to_string(m.algo.variant) << " alpha = " << fmt(m.algo.alpha);
      if (m.algo.method == Method::snear_dgd)
        os << " t = " << (m.algo.schedule.increasing ? std::string("k") : std::to_string(m.algo.schedule.t));
      os << " comm = " << to_string(m.algo.comm.kind) << " grad = " << to_string(m.algo.grad.kind)
         << "\n";
      if (!m.runs.empty()) {
        os << "    diverged = " << m.diverged << "/" << m.runs.size() << "\n";
        os << "    steady_err_sq mean = " << fmt(m.steady_err.mean)
           << " median = " << fmt(m.steady_err.median)
           << " median_of_means = " << fmt(m.steady_err.median_of_means) << "\n";
        os << "    steady_fval_err median = " << fmt(m.steady_fval.median) << "\n";
        os << "    steps median = " << fmt(m.median_steps) << "\n";
        for (std::size_t p = 0; p < m.median_costs.size(); ++p)
          os << "    cost(c_c=" << fmt(cfg.prices[p].first) << ", c_g=" << fmt(cfg.prices[p].second)
             << ") median = " << fmt(m.median_costs[p]) << "\n";
      }
      for (const auto& b : m.bounds) {
        os << "    bound " << to_string(b.kind);
        if (b.k > 0) os << "(k=" << b.k << ")";
        os << " = " << fmt(b.value) << (b.vacuous ? " (vacuous)" : "");
        if (!m.runs.empty() && (b.kind == BoundKind::t_Q1 || b.kind == BoundKind::t_Q2 ||
                                (b.kind == BoundKind::plus_Q1 && m.algo.schedule.increasing)))
          os << " empirical_mean = " << fmt(m.steady_err.mean)
             << (m.steady_err.mean <= b.value ? " within" : " exceeds");
        os << "\n";
      }
    }
  }
  return os.str();
}

std::string bounds_text(const ExperimentReport& report) {
  std::ostringstream os;
  for (const auto& cell : report.cells) {
    for (const auto& m : cell.methods) {
      os << "[" << cell.label << "/" << m.name << "]\n";
      write_bounds_text(os, m.constants, m.bounds);
      const IterateBounds ib = iterate_bounds(m.constants,
                                              m.algo.variant == Variant::Q2 ? Variant::Q2 : Variant::Q1,
                                              std::max(1, m.algo.max_iters));
      os << "iterates.y_norm_sq = " << fmt(ib.y_norm_sq) << "\n";
      os << "iterates.x_norm_sq = " << fmt(ib.x_norm_sq) << "\n";
      os << "iterates.x_disagree = " << fmt(ib.x_disagree) << "\n";
      os << "iterates.y_disagree = " << fmt(ib.y_disagree) << "\n";
      os << "iterates.local_x = " << fmt(ib.local_x) << "\n";
      os << "iterates.local_y = " << fmt(ib.local_y) << "\n";
      os << "comm_error.Q1 = " << fmt(comm_error_bound_q1(m.constants)) << "\n";
      os << "comm_error.Q2 = " << fmt(comm_error_bound_q2(m.constants, m.constants.t)) << "\n\n";
    }
  }
  return os.str();
}

void write_report(const ExperimentReport& report) {
  const fs::path dir(report.config.output_dir);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "summary.txt", std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write summary");
    out << summary_text(report);
  }
  {
    std::ofstream out(dir / "bounds.txt", std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write bounds");
    out << bounds_text(report);
  }
  if (report.mode == Mode::run || report.mode == Mode::compare)
    emit_plot_data(report, PlotKind::error_series, (dir / "fig1.csv").string());
  if (report.mode == Mode::sweep)
    emit_plot_data(report, PlotKind::scaling, (dir / "fig2.csv").string());
}

}  // namespace snear
