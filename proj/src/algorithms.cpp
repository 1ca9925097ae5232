// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include "snear/algorithms.hpp"

#include <cmath>
#include <sstream>

#include "snear/error.hpp"

namespace snear {

std::string to_string(Method m) {
  switch (m) {
    case Method::snear_dgd: return "snear_dgd";
    case Method::dgd: return "dgd";
    case Method::extra: return "extra";
    case Method::diging: return "diging";
  }
  return "?";
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Q1: return "Q1";
    case Variant::Q2: return "Q2";
    case Variant::Q3: return "Q3";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "snear_dgd" || s == "snear" || s == "near_dgd") return Method::snear_dgd;
  if (s == "dgd") return Method::dgd;
  if (s == "extra") return Method::extra;
  if (s == "diging") return Method::diging;
  fail(ErrorCode::config, "unknown method '" + s + "'");
}

Variant parse_variant(const std::string& s) {
  if (s == "Q1" || s == "q1" || s == "1") return Variant::Q1;
  if (s == "Q2" || s == "q2" || s == "2") return Variant::Q2;
  if (s == "Q3" || s == "q3" || s == "3") return Variant::Q3;
  fail(ErrorCode::config, "unknown consensus variant '" + s + "'");
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::max_iters: return "max_iters";
    case RunStatus::stopped: return "converged";
    case RunStatus::diverged: return "diverged";
  }
  return "?";
}

void AlgoConfig::validate() const {
  if (!(alpha > 0.0)) fail(ErrorCode::parameter, "alpha must be positive");
  if (!schedule.increasing && schedule.t < 1)
    fail(ErrorCode::parameter, "constant schedule needs t >= 1");
  if (max_iters < 0) fail(ErrorCode::parameter, "max_iters must be nonnegative");
  if (!(divergence_threshold > 0.0))
    fail(ErrorCode::parameter, "divergence threshold must be positive");
}

double steplength_limit(const ConvexityConstants& c) {
  return std::min(2.0 / (c.mu + c.L), 2.0 / (c.mu_bar + c.L_bar));
}

std::optional<std::string> steplength_warning(const AlgoConfig& cfg,
                                              const ConvexityConstants& c) {
  const double limit = steplength_limit(c);
  if (cfg.alpha < limit) return std::nullopt;
  std::ostringstream os;
  os << "alpha=" << cfg.alpha << " violates alpha < min{2/(mu+L), 2/(mu_bar+L_bar)} = "
     << limit << "; theoretical bounds do not apply";
  return os.str();
}

void consensus_round(Variant variant, NodeBlock& x, const ConsensusMatrix& w,
                     const CommOperator& comm, std::uint64_t seed, int k, int round,
                     long long* communications) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  NodeBlock q(n, p);
  for (int i = 0; i < n; ++i) {
    RngStream rng(seed, StreamKey{Purpose::comm, static_cast<std::uint64_t>(i),
                                  static_cast<std::uint64_t>(k),
                                  static_cast<std::uint64_t>(round)});
    comm.apply_into(x.row(i).data(), q.row(i).data(), p, rng);
  }
  NodeBlock out(n, p);
  for (int i = 0; i < n; ++i) {
    const double wii = w(i, i);
    const auto& support = w.support(i);
    for (int c = 0; c < p; ++c) {
      double acc = wii * (variant == Variant::Q3 ? x(i, c) : q(i, c));
      for (int l : support) acc += w(i, l) * q(l, c);
      if (variant == Variant::Q1) acc += x(i, c) - q(i, c);
      out(i, c) = acc;
    }
  }
  x.swap(out);
  if (communications) ++*communications;
}

NodeBlock gradient_block(const Objective& obj, const GradOperator& op, const NodeBlock& x,
                         std::uint64_t seed, int k) {
  NodeBlock g(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    RngStream rng(seed, StreamKey{Purpose::grad, static_cast<std::uint64_t>(i),
                                  static_cast<std::uint64_t>(k), 0});
    g.row(i) = op.apply(obj, i, x.row(i).transpose(), rng).transpose();
  }
  return g;
}

AlgoState initial_state(const AlgoConfig& cfg, const Objective& obj, const NodeBlock& y0,
                        std::uint64_t seed) {
  if (y0.rows() != obj.nodes() || y0.cols() != obj.dim())
    fail(ErrorCode::parameter, "initial point has the wrong shape");
  AlgoState st;
  st.x = y0;
  st.y = y0;
  if (cfg.method == Method::diging) {
    st.g_prev = gradient_block(obj, cfg.grad, st.x, seed, 0);
    st.s = st.g_prev;
    st.computations = 1;
  }
  return st;
}

namespace {

bool blew_up(const NodeBlock& x, double threshold) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    if (!std::isfinite(v) || std::abs(v) > threshold) return true;
  }
  return false;
}

StepReport finish(AlgoState& st, const AlgoConfig& cfg) {
  if (blew_up(st.x, cfg.divergence_threshold) ||
      (st.s.size() > 0 && blew_up(st.s, cfg.divergence_threshold)))
    st.diverged = true;
  return StepReport{st.k, st.average(), st.diverged};
}

template <class Body>
StepReport guarded(AlgoState& st, const AlgoConfig& cfg, Body body) {
  if (st.diverged) return StepReport{st.k, st.average(), true};
  ++st.k;
  try {
    body();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::numeric) throw;
    st.diverged = true;
    return StepReport{st.k, st.average(), true};
  }
  return finish(st, cfg);
}

}  // namespace

StepReport snear_dgd_step(AlgoState& st, const AlgoConfig& cfg, const ConsensusMatrix& w,
                          const Objective& obj, std::uint64_t seed) {
  return guarded(st, cfg, [&] {
    const int k = st.k;
    NodeBlock g = gradient_block(obj, cfg.grad, st.x, seed, k);
    ++st.computations;
    st.y = st.x - cfg.alpha * g;
    st.x = st.y;
    const int rounds = cfg.schedule.rounds(k);
    for (int j = 1; j <= rounds; ++j)
      consensus_round(cfg.variant, st.x, w, cfg.comm, seed, k, j, &st.communications);
  });
}

StepReport dgd_step(AlgoState& st, const AlgoConfig& cfg, const ConsensusMatrix& w,
                    const Objective& obj, std::uint64_t seed) {
  return guarded(st, cfg, [&] {
    const int k = st.k;
    NodeBlock g = gradient_block(obj, cfg.grad, st.x, seed, k);
    ++st.computations;
    consensus_round(cfg.variant, st.x, w, cfg.comm, seed, k, 1, &st.communications);
    st.x -= cfg.alpha * g;
    st.y = st.x;
  });
}

// x_{k+1} = x_k + C(x_k) - (x_{k-1} + C(x_{k-1}))/2 - alpha (g_k - g_{k-1}),
// with C the configured consensus round; C(x_{k-1}) is reused from the
// previous iteration so each iteration exchanges one vector.
StepReport extra_step(AlgoState& st, const AlgoConfig& cfg, const ConsensusMatrix& w,
                      const Objective& obj, std::uint64_t seed) {
  return guarded(st, cfg, [&] {
    const int k = st.k;
    NodeBlock mix = st.x;
    consensus_round(cfg.variant, mix, w, cfg.comm, seed, k, 1, &st.communications);
    NodeBlock g = gradient_block(obj, cfg.grad, st.x, seed, k);
    ++st.computations;
    NodeBlock next;
    if (k == 1) {
      next = mix - cfg.alpha * g;
    } else {
      next = st.x + mix - 0.5 * (st.x_prev + st.mix_prev) - cfg.alpha * (g - st.g_prev);
    }
    st.x_prev = std::move(st.x);
    st.mix_prev = std::move(mix);
    st.g_prev = std::move(g);
    st.x = std::move(next);
    st.y = st.x;
  });
}

// x_{k+1} = C(x_k) - alpha s_k;  s_{k+1} = C(s_k) + g_{k+1} - g_k;  s_0 = g_0.
StepReport diging_step(AlgoState& st, const AlgoConfig& cfg, const ConsensusMatrix& w,
                       const Objective& obj, std::uint64_t seed) {
  return guarded(st, cfg, [&] {
    const int k = st.k;
    consensus_round(cfg.variant, st.x, w, cfg.comm, seed, k, 1, &st.communications);
    st.x -= cfg.alpha * st.s;
    st.y = st.x;
    NodeBlock g = gradient_block(obj, cfg.grad, st.x, seed, k);
    ++st.computations;
    consensus_round(cfg.variant, st.s, w, cfg.comm, seed, k, 2, &st.communications);
    st.s += g - st.g_prev;
    st.g_prev = std::move(g);
  });
}

StepReport step(AlgoState& st, const AlgoConfig& cfg, const ConsensusMatrix& w,
                const Objective& obj, std::uint64_t seed) {
  switch (cfg.method) {
    case Method::snear_dgd: return snear_dgd_step(st, cfg, w, obj, seed);
    case Method::dgd: return dgd_step(st, cfg, w, obj, seed);
    case Method::extra: return extra_step(st, cfg, w, obj, seed);
    case Method::diging: return diging_step(st, cfg, w, obj, seed);
  }
  fail(ErrorCode::parameter, "unknown method");
}

NodeBlock initial_point(const RunOptions& opts, int n, int p, std::uint64_t seed) {
  NodeBlock y0 = NodeBlock::Zero(n, p);
  if (opts.init == InitKind::gaussian) {
    for (int i = 0; i < n; ++i) {
      RngStream rng(seed, StreamKey{Purpose::init, static_cast<std::uint64_t>(i), 0, 0});
      for (int c = 0; c < p; ++c) y0(i, c) = opts.init_scale * rng.normal();
    }
  }
  return y0;
}

RunResult run(const AlgoConfig& cfg, const ConsensusMatrix& w, const Objective& obj,
              std::uint64_t seed, const RunOptions& opts, RunObserver* observer) {
  cfg.validate();
  if (w.nodes() != obj.nodes())
    fail(ErrorCode::parameter, "consensus matrix and objective disagree on node count");
  RunResult result;
  result.final_state =
      initial_state(cfg, obj, initial_point(opts, obj.nodes(), obj.dim(), seed), seed);
  AlgoState& st = result.final_state;
  if (observer) observer->on_start(st, st.average());
  for (int k = 1; k <= cfg.max_iters; ++k) {
    StepReport rep = step(st, cfg, w, obj, seed);
    result.iterations = st.k;
    const bool stop = observer && observer->on_step(st, rep);
    if (rep.diverged) {
      result.status = RunStatus::diverged;
      return result;
    }
    if (stop) {
      result.status = RunStatus::stopped;
      return result;
    }
  }
  result.status = RunStatus::max_iters;
  return result;
}

}  // namespace snear
