// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include "snear/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "snear/error.hpp"

namespace snear {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

KeyValues parse_key_values(std::istream& is) {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::config, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) fail(ErrorCode::config, "line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValues parse_key_values_text(const std::string& text) {
  std::istringstream is(text);
  return parse_key_values(is);
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open config '" + path + "'");
  return parse_key_values(in);
}

std::string format_key_values(const KeyValues& kv) {
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
  return os.str();
}

std::string to_string(TracePolicy p) {
  switch (p) {
    case TracePolicy::all: return "all";
    case TracePolicy::first: return "first";
    case TracePolicy::none: return "none";
  }
  return "?";
}

namespace {

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  /// Marks a key as known without reading it.
  void touch(const std::string& key) { used_.insert(key); }

  std::string str(const std::string& key, const std::string& def) {
    used_.insert(key);
    auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
  }

  double num(const std::string& key, double def) {
    if (!has(key)) { used_.insert(key); return def; }
    return to_double(key, str(key, ""));
  }

  long long integer(const std::string& key, long long def) {
    if (!has(key)) { used_.insert(key); return def; }
    const std::string v = str(key, "");
    errno = 0;
    char* end = nullptr;
    const long long out = std::strtoll(v.c_str(), &end, 10);
    if (errno != 0 || end == v.c_str() || *end != '\0') {
      // Accept integral values written in floating notation, e.g. 2e4.
      const double d = to_double(key, v);
      if (d != static_cast<double>(static_cast<long long>(d)))
        fail(ErrorCode::config, key + ": expected an integer, got '" + v + "'");
      return static_cast<long long>(d);
    }
    return out;
  }

  bool flag(const std::string& key, bool def) {
    if (!has(key)) { used_.insert(key); return def; }
    const std::string v = str(key, "");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorCode::config, key + ": expected a boolean, got '" + v + "'");
  }

  std::vector<std::string> list(const std::string& key) { return split(str(key, ""), ','); }

  void check_unused() const {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) fail(ErrorCode::config, "unknown config key '" + k + "'");
  }

  static double to_double(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (errno != 0 || end == v.c_str() || *end != '\0')
      fail(ErrorCode::config, key + ": expected a number, got '" + v + "'");
    return d;
  }

 private:
  const KeyValues& kv_;
  std::set<std::string> used_;
};

int positive_int(Reader& r, const std::string& key, long long def) {
  const long long v = r.integer(key, def);
  if (v < 1 || v > 1000000000) fail(ErrorCode::config, key + " must be a positive integer");
  return static_cast<int>(v);
}

CommOperator read_comm(Reader& r, const std::string& prefix, const CommOperator& def) {
  const std::string kind = r.str(prefix + "comm.kind", to_string(def.kind));
  r.touch(prefix + "comm.delta");
  r.touch(prefix + "comm.sigma_c");
  if (kind == "exact") return CommOperator::exact();
  if (kind == "quantizer")
    return CommOperator::quantizer(positive_int(r, prefix + "comm.delta", def.delta));
  if (kind == "gaussian") return CommOperator::gaussian(r.num(prefix + "comm.sigma_c", def.sigma_c));
  fail(ErrorCode::config, prefix + "comm.kind: unknown channel '" + kind + "'");
}

GradOperator read_grad(Reader& r, const std::string& prefix, const GradOperator& def) {
  const std::string kind = r.str(prefix + "grad.kind", to_string(def.kind));
  r.touch(prefix + "grad.sigma_g");
  r.touch(prefix + "grad.batch");
  GradOperator g;
  if (kind == "exact") {
    g = GradOperator::exact();
  } else if (kind == "gaussian") {
    g = GradOperator::gaussian(r.num(prefix + "grad.sigma_g", def.sigma_g));
  } else if (kind == "minibatch") {
    g = GradOperator::minibatch(positive_int(r, prefix + "grad.batch", def.batch));
  } else {
    fail(ErrorCode::config, prefix + "grad.kind: unknown oracle '" + kind + "'");
  }
  g.sigma_g_sq_bound = r.num(prefix + "grad.sigma_g_sq", def.sigma_g_sq_bound);
  return g;
}

}  // namespace

namespace {

ExperimentConfig resolve(const KeyValues& kv) {
  Reader r(kv);
  ExperimentConfig cfg;
  cfg.name = r.str("name", cfg.name);
  cfg.output_dir = r.str("output.dir", cfg.output_dir);
  {
    const std::string t = r.str("output.traces", "all");
    if (t == "all") cfg.traces = TracePolicy::all;
    else if (t == "first") cfg.traces = TracePolicy::first;
    else if (t == "none") cfg.traces = TracePolicy::none;
    else fail(ErrorCode::config, "output.traces must be all, first or none");
  }

  ObjectiveSpec& o = cfg.objective;
  const std::string okind = r.str("objective.kind", "quadratic");
  if (okind == "quadratic") o.kind = ObjectiveSpec::Kind::quadratic;
  else if (okind == "logistic") o.kind = ObjectiveSpec::Kind::logistic;
  else fail(ErrorCode::config, "objective.kind must be quadratic or logistic");
  o.p = positive_int(r, "objective.p", o.p);
  o.quadratic.mu = r.num("objective.mu", o.quadratic.mu);
  o.quadratic.L = r.num("objective.L", o.quadratic.L);
  o.quadratic.b_scale = r.num("objective.b_scale", o.quadratic.b_scale);
  o.quadratic.identical = r.flag("objective.identical", false);
  o.quadratic.shared_minimizer = r.flag("objective.shared_minimizer", false);
  o.seed = static_cast<std::uint64_t>(r.integer("objective.seed", 1));
  o.data_path = r.str("data.path", "");
  o.label_map = r.str("data.label_map", "");
  o.samples = positive_int(r, "data.samples", o.samples);
  o.dim = positive_int(r, "data.dim", o.dim);

  GraphSpec& g = cfg.graph;
  g.kind = parse_graph_kind(r.str("graph.kind", "ring"));
  g.n = positive_int(r, "graph.n", 5);
  g.k = positive_int(r, "graph.k", g.k);
  g.p_edge = r.num("graph.p_edge", g.p_edge);
  g.seed = static_cast<std::uint64_t>(r.integer("graph.seed", 1));
  g.max_retries = positive_int(r, "graph.max_retries", g.max_retries);

  if (r.has("seeds")) {
    for (const auto& s : r.list("seeds")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
      if (end == s.c_str() || *end != '\0') fail(ErrorCode::config, "seeds: bad entry '" + s + "'");
      cfg.seeds.push_back(v);
    }
    r.touch("seeds.count");
    r.touch("seeds.base");
  } else {
    const int count = positive_int(r, "seeds.count", 30);
    const long long base = r.integer("seeds.base", 1);
    for (int i = 0; i < count; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(base + i));
  }
  if (cfg.seeds.empty()) fail(ErrorCode::config, "seed list is empty");

  cfg.epsilon = r.num("termination.epsilon", 0.0);
  if (cfg.epsilon < 0.0) fail(ErrorCode::config, "termination.epsilon must be nonnegative");
  cfg.stop_on_termination = r.flag("termination.stop", false);
  {
    const long long mi = r.integer("termination.max_iters", cfg.max_iters);
    if (mi < 0) fail(ErrorCode::config, "termination.max_iters must be nonnegative");
    cfg.max_iters = static_cast<int>(mi);
  }
  cfg.tail = positive_int(r, "metrics.tail", cfg.tail);
  if (r.has("cost.prices")) {
    cfg.prices.clear();
    for (const auto& item : r.list("cost.prices")) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) fail(ErrorCode::config, "cost.prices entries look like c_c:c_g");
      const double cc = Reader::to_double("cost.prices", parts[0]);
      const double cg = Reader::to_double("cost.prices", parts[1]);
      if (cc < 0 || cg < 0) fail(ErrorCode::config, "cost.prices must be nonnegative");
      cfg.prices.emplace_back(cc, cg);
    }
  }
  {
    const std::string ik = r.str("init.kind", "zero");
    if (ik == "zero") cfg.init.init = InitKind::zero;
    else if (ik == "gaussian") cfg.init.init = InitKind::gaussian;
    else fail(ErrorCode::config, "init.kind must be zero or gaussian");
    cfg.init.init_scale = r.num("init.scale", 1.0);
  }
  cfg.variance_draws = positive_int(r, "estimate.draws", cfg.variance_draws);

  AlgoConfig base;
  base.alpha = r.num("alpha", base.alpha);
  base.variant = parse_variant(r.str("variant", "Q1"));
  base.divergence_threshold = r.num("divergence.threshold", base.divergence_threshold);
  base.max_iters = cfg.max_iters;
  base.comm = read_comm(r, "", CommOperator::exact());
  base.grad = read_grad(r, "", GradOperator::exact());

  std::vector<std::string> names = r.list("methods");
  if (names.empty()) names.push_back("snear");
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) fail(ErrorCode::config, "duplicate method '" + name + "'");
    const std::string pre = "method." + name + ".";
    MethodSpec m;
    m.name = name;
    m.algo = base;
    m.algo.method = parse_method(r.str(pre + "algo", "snear_dgd"));
    const std::string sched = r.str(pre + "schedule", "constant");
    if (sched == "constant") m.algo.schedule.increasing = false;
    else if (sched == "increasing") m.algo.schedule.increasing = true;
    else fail(ErrorCode::config, pre + "schedule must be constant or increasing");
    m.algo.schedule.t = positive_int(r, pre + "t", 1);
    m.algo.variant = parse_variant(r.str(pre + "variant", to_string(base.variant)));
    m.algo.alpha = r.num(pre + "alpha", base.alpha);
    m.algo.comm = read_comm(r, pre, base.comm);
    m.algo.grad = read_grad(r, pre, base.grad);
    try {
      m.algo.validate();
    } catch (const Error& e) {
      fail(ErrorCode::config, pre + ": " + e.what());
    }
    cfg.methods.push_back(std::move(m));
  }

  for (const auto& k : r.list("sweep.kinds")) cfg.sweep.kinds.push_back(parse_graph_kind(k));
  auto ints = [&r](const std::string& key) {
    std::vector<int> out;
    for (const auto& v : r.list(key)) {
      const double d = Reader::to_double(key, v);
      if (d < 1 || d != static_cast<int>(d)) fail(ErrorCode::config, key + ": bad entry '" + v + "'");
      out.push_back(static_cast<int>(d));
    }
    return out;
  };
  cfg.sweep.sizes = ints("sweep.n");
  cfg.sweep.rounds = ints("sweep.t");
  cfg.sweep.deltas = ints("sweep.delta");

  r.check_unused();
  return cfg;
}

}  // namespace

ExperimentConfig resolve_config(const KeyValues& kv) {
  try {
    return resolve(kv);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parameter) fail(ErrorCode::config, e.what());
    throw;
  }
}

}  // namespace snear
