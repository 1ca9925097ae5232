// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include "snear/presets.hpp"

#include "snear/error.hpp"

namespace snear {

namespace {

// Logistic problem shared by the network experiments: synthetic data unless
// data.path is set.
const char* const kLogistic = R"(
objective.kind = logistic
objective.seed = 1
data.samples = 500
data.dim = 20
grad.kind = minibatch
grad.batch = 16
comm.kind = quantizer
init.kind = zero
)";

const char* const kQuick = R"(
name = quick
objective.kind = quadratic
objective.p = 4
objective.mu = 1
objective.L = 10
objective.seed = 7
graph.kind = ring
graph.n = 5
seeds.count = 3
termination.max_iters = 200
metrics.tail = 50
alpha = 0.1
comm.kind = gaussian
comm.sigma_c = 0.01
grad.kind = gaussian
grad.sigma_g = 0.01
methods = snear_t1,snear_t5,snear_plus,dgd
method.snear_t1.t = 1
method.snear_t5.t = 5
method.snear_plus.schedule = increasing
method.dgd.algo = dgd
)";

std::string fig1(int delta) {
  std::string s = std::string(kLogistic) + R"(
graph.kind = erdos_renyi
graph.n = 14
graph.p_edge = 0.5
graph.seed = 1
seeds.count = 30
termination.max_iters = 20000
metrics.tail = 1000
output.traces = first
alpha = 2.2
)";
  s += "comm.delta = " + std::to_string(delta) + "\n";
  s += "name = " + std::string(delta <= 10 ? "fig1_coarse" : "fig1_fine") + "\n";
  std::string methods;
  for (const char* v : {"Q1", "Q2", "Q3"}) {
    const std::string sv(v);
    for (const char* m : {"snear_t2", "snear_t5", "dgd", "extra", "diging"}) {
      const std::string name = std::string(m) + "_" + sv;
      methods += (methods.empty() ? "" : ",") + name;
      const std::string pre = "method." + name + ".";
      s += pre + "variant = " + sv + "\n";
      if (name.rfind("snear_t2", 0) == 0) s += pre + "t = 2\n";
      else if (name.rfind("snear_t5", 0) == 0) s += pre + "t = 5\n";
      else s += pre + "algo = " + std::string(m) + "\n";
    }
  }
  s += "methods = " + methods + "\n";
  return s;
}

const char* const kScaling = R"(
name = scaling
graph.kind = ring
graph.n = 5
graph.p_edge = 0.4
graph.k = 4
graph.seed = 1
sweep.kinds = complete,erdos_renyi,k_cyclic,ring,path
sweep.n = 5,10,15,20,25
sweep.t = 1,7
comm.delta = 100
alpha = 1
seeds.count = 30
termination.epsilon = 1e-5
termination.max_iters = 20000
metrics.tail = 1000
cost.prices = 1:1,0.01:1
output.traces = first
methods = snear
method.snear.variant = Q1
)";

}  // namespace

std::vector<PresetInfo> preset_list() {
  return {
      {"quick", "5-node ring, random quadratic, gaussian channels; seconds to run"},
      {"fig1_coarse", "all methods x Q1/Q2/Q3 on a 14-node random network, delta = 10"},
      {"fig1_fine", "all methods x Q1/Q2/Q3 on a 14-node random network, delta = 1e5"},
      {"scaling", "5 network types x n in 5..25 x t in {1, 7}, delta = 100, Welford eps = 1e-5"},
  };
}

KeyValues preset(const std::string& name) {
  if (name == "quick") return parse_key_values_text(kQuick);
  if (name == "fig1_coarse") return parse_key_values_text(fig1(10));
  if (name == "fig1_fine") return parse_key_values_text(fig1(100000));
  if (name == "scaling") return parse_key_values_text(std::string(kLogistic) + kScaling);
  fail(ErrorCode::config, "unknown preset '" + name + "'");
}

}  // namespace snear
