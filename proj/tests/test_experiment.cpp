// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "snear/error.hpp"
#include "snear/experiment.hpp"
#include "snear/presets.hpp"

namespace fs = std::filesystem;

namespace snear {
namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("snear_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::invariant;
}

TEST(KeyValues, ParseAndFormat) {
  KeyValues kv = parse_key_values_text("# c\n a = 1 \nb.c=x y\n\n");
  EXPECT_EQ(kv.at("a"), "1");
  EXPECT_EQ(kv.at("b.c"), "x y");
  EXPECT_EQ(parse_key_values_text(format_key_values(kv)), kv);
  EXPECT_EQ(code_of([] { parse_key_values_text("novalue\n"); }), ErrorCode::config);
  EXPECT_EQ(code_of([] { parse_key_values_text(" = 3\n"); }), ErrorCode::config);
  EXPECT_EQ(code_of([] { load_key_values("/nonexistent/x.cfg"); }), ErrorCode::io);
}

TEST(Config, Defaults) {
  ExperimentConfig c = resolve_config({});
  EXPECT_EQ(c.seeds.size(), 30u);
  EXPECT_EQ(c.seeds.front(), 1u);
  ASSERT_EQ(c.methods.size(), 1u);
  EXPECT_EQ(c.methods[0].algo.method, Method::snear_dgd);
  EXPECT_EQ(c.graph.kind, GraphKind::ring);
}

TEST(Config, MethodOverridesInheritGlobals) {
  ExperimentConfig c = resolve_config(parse_key_values_text(R"(
alpha = 0.3
comm.kind = quantizer
comm.delta = 7
methods = a,b
method.a.t = 4
method.b.algo = diging
method.b.variant = Q3
method.b.alpha = 0.1
method.b.comm.kind = gaussian
method.b.comm.sigma_c = 0.2
seeds = 5,9
)"));
  ASSERT_EQ(c.methods.size(), 2u);
  const AlgoConfig& a = c.methods[0].algo;
  const AlgoConfig& b = c.methods[1].algo;
  EXPECT_EQ(a.schedule.t, 4);
  EXPECT_EQ(a.alpha, 0.3);
  EXPECT_EQ(a.comm.kind, CommOperator::Kind::quantizer);
  EXPECT_EQ(a.comm.delta, 7);
  EXPECT_EQ(b.method, Method::diging);
  EXPECT_EQ(b.variant, Variant::Q3);
  EXPECT_EQ(b.alpha, 0.1);
  EXPECT_EQ(b.comm.kind, CommOperator::Kind::gaussian);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{5, 9}));
}

TEST(Config, ErrorsAreConfigErrors) {
  for (const char* text : {"graph.nn = 3\n", "graph.n = three\n", "alpha = -1\n",
                           "graph.kind = star\n", "methods = a\nmethod.a.algo = admm\n",
                           "cost.prices = 1\n", "output.traces = some\n", "seeds.count = 0\n"}) {
    EXPECT_EQ(code_of([&] { resolve_config(parse_key_values_text(text)); }), ErrorCode::config)
        << text;
  }
}

TEST(Presets, AllResolve) {
  auto list = preset_list();
  ASSERT_EQ(list.size(), 4u);
  for (const auto& p : list) {
    ExperimentConfig c = resolve_config(preset(p.name));
    EXPECT_EQ(c.name, p.name);
  }
  EXPECT_EQ(resolve_config(preset("fig1_coarse")).methods.size(), 15u);
  EXPECT_EQ(code_of([] { preset("nope"); }), ErrorCode::config);
}

TEST(Presets, Fig1StepSatisfiesTheSteplengthCondition) {
  ExperimentConfig c = resolve_config(preset("fig1_coarse"));
  auto obj = build_objective(c.objective, c.graph.n);
  EXPECT_LT(c.methods[0].algo.alpha, steplength_limit(obj->constants()));
}

TEST(Problem, GroundTruthIsCached) {
  fs::path dir = scratch("cache");
  ObjectiveSpec o;
  o.kind = ObjectiveSpec::Kind::logistic;
  o.samples = 80;
  o.dim = 3;
  GraphSpec g;
  g.n = 4;
  Problem a = build_problem(o, g, dir.string());
  ASSERT_FALSE(fs::is_empty(dir));
  Problem b = build_problem(o, g, dir.string());
  EXPECT_EQ(a.truth.x_star, b.truth.x_star);
  EXPECT_EQ(a.truth.f_star, b.truth.f_star);
  fs::remove_all(dir);
}

ExperimentConfig quick(const fs::path& out) {
  KeyValues kv = preset("quick");
  kv["output.dir"] = out.string();
  kv["termination.max_iters"] = "60";
  kv["metrics.tail"] = "20";
  return resolve_config(kv);
}

TEST(Experiment, RunWritesArtifactsDeterministically) {
  fs::path d1 = scratch("run1"), d2 = scratch("run2");
  ExperimentReport r1 = run_experiment(quick(d1), Mode::run);
  write_report(r1);
  ::setenv("SNEAR_WORKERS", "1", 1);
  ExperimentReport r2 = run_experiment(quick(d2), Mode::run);
  ::unsetenv("SNEAR_WORKERS");
  ASSERT_EQ(r1.cells.size(), 1u);
  ASSERT_EQ(r1.cells[0].methods.size(), 4u);
  for (const auto& m : r1.cells[0].methods) EXPECT_EQ(m.runs.size(), 3u);
  EXPECT_TRUE(fs::exists(d1 / "summary.txt"));
  EXPECT_TRUE(fs::exists(d1 / "bounds.txt"));
  int files = 0;
  for (const auto& e : fs::recursive_directory_iterator(d1 / "traces")) {
    if (!e.is_regular_file()) continue;
    ++files;
    fs::path twin = d2 / fs::relative(e.path(), d1);
    EXPECT_EQ(slurp(e.path()), slurp(twin)) << e.path();
  }
  EXPECT_EQ(files, 12);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(Experiment, SweepBuildsTheCrossProduct) {
  fs::path d = scratch("sweep");
  KeyValues kv = preset("quick");
  kv["output.dir"] = d.string();
  kv["output.traces"] = "none";
  kv["termination.max_iters"] = "30";
  kv["metrics.tail"] = "10";
  kv["seeds.count"] = "2";
  kv["methods"] = "snear_t1";
  kv.erase("method.snear_t5.t");
  kv.erase("method.snear_plus.schedule");
  kv.erase("method.dgd.algo");
  kv["sweep.kinds"] = "ring,complete";
  kv["sweep.n"] = "5,6";
  kv["sweep.t"] = "1,3";
  ExperimentReport r = run_experiment(resolve_config(kv), Mode::sweep);
  EXPECT_EQ(r.cells.size(), 8u);
  fs::path csv = d / "fig2.csv";
  emit_plot_data(r, PlotKind::scaling, csv.string());
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("network_type,n,t,method", 0), 0u);
  fs::remove_all(d);
}

TEST(Experiment, BoundsModeReportsConstants) {
  fs::path d = scratch("bounds");
  ExperimentReport r = run_experiment(quick(d), Mode::bounds);
  std::string text = bounds_text(r);
  EXPECT_NE(text.find("beta"), std::string::npos);
  EXPECT_NE(text.find("t_Q1"), std::string::npos);
  fs::remove_all(d);
}

TEST(Experiment, ModeNames) {
  for (Mode m : {Mode::run, Mode::sweep, Mode::compare, Mode::bounds})
    EXPECT_EQ(parse_mode(to_string(m)), m);
}

TEST(Workers, EnvironmentOverride) {
  ::setenv("SNEAR_WORKERS", "3", 1);
  EXPECT_EQ(worker_count(), 3);
  ::unsetenv("SNEAR_WORKERS");
  EXPECT_GE(worker_count(), 1);
}

}  // namespace
}  // namespace snear
