// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end over the C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "snear/snear.h"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kInternalError = 2;

int exit_code(snear_status st) {
  switch (st) {
    case SNEAR_OK: return kOk;
    case SNEAR_ERR_CONFIG:
    case SNEAR_ERR_PARSE:
    case SNEAR_ERR_IO:
    case SNEAR_ERR_PARAMETER:
    case SNEAR_ERR_GENERATION:
    case SNEAR_ERR_UNSUPPORTED: return kConfigError;
    default: return kInternalError;
  }
}

int report_failure(snear_status st, const char* context) {
  std::fprintf(stderr, "snear: %s: %s: %s\n", context, snear_status_string(st), snear_last_error());
  return exit_code(st);
}

struct RunArgs {
  std::string config;
  std::string preset;
  std::vector<std::string> sets;
  std::string out;
  bool quiet = false;
};

void add_run_options(CLI::App* sub, RunArgs& a) {
  sub->add_option("config", a.config, "Config file (key = value lines)");
  sub->add_option("-p,--preset", a.preset, "Start from a built-in preset");
  sub->add_option("-s,--set", a.sets, "Override a key, e.g. --set graph.n=10");
  sub->add_option("-o,--out", a.out, "Output directory (output.dir)");
  sub->add_flag("-q,--quiet", a.quiet, "Do not print the summary");
}

int execute(const std::string& mode, const RunArgs& a) {
  if (a.config.empty() == a.preset.empty()) {
    std::fprintf(stderr, "snear: give exactly one of a config file or --preset\n");
    return kConfigError;
  }
  snear_experiment* exp = nullptr;
  snear_status st = a.preset.empty() ? snear_experiment_from_file(a.config.c_str(), &exp)
                                     : snear_experiment_from_preset(a.preset.c_str(), &exp);
  if (st != SNEAR_OK) return report_failure(st, "loading config");

  int rc = kOk;
  snear_report* report = nullptr;
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "snear: --set expects key=value, got '%s'\n", kv.c_str());
      snear_experiment_free(exp);
      return kConfigError;
    }
    st = snear_experiment_set(exp, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != SNEAR_OK) break;
  }
  if (st == SNEAR_OK && !a.out.empty()) st = snear_experiment_set(exp, "output.dir", a.out.c_str());
  if (st == SNEAR_OK) st = snear_experiment_validate(exp);
  if (st != SNEAR_OK) {
    rc = report_failure(st, "config");
  } else if ((st = snear_experiment_run(exp, mode.c_str(), &report)) != SNEAR_OK) {
    rc = report_failure(st, mode.c_str());
  } else if ((st = snear_report_write(report)) != SNEAR_OK) {
    rc = report_failure(st, "writing report");
  } else if (!a.quiet) {
    char* text = nullptr;
    st = mode == "bounds" ? snear_report_bounds(report, &text) : snear_report_summary(report, &text);
    if (st != SNEAR_OK) {
      rc = report_failure(st, "formatting");
    } else {
      std::fputs(text, stdout);
      snear_string_free(text);
    }
  }
  snear_report_free(report);
  snear_experiment_free(exp);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snear: nested consensus optimization simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(snear_version()));

  RunArgs run_args, sweep_args, compare_args, bounds_args;
  add_run_options(app.add_subcommand("run", "Run one configuration"), run_args);
  add_run_options(app.add_subcommand("sweep", "Cross the sweep.* grids"), sweep_args);
  add_run_options(app.add_subcommand("compare", "Multi-method comparison with error series"),
                  compare_args);
  add_run_options(app.add_subcommand("bounds", "Print theory constants and bounds"), bounds_args);
  auto* presets = app.add_subcommand("presets", "List built-in presets");
  std::string show;
  presets->add_option("--show", show, "Print a preset's config text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  if (app.got_subcommand("presets")) {
    char* text = nullptr;
    snear_status st;
    if (show.empty()) {
      st = snear_preset_list(&text);
    } else {
      snear_experiment* exp = nullptr;
      st = snear_experiment_from_preset(show.c_str(), &exp);
      if (st == SNEAR_OK) st = snear_experiment_config_text(exp, &text);
      snear_experiment_free(exp);
    }
    if (st != SNEAR_OK) return report_failure(st, "presets");
    std::fputs(text, stdout);
    snear_string_free(text);
    return kOk;
  }
  if (app.got_subcommand("run")) return execute("run", run_args);
  if (app.got_subcommand("sweep")) return execute("sweep", sweep_args);
  if (app.got_subcommand("compare")) return execute("compare", compare_args);
  return execute("bounds", bounds_args);
}
