// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include "snear/snear.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "snear/error.hpp"
#include "snear/experiment.hpp"
#include "snear/presets.hpp"

struct snear_experiment {
  snear::KeyValues kv;
};

struct snear_report {
  snear::ExperimentReport report;
};

namespace {

thread_local std::string g_last_error;

snear_status status_of(snear::ErrorCode c) {
  switch (c) {
    case snear::ErrorCode::parameter: return SNEAR_ERR_PARAMETER;
    case snear::ErrorCode::generation: return SNEAR_ERR_GENERATION;
    case snear::ErrorCode::numeric: return SNEAR_ERR_NUMERIC;
    case snear::ErrorCode::parse: return SNEAR_ERR_PARSE;
    case snear::ErrorCode::convergence: return SNEAR_ERR_CONVERGENCE;
    case snear::ErrorCode::unsupported: return SNEAR_ERR_UNSUPPORTED;
    case snear::ErrorCode::invariant: return SNEAR_ERR_INVARIANT;
    case snear::ErrorCode::config: return SNEAR_ERR_CONFIG;
    case snear::ErrorCode::io: return SNEAR_ERR_IO;
  }
  return SNEAR_ERR_INTERNAL;
}

template <class F>
snear_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return SNEAR_OK;
  } catch (const snear::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SNEAR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SNEAR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SNEAR_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (!p) snear::fail(snear::ErrorCode::parameter, std::string(what) + " is null");
}

const snear::MethodReport& method_at(const snear_report* r, int cell, int method) {
  need(r, "report");
  const auto& cells = r->report.cells;
  if (cell < 0 || cell >= static_cast<int>(cells.size()))
    snear::fail(snear::ErrorCode::parameter, "cell index out of range");
  const auto& methods = cells[cell].methods;
  if (method < 0 || method >= static_cast<int>(methods.size()))
    snear::fail(snear::ErrorCode::parameter, "method index out of range");
  return methods[method];
}

snear_status make_experiment(snear::KeyValues kv, snear_experiment** out) {
  return guard([&] {
    need(out, "out");
    *out = new snear_experiment{std::move(kv)};
  });
}

}  // namespace

extern "C" {

const char* snear_version(void) { return "0.1.0"; }

const char* snear_status_string(snear_status status) {
  switch (status) {
    case SNEAR_OK: return "ok";
    case SNEAR_ERR_PARAMETER: return "parameter error";
    case SNEAR_ERR_GENERATION: return "generation error";
    case SNEAR_ERR_NUMERIC: return "numeric error";
    case SNEAR_ERR_PARSE: return "parse error";
    case SNEAR_ERR_CONVERGENCE: return "convergence error";
    case SNEAR_ERR_UNSUPPORTED: return "unsupported operation";
    case SNEAR_ERR_INVARIANT: return "invariant violation";
    case SNEAR_ERR_CONFIG: return "config error";
    case SNEAR_ERR_IO: return "i/o error";
    case SNEAR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* snear_last_error(void) { return g_last_error.c_str(); }

void snear_string_free(char* s) { std::free(s); }

snear_status snear_preset_list(char** out) {
  return guard([&] {
    need(out, "out");
    std::string s;
    for (const auto& p : snear::preset_list()) s += p.name + "\t" + p.description + "\n";
    *out = dup(s);
  });
}

snear_status snear_experiment_from_file(const char* path, snear_experiment** out) {
  snear::KeyValues kv;
  const snear_status st = guard([&] {
    need(path, "path");
    kv = snear::load_key_values(path);
  });
  return st == SNEAR_OK ? make_experiment(std::move(kv), out) : st;
}

snear_status snear_experiment_from_text(const char* text, snear_experiment** out) {
  snear::KeyValues kv;
  const snear_status st = guard([&] {
    need(text, "text");
    kv = snear::parse_key_values_text(text);
  });
  return st == SNEAR_OK ? make_experiment(std::move(kv), out) : st;
}

snear_status snear_experiment_from_preset(const char* name, snear_experiment** out) {
  snear::KeyValues kv;
  const snear_status st = guard([&] {
    need(name, "name");
    kv = snear::preset(name);
  });
  return st == SNEAR_OK ? make_experiment(std::move(kv), out) : st;
}

snear_status snear_experiment_set(snear_experiment* exp, const char* key, const char* value) {
  return guard([&] {
    need(exp, "experiment");
    need(key, "key");
    need(value, "value");
    if (*key == '\0') snear::fail(snear::ErrorCode::config, "empty key");
    if (*value == '\0') exp->kv.erase(key);
    else exp->kv[key] = value;
  });
}

snear_status snear_experiment_config_text(const snear_experiment* exp, char** out) {
  return guard([&] {
    need(exp, "experiment");
    need(out, "out");
    *out = dup(snear::format_key_values(exp->kv));
  });
}

snear_status snear_experiment_validate(const snear_experiment* exp) {
  return guard([&] {
    need(exp, "experiment");
    (void)snear::resolve_config(exp->kv);
  });
}

void snear_experiment_free(snear_experiment* exp) { delete exp; }

snear_status snear_experiment_run(const snear_experiment* exp, const char* mode,
                                  snear_report** out) {
  return guard([&] {
    need(exp, "experiment");
    need(mode, "mode");
    need(out, "out");
    *out = nullptr;
    const snear::Mode m = snear::parse_mode(mode);
    const snear::ExperimentConfig cfg = snear::resolve_config(exp->kv);
    auto* r = new snear_report{snear::run_experiment(cfg, m)};
    *out = r;
  });
}

snear_status snear_report_write(const snear_report* report) {
  return guard([&] {
    need(report, "report");
    snear::write_report(report->report);
  });
}

snear_status snear_report_summary(const snear_report* report, char** out) {
  return guard([&] {
    need(report, "report");
    need(out, "out");
    *out = dup(snear::summary_text(report->report));
  });
}

snear_status snear_report_bounds(const snear_report* report, char** out) {
  return guard([&] {
    need(report, "report");
    need(out, "out");
    *out = dup(snear::bounds_text(report->report));
  });
}

int snear_report_cell_count(const snear_report* report) {
  return report ? static_cast<int>(report->report.cells.size()) : -1;
}

int snear_report_method_count(const snear_report* report, int cell) {
  if (!report || cell < 0 || cell >= static_cast<int>(report->report.cells.size())) return -1;
  return static_cast<int>(report->report.cells[cell].methods.size());
}

snear_status snear_report_method_name(const snear_report* report, int cell, int method,
                                      char** out) {
  return guard([&] {
    need(out, "out");
    *out = dup(method_at(report, cell, method).name);
  });
}

snear_status snear_report_steady_error(const snear_report* report, int cell, int method,
                                       double* median) {
  return guard([&] {
    need(median, "median");
    const auto& m = method_at(report, cell, method);
    if (m.runs.empty()) snear::fail(snear::ErrorCode::parameter, "report holds no runs");
    *median = m.steady_err.median;
  });
}

snear_status snear_report_diverged(const snear_report* report, int cell, int method,
                                   int* count) {
  return guard([&] {
    need(count, "count");
    *count = method_at(report, cell, method).diverged;
  });
}

void snear_report_free(snear_report* report) { delete report; }

}  // extern "C"
