// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "snear/snear.h"

extern "C" int snear_header_check_c(void);

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  snear_string_free(s);
  return out;
}

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STRNE(snear_version(), "");
  EXPECT_STREQ(snear_status_string(SNEAR_OK), "ok");
  EXPECT_STRNE(snear_status_string(SNEAR_ERR_CONFIG), "ok");
}

TEST(CApi, CompiledFromC) { EXPECT_EQ(snear_header_check_c(), SNEAR_OK); }

TEST(CApi, PresetList) {
  char* text = nullptr;
  ASSERT_EQ(snear_preset_list(&text), SNEAR_OK);
  std::string s = take(text);
  EXPECT_NE(s.find("quick\t"), std::string::npos);
  EXPECT_NE(s.find("scaling\t"), std::string::npos);
}

TEST(CApi, ErrorsCarryCodesAndMessages) {
  snear_experiment* exp = nullptr;
  EXPECT_EQ(snear_experiment_from_text("broken line\n", &exp), SNEAR_ERR_CONFIG);
  EXPECT_EQ(exp, nullptr);
  EXPECT_STRNE(snear_last_error(), "");
  EXPECT_EQ(snear_experiment_from_file("/nonexistent.cfg", &exp), SNEAR_ERR_IO);
  EXPECT_EQ(snear_experiment_from_preset("nope", &exp), SNEAR_ERR_CONFIG);
  EXPECT_EQ(snear_experiment_from_text("a = 1\n", nullptr), SNEAR_ERR_PARAMETER);

  ASSERT_EQ(snear_experiment_from_text("graph.kind = star\n", &exp), SNEAR_OK);
  EXPECT_EQ(snear_experiment_validate(exp), SNEAR_ERR_CONFIG);
  snear_report* rep = nullptr;
  EXPECT_EQ(snear_experiment_run(exp, "run", &rep), SNEAR_ERR_CONFIG);
  EXPECT_EQ(rep, nullptr);
  EXPECT_EQ(snear_experiment_run(exp, "dance", &rep), SNEAR_ERR_CONFIG);
  snear_experiment_free(exp);
}

TEST(CApi, SetAndConfigText) {
  snear_experiment* exp = nullptr;
  ASSERT_EQ(snear_experiment_from_preset("quick", &exp), SNEAR_OK);
  ASSERT_EQ(snear_experiment_set(exp, "graph.n", "7"), SNEAR_OK);
  ASSERT_EQ(snear_experiment_set(exp, "alpha", ""), SNEAR_OK);
  char* text = nullptr;
  ASSERT_EQ(snear_experiment_config_text(exp, &text), SNEAR_OK);
  std::string s = take(text);
  EXPECT_NE(s.find("graph.n = 7"), std::string::npos);
  EXPECT_EQ(s.find("alpha ="), std::string::npos);
  snear_experiment_free(exp);
}

TEST(CApi, RunQuickPreset) {
  namespace fs = std::filesystem;
  fs::path out = fs::temp_directory_path() / ("snear_capi_" + std::to_string(::getpid()));
  snear_experiment* exp = nullptr;
  ASSERT_EQ(snear_experiment_from_preset("quick", &exp), SNEAR_OK);
  ASSERT_EQ(snear_experiment_set(exp, "output.dir", out.c_str()), SNEAR_OK);
  snear_report* rep = nullptr;
  ASSERT_EQ(snear_experiment_run(exp, "run", &rep), SNEAR_OK) << snear_last_error();
  ASSERT_EQ(snear_report_cell_count(rep), 1);
  ASSERT_EQ(snear_report_method_count(rep, 0), 4);
  char* name = nullptr;
  ASSERT_EQ(snear_report_method_name(rep, 0, 3, &name), SNEAR_OK);
  EXPECT_EQ(take(name), "dgd");
  double err = -1.0;
  ASSERT_EQ(snear_report_steady_error(rep, 0, 1, &err), SNEAR_OK);
  EXPECT_TRUE(std::isfinite(err));
  EXPECT_GE(err, 0.0);
  int div = -1;
  ASSERT_EQ(snear_report_diverged(rep, 0, 0, &div), SNEAR_OK);
  EXPECT_EQ(div, 0);
  EXPECT_EQ(snear_report_steady_error(rep, 0, 9, &err), SNEAR_ERR_PARAMETER);
  EXPECT_EQ(snear_report_method_count(rep, 5), -1);
  char* summary = nullptr;
  ASSERT_EQ(snear_report_summary(rep, &summary), SNEAR_OK);
  EXPECT_NE(take(summary).find("snear_t5"), std::string::npos);
  ASSERT_EQ(snear_report_write(rep), SNEAR_OK);
  EXPECT_TRUE(fs::exists(out / "summary.txt"));
  snear_report_free(rep);
  snear_experiment_free(exp);
  fs::remove_all(out);
}

TEST(CApi, NullHandlesAreSafe) {
  snear_experiment_free(nullptr);
  snear_report_free(nullptr);
  snear_string_free(nullptr);
  EXPECT_EQ(snear_report_cell_count(nullptr), -1);
  EXPECT_EQ(snear_experiment_validate(nullptr), SNEAR_ERR_PARAMETER);
}

}  // namespace
