// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "snear/error.hpp"
#include "snear/objectives.hpp"

namespace snear {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view token, int lineno, const char* what) {
  // from_chars rejects a leading '+', which LIBSVM files use for labels.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": bad " + what + " '" +
                               std::string(token) + "'");
  return v;
}

[[noreturn]] void bad_line(int lineno, const std::string& why) {
  fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": " + why);
}

}  // namespace

LabelMap parse_label_map(const std::string& text) {
  LabelMap out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto sv = trim(item);
    if (sv.empty()) continue;
    const auto colon = sv.find(':');
    if (colon == std::string_view::npos)
      fail(ErrorCode::config, "label map entry '" + std::string(sv) + "' needs raw:mapped");
    const double mapped = parse_number(trim(sv.substr(colon + 1)), 0, "label");
    if (mapped != 1.0 && mapped != -1.0)
      fail(ErrorCode::config, "labels must map to -1 or +1");
    out[std::string(trim(sv.substr(0, colon)))] = mapped;
  }
  return out;
}

Dataset parse_libsvm(std::istream& is, const LabelMap& labels) {
  std::vector<Eigen::Triplet<double>> entries;
  std::vector<double> y;
  int max_index = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view rest = trim(line);
    if (rest.empty() || rest.front() == '#') continue;

    auto next_token = [&rest]() {
      const auto end = rest.find_first_of(" \t");
      std::string_view tok = rest.substr(0, end);
      rest = end == std::string_view::npos ? std::string_view{} : trim(rest.substr(end));
      return tok;
    };

    const std::string_view label_tok = next_token();
    double label = 0.0;
    if (!labels.empty()) {
      auto it = labels.find(std::string(label_tok));
      if (it == labels.end()) {
        // Accept numerically equal spellings ("1" vs "+1" vs "1.0").
        const double raw = parse_number(label_tok, lineno, "label");
        bool found = false;
        for (const auto& [k, v] : labels) {
          double key = 0.0;
          std::string_view ks = k;
          if (!ks.empty() && ks.front() == '+') ks.remove_prefix(1);
          auto [p, ec] = std::from_chars(ks.data(), ks.data() + ks.size(), key);
          if (ec == std::errc() && p == ks.data() + ks.size() && key == raw) {
            label = v;
            found = true;
            break;
          }
        }
        if (!found) bad_line(lineno, "label '" + std::string(label_tok) + "' is not in the label map");
      } else {
        label = it->second;
      }
    } else {
      label = parse_number(label_tok, lineno, "label");
      if (label != 1.0 && label != -1.0)
        bad_line(lineno, "label '" + std::string(label_tok) +
                             "' is not -1/+1; supply a label map");
    }
    const int row = static_cast<int>(y.size());
    y.push_back(label);

    int prev = 0;
    while (!rest.empty()) {
      const std::string_view tok = next_token();
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) bad_line(lineno, "feature '" + std::string(tok) + "' lacks ':'");
      int index = 0;
      auto idx_sv = tok.substr(0, colon);
      auto [p, ec] = std::from_chars(idx_sv.data(), idx_sv.data() + idx_sv.size(), index);
      if (ec != std::errc() || p != idx_sv.data() + idx_sv.size() || index < 1)
        bad_line(lineno, "bad feature index '" + std::string(idx_sv) + "'");
      if (index <= prev) bad_line(lineno, "feature indices must be strictly increasing");
      prev = index;
      const double v = parse_number(tok.substr(colon + 1), lineno, "feature value");
      entries.emplace_back(row, index - 1, v);
      max_index = std::max(max_index, index);
    }
  }
  if (y.empty()) fail(ErrorCode::parse, "LIBSVM input contains no samples");
  if (max_index == 0) fail(ErrorCode::parse, "LIBSVM input contains no features");

  Dataset d;
  d.features.resize(static_cast<Eigen::Index>(y.size()), max_index);
  d.features.setFromTriplets(entries.begin(), entries.end());
  d.features.makeCompressed();
  d.labels = Eigen::Map<const Vec>(y.data(), static_cast<Eigen::Index>(y.size()));
  return d;
}

Dataset load_libsvm(const std::string& path, const LabelMap& labels) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
  return parse_libsvm(in, labels);
}

}  // namespace snear
