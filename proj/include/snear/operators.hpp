// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNEAR_OPERATORS_HPP
#define SNEAR_OPERATORS_HPP

#include <cstdint>
#include <string>

#include "snear/objectives.hpp"
#include "snear/rng.hpp"

namespace snear {

/// Randomized rounding onto the grid of spacing 1/delta. Unbiased, with
/// |result - x| < 1/delta and error variance <= 1/(4 delta^2).
double quantize_scalar(double x, int delta, RngStream& rng);

/// Communication channel T_c.
struct CommOperator {
  enum class Kind { exact, quantizer, gaussian };

  Kind kind = Kind::exact;
  int delta = 1;         // quantizer grid resolution
  double sigma_c = 0.0;  // gaussian: total std-dev of the error vector

  static CommOperator exact() { return {}; }
  static CommOperator quantizer(int delta);
  static CommOperator gaussian(double sigma_c);

  /// Upper bound on E||T_c[v] - v||^2 for v in R^p: p/(4 delta^2), sigma_c^2, or 0.
  double variance_bound(int p) const;

  Vec apply(const Vec& v, RngStream& rng) const;
  /// In-place form used by the engine.
  void apply_into(const double* in, double* out, int p, RngStream& rng) const;

  bool is_exact() const { return kind == Kind::exact || (kind == Kind::gaussian && sigma_c == 0.0); }
};

std::string to_string(CommOperator::Kind kind);

/// Inexact gradient oracle T_g.
struct GradOperator {
  enum class Kind { exact, gaussian, minibatch };

  Kind kind = Kind::exact;
  double sigma_g = 0.0;  // gaussian: total std-dev of the error vector
  int batch = 16;        // minibatch size, drawn with replacement
  /// Variance bound reported to the theory; gaussian sets sigma_g^2, a
  /// minibatch operator needs estimate_minibatch_variance().
  double sigma_g_sq_bound = 0.0;

  static GradOperator exact() { return {}; }
  static GradOperator gaussian(double sigma_g);
  static GradOperator minibatch(int batch);

  Vec apply(const Objective& obj, int node, const Vec& x, RngStream& rng) const;
};

std::string to_string(GradOperator::Kind kind);

/// max over nodes of the sample mean of ||T_g[grad f_i(x)] - grad f_i(x)||^2.
double estimate_minibatch_variance(const Objective& obj, const GradOperator& op,
                                   const Vec& x, int draws, std::uint64_t seed);

}  // namespace snear

#endif  // SNEAR_OPERATORS_HPP
