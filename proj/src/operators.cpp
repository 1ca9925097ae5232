// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#include "snear/operators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "snear/error.hpp"

namespace snear {

double quantize_scalar(double x, int delta, RngStream& rng) {
  if (!std::isfinite(x)) fail(ErrorCode::numeric, "cannot quantize a non-finite value");
  if (delta < 1) fail(ErrorCode::parameter, "quantizer needs delta >= 1");
  const double d = static_cast<double>(delta);
  const double lo_units = std::floor(x * d);
  const double hi_units = std::ceil(x * d);
  const double u = rng.uniform();
  if (lo_units == hi_units) return lo_units / d;
  const double lower = lo_units / d;
  const double upper = hi_units / d;
  const double p_lower = std::clamp((upper - x) * d, 0.0, 1.0);
  return u < p_lower ? lower : upper;
}

CommOperator CommOperator::quantizer(int delta) {
  if (delta < 1) fail(ErrorCode::parameter, "quantizer needs delta >= 1");
  CommOperator op;
  op.kind = Kind::quantizer;
  op.delta = delta;
  return op;
}

CommOperator CommOperator::gaussian(double sigma_c) {
  if (!(sigma_c >= 0.0)) fail(ErrorCode::parameter, "sigma_c must be nonnegative");
  CommOperator op;
  op.kind = Kind::gaussian;
  op.sigma_c = sigma_c;
  return op;
}

double CommOperator::variance_bound(int p) const {
  switch (kind) {
    case Kind::exact: return 0.0;
    case Kind::quantizer: return p / (4.0 * delta * delta);
    case Kind::gaussian: return sigma_c * sigma_c;
  }
  return 0.0;
}

void CommOperator::apply_into(const double* in, double* out, int p, RngStream& rng) const {
  switch (kind) {
    case Kind::exact:
      std::copy(in, in + p, out);
      return;
    case Kind::quantizer:
      for (int k = 0; k < p; ++k) out[k] = quantize_scalar(in[k], delta, rng);
      return;
    case Kind::gaussian: {
      const double sd = sigma_c / std::sqrt(static_cast<double>(p));
      for (int k = 0; k < p; ++k) {
        if (!std::isfinite(in[k])) fail(ErrorCode::numeric, "non-finite value on channel");
        out[k] = in[k] + sd * rng.normal();
      }
      return;
    }
  }
}

Vec CommOperator::apply(const Vec& v, RngStream& rng) const {
  Vec out(v.size());
  apply_into(v.data(), out.data(), static_cast<int>(v.size()), rng);
  return out;
}

std::string to_string(CommOperator::Kind kind) {
  switch (kind) {
    case CommOperator::Kind::exact: return "exact";
    case CommOperator::Kind::quantizer: return "quantizer";
    case CommOperator::Kind::gaussian: return "gaussian";
  }
  return "?";
}

GradOperator GradOperator::gaussian(double sigma_g) {
  if (!(sigma_g >= 0.0)) fail(ErrorCode::parameter, "sigma_g must be nonnegative");
  GradOperator op;
  op.kind = Kind::gaussian;
  op.sigma_g = sigma_g;
  op.sigma_g_sq_bound = sigma_g * sigma_g;
  return op;
}

GradOperator GradOperator::minibatch(int batch) {
  if (batch < 1) fail(ErrorCode::parameter, "batch size must be >= 1");
  GradOperator op;
  op.kind = Kind::minibatch;
  op.batch = batch;
  return op;
}

Vec GradOperator::apply(const Objective& obj, int node, const Vec& x, RngStream& rng) const {
  switch (kind) {
    case Kind::exact:
      return obj.gradient(node, x);
    case Kind::gaussian: {
      Vec g = obj.gradient(node, x);
      if (sigma_g > 0.0) {
        const double sd = sigma_g / std::sqrt(static_cast<double>(g.size()));
        for (Eigen::Index k = 0; k < g.size(); ++k) g[k] += sd * rng.normal();
      }
      return g;
    }
    case Kind::minibatch: {
      if (!obj.data_backed())
        fail(ErrorCode::unsupported, "mini-batch gradients need a data-backed objective");
      const std::size_t shard = obj.shard_size(node);
      std::vector<std::size_t> picks(static_cast<std::size_t>(batch));
      for (auto& p : picks) p = static_cast<std::size_t>(rng.below(shard));
      return obj.sample_gradient(node, x, picks);
    }
  }
  return {};
}

std::string to_string(GradOperator::Kind kind) {
  switch (kind) {
    case GradOperator::Kind::exact: return "exact";
    case GradOperator::Kind::gaussian: return "gaussian";
    case GradOperator::Kind::minibatch: return "minibatch";
  }
  return "?";
}

double estimate_minibatch_variance(const Objective& obj, const GradOperator& op,
                                   const Vec& x, int draws, std::uint64_t seed) {
  if (draws < 1) fail(ErrorCode::parameter, "need at least one draw");
  double worst = 0.0;
  for (int i = 0; i < obj.nodes(); ++i) {
    const Vec exact = obj.gradient(i, x);
    double acc = 0.0;
    for (int d = 0; d < draws; ++d) {
      RngStream rng(seed, StreamKey{Purpose::estimate, static_cast<std::uint64_t>(i),
                                    static_cast<std::uint64_t>(d), 0});
      acc += (op.apply(obj, i, x, rng) - exact).squaredNorm();
    }
    worst = std::max(worst, acc / draws);
  }
  return worst;
}

}  // namespace snear
