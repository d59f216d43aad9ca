//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_REWARD_HPP_
#define AGFN_REWARD_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "agfn/descriptors.hpp"
#include "agfn/molgraph.hpp"

namespace agfn {

class RewardError: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kIllegalLogReward = -512.0;

struct PropertyBounds {
  double c_min = 0;
  double c_max = 1;
  double c_min_star = 0;
  double c_max_star = 1;

  void validate() const {
    if (!(c_min_star <= c_min && c_min < c_max && c_max <= c_max_star))
      throw RewardError("property bounds must satisfy c*min <= cmin < cmax "
                        "<= c*max");
  }
};

struct PropertyConditional {
  PropertyId property;
  double c_low = 0;
  double c_high = 1;
  int d = 0;
  double lambda = 1;

  void validate() const {
    if (!(c_low < c_high))
      throw RewardError("conditional range for " + property.name
                        + " needs c_low < c_high");
    if (!(lambda > 0))
      throw RewardError("lambda must be positive for " + property.name);
    if (d < -1 || d > 1)
      throw RewardError("preference direction must be -1, 0 or 1");
  }
};

// Decay rates: TPSA 20, everything else 1.
inline double default_lambda(PropertyKind kind) {
  return kind == PropertyKind::TPSA ? 20.0 : 1.0;
}

inline double positive_part(double x) { return x > 0 ? x : 0; }

inline double property_reward(double p, const PropertyConditional &c) {
  const double d = c.d;
  if (p < c.c_low)
    return (2 - positive_part(d)) / 2 * std::exp((p - c.c_low) / c.lambda);
  if (p > c.c_high)
    return (2 - positive_part(-d)) / 2 * std::exp((c.c_high - p) / c.lambda);
  return (2 - positive_part(d)) / 2
         + d / 2 * (p - c.c_low) / (c.c_high - c.c_low);
}

// output[i] = clamp(b - i, 0, 1) with b = (v - lo) / (hi - lo) * dims.
inline std::vector<double> thermometer_encode(double value, double lo,
                                              double hi, int dims) {
  if (dims < 2 || !(lo < hi))
    throw RewardError("thermometer needs dims >= 2 and lo < hi");
  const double v = std::clamp(value, lo, hi);
  const double b = (v - lo) / (hi - lo) * dims;
  std::vector<double> out(dims);
  for (int i = 0; i < dims; ++i)
    out[i] = std::clamp(b - i, 0.0, 1.0);
  return out;
}

// One property slot of a conditioning context: what to reward and the
// bounds used for sampling and encoding.
struct PropertySlot {
  PropertyConditional cond;
  PropertyBounds bounds;
};

struct ConditioningContext {
  std::vector<PropertySlot> slots;
  std::vector<double> encoding;
};

inline int encoding_width(int num_properties, int thermometer_dims) {
  return num_properties * (2 * thermometer_dims + 3);
}

// Two thermometers (c_low, c_high) over [c*min, c*max] and a one-hot of d.
inline void encode(ConditioningContext &ctx, int thermometer_dims) {
  ctx.encoding.clear();
  for (const PropertySlot &s: ctx.slots) {
    for (double v: { s.cond.c_low, s.cond.c_high }) {
      auto t = thermometer_encode(v, s.bounds.c_min_star, s.bounds.c_max_star,
                                  thermometer_dims);
      ctx.encoding.insert(ctx.encoding.end(), t.begin(), t.end());
    }
    for (int d = -1; d <= 1; ++d)
      ctx.encoding.push_back(s.cond.d == d ? 1.0 : 0.0);
  }
}

using ExternalReward = std::function<double(const MolGraph &)>;

// Product of property rewards, times the external reward when given.
inline double aggregate_reward(const MolGraph &x, const ConditioningContext &ctx,
                               const PropertyCalculator &calc,
                               const ExternalReward &ext = {}) {
  double r = 1.0;
  for (const PropertySlot &s: ctx.slots)
    r *= property_reward(calc(s.cond.property, x), s.cond);
  if (ext)
    r *= ext(x);
  return r;
}

// log R floored at the illegal-action constant.
inline double floored_log(double r) {
  if (!(r > 0))
    return kIllegalLogReward;
  return std::max(std::log(r), kIllegalLogReward);
}

struct SamplingParams {
  // Probability of an out-of-bounds online draw or a negative offline one.
  double epsilon = 0.1;
  // Offline spread as a fraction of (c_max - c_min).
  double sigma_fraction = 0.05;
};

namespace internal {

inline double uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Inverse-CDF draw from N(mu, sigma) truncated to [lo, hi].
inline double truncated_normal(std::mt19937_64 &rng, double mu, double sigma,
                               double lo, double hi) {
  if (!(sigma > 0))
    return std::clamp(mu, lo, hi);
  boost::math::normal_distribution<double> z;
  const double a = boost::math::cdf(z, (lo - mu) / sigma);
  const double b = boost::math::cdf(z, (hi - mu) / sigma);
  if (!(b - a > 1e-300))
    return mu < lo ? lo : hi;
  const double u = std::clamp(uniform(rng, a, b), 1e-300, 1 - 1e-16);
  return std::clamp(mu + sigma * boost::math::quantile(z, u), lo, hi);
}

// Orders the pair and keeps a nonzero width inside [lo, hi].
inline void order_range(PropertyConditional &c, double lo, double hi) {
  if (c.c_low > c.c_high)
    std::swap(c.c_low, c.c_high);
  const double min_width = 1e-9 * (hi - lo);
  if (c.c_high - c.c_low < min_width) {
    const double mid = std::clamp(0.5 * (c.c_low + c.c_high),
                                  lo + min_width / 2, hi - min_width / 2);
    c.c_low = mid - min_width / 2;
    c.c_high = mid + min_width / 2;
  }
}

}  // namespace internal

// Online draw: both ends from U(cmin, cmax), or with probability epsilon from
// U(c*min, c*max).
inline void sample_online(PropertySlot &slot, const SamplingParams &sp,
                          std::mt19937_64 &rng) {
  const PropertyBounds &b = slot.bounds;
  b.validate();
  const bool oob = internal::uniform(rng, 0, 1) < sp.epsilon;
  const double lo = oob ? b.c_min_star : b.c_min;
  const double hi = oob ? b.c_max_star : b.c_max;
  slot.cond.c_low = internal::uniform(rng, lo, hi);
  slot.cond.c_high = internal::uniform(rng, lo, hi);
  internal::order_range(slot.cond, lo, hi);
}

// Offline draw around the known value p: both ends from the truncated
// normal, or with probability epsilon a range excluding p on one side.
inline void sample_offline(PropertySlot &slot, double p,
                           const SamplingParams &sp, std::mt19937_64 &rng) {
  const PropertyBounds &b = slot.bounds;
  b.validate();
  PropertyConditional &c = slot.cond;
  if (internal::uniform(rng, 0, 1) < sp.epsilon) {
    bool low_side = internal::uniform(rng, 0, 1) < 0.5;
    // A side is only usable when p lies strictly past its bound.
    if (low_side && !(p > b.c_min))
      low_side = false;
    else if (!low_side && !(p < b.c_max))
      low_side = true;
    if (low_side) {
      c.c_low = b.c_min;
      c.c_high = internal::uniform(rng, b.c_min, std::min(p, b.c_max));
    } else {
      c.c_high = b.c_max;
      c.c_low = internal::uniform(rng, std::max(p, b.c_min), b.c_max);
    }
  } else {
    const double sigma = sp.sigma_fraction * (b.c_max - b.c_min);
    c.c_low = internal::truncated_normal(rng, p, sigma, b.c_min, b.c_max);
    c.c_high = internal::truncated_normal(rng, p, sigma, b.c_min, b.c_max);
  }
  internal::order_range(c, b.c_min, b.c_max);
}

// Built-in defaults for a property: conditional [c_low, c_high, d] and
// sampling / extrema bounds.
inline PropertySlot default_slot(PropertyKind kind) {
  PropertySlot s;
  s.cond.property = { kind, std::string(property_kind_name(kind)) };
  s.cond.lambda = default_lambda(kind);
  auto set = [&](double lo, double hi, int d, double smin, double smax) {
    s.cond.c_low = lo;
    s.cond.c_high = hi;
    s.cond.d = d;
    s.bounds = { lo, hi, smin, smax };
  };
  switch (kind) {
  case PropertyKind::QED:
    set(0.65, 0.8, 0, 0, 1);
    break;
  case PropertyKind::SAS:
    set(1, 3, 0, 1, 10);
    break;
  case PropertyKind::NumRings:
    set(1, 3, 1, 0, 10);
    break;
  case PropertyKind::TPSA:
    set(60, 100, 0, 0, 200);
    break;
  case PropertyKind::MolWt:
    set(100, 800, -1, 0, 1000);
    break;
  case PropertyKind::LogP:
    set(-5, 6, -1, -10, 10);
    break;
  case PropertyKind::External:
    set(0, 1, 0, 0, 1);
    break;
  }
  return s;
}

// QED, SAS, NumRings, TPSA.
inline ConditioningContext default_pretraining_context(int thermometer_dims) {
  ConditioningContext ctx;
  for (auto k: { PropertyKind::QED, PropertyKind::SAS, PropertyKind::NumRings,
                 PropertyKind::TPSA })
    ctx.slots.push_back(default_slot(k));
  encode(ctx, thermometer_dims);
  return ctx;
}

enum class SampleMode { online, offline };

// Fresh ranges for every slot of `base`. Offline mode needs x.
inline ConditioningContext
sample_conditionals(const ConditioningContext &base, SampleMode mode,
                    const MolGraph *x, const PropertyCalculator &calc,
                    const SamplingParams &sp, int thermometer_dims,
                    std::mt19937_64 &rng) {
  if (sp.epsilon < 0 || sp.epsilon > 1)
    throw RewardError("epsilon must lie in [0, 1]");
  ConditioningContext ctx = base;
  for (PropertySlot &s: ctx.slots) {
    if (mode == SampleMode::online) {
      sample_online(s, sp, rng);
    } else {
      if (x == nullptr)
        throw RewardError("offline conditionals need a molecule");
      sample_offline(s, calc(s.cond.property, *x), sp, rng);
    }
  }
  encode(ctx, thermometer_dims);
  return ctx;
}

}  // namespace agfn

#endif  // AGFN_REWARD_HPP_
