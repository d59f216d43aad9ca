//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_METRICS_HPP_
#define AGFN_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "agfn/descriptors.hpp"
#include "agfn/fingerprint.hpp"
#include "agfn/molgraph.hpp"
#include "agfn/reward.hpp"
#include "agfn/smiles.hpp"

namespace agfn {

class MetricsError: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Generated molecules with their rewards. `total` also counts samples that
// failed to parse or validate, which only enter the validity rate.
struct SampleSet {
  std::vector<MolGraph> molecules;
  std::vector<double> rewards;
  std::size_t total = 0;

  void add(MolGraph g, double reward) {
    if (!std::isfinite(reward))
      throw MetricsError("non-finite reward");
    molecules.push_back(std::move(g));
    rewards.push_back(reward);
    ++total;
  }
  void add_invalid() { ++total; }
  std::size_t size() const { return molecules.size(); }
};

// Per-sample data computed once.
struct SampleCache {
  std::vector<std::string> keys;
  std::vector<Fingerprint> fps;
};

inline SampleCache build_cache(const SampleSet &s, int radius, int width) {
  SampleCache c;
  for (const MolGraph &g: s.molecules) {
    c.keys.push_back(canonical_key(g).text);
    c.fps.push_back(fingerprint(g, radius, width));
  }
  return c;
}

// Scan order for the greedy counts: reward descending, then key ascending.
inline std::vector<int> greedy_order(std::span<const double> rewards,
                                     std::span<const std::string> keys) {
  std::vector<int> idx(rewards.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (rewards[a] != rewards[b])
      return rewards[a] > rewards[b];
    return keys[a] < keys[b];
  });
  return idx;
}

// 1 - mean Tanimoto similarity over unordered pairs i < j. Rows are split
// across workers; partial sums are added in row order.
inline double diversity(std::span<const Fingerprint> fps, int workers = 1) {
  const std::size_t n = fps.size();
  if (n < 2)
    throw MetricsError("diversity needs at least two molecules");
  std::vector<double> row(n, 0.0);
  auto work = [&](std::size_t w, std::size_t stride) {
    for (std::size_t i = w; i < n; i += stride) {
      for (std::size_t j = i + 1; j < n; ++j)
        row[i] += tanimoto(fps[i], fps[j]);
    }
  };
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back(work, static_cast<std::size_t>(w),
                        static_cast<std::size_t>(workers));
    for (auto &t: pool)
      t.join();
  }
  double sum = 0;
  for (double r: row)
    sum += r;
  return 1 - 2 * sum / (static_cast<double>(n) * (n - 1));
}

// Molecules with reward >= threshold whose similarity to every counted mode
// is below `similarity`.
inline int n_modes(std::span<const Fingerprint> fps,
                   std::span<const double> rewards,
                   std::span<const std::string> keys,
                   double reward_threshold = 0.5, double similarity = 0.5) {
  std::vector<int> modes;
  for (int i: greedy_order(rewards, keys)) {
    if (rewards[i] < reward_threshold)
      break;
    bool fresh = true;
    for (int m: modes) {
      if (tanimoto(fps[i], fps[m]) >= similarity) {
        fresh = false;
        break;
      }
    }
    if (fresh)
      modes.push_back(i);
  }
  return static_cast<int>(modes.size());
}

// Sphere exclusion: admit a molecule when its Tanimoto distance to every
// admitted one is at least `distance`.
inline int n_circles(std::span<const Fingerprint> fps,
                     std::span<const double> rewards,
                     std::span<const std::string> keys,
                     double distance = 0.75) {
  if (!(distance > 0 && distance < 1))
    throw MetricsError("circle distance must lie in (0, 1)");
  std::vector<int> centres;
  for (int i: greedy_order(rewards, keys)) {
    bool far = true;
    for (int c: centres) {
      if (1 - tanimoto(fps[i], fps[c]) < distance) {
        far = false;
        break;
      }
    }
    if (far)
      centres.push_back(i);
  }
  return static_cast<int>(centres.size());
}

// Distinct Bemis-Murcko scaffolds; acyclic molecules have none.
inline int n_scaffolds(std::span<const MolGraph> mols) {
  std::set<std::string> seen;
  for (const MolGraph &g: mols) {
    MolGraph s = bemis_murcko_scaffold(g);
    if (!s.empty())
      seen.insert(canonical_key(s).text);
  }
  return static_cast<int>(seen.size());
}

// Mean of the k largest rewards (all of them when fewer than k).
inline double top_k_mean(std::span<const double> rewards, std::size_t k) {
  if (rewards.empty() || k == 0)
    return 0;
  std::vector<double> r(rewards.begin(), rewards.end());
  k = std::min(k, r.size());
  std::partial_sort(r.begin(), r.begin() + static_cast<long>(k), r.end(),
                    std::greater<>());
  double s = 0;
  for (std::size_t i = 0; i < k; ++i)
    s += r[i];
  return s / k;
}

// Mean |p - q10| / (c_max - c_min), q10 = c_low + 0.1 (c_high - c_low).
inline double l1_dist(std::span<const double> values, const PropertySlot &s) {
  if (values.empty())
    return 0;
  const double q10 = s.cond.c_low + 0.1 * (s.cond.c_high - s.cond.c_low);
  const double width = s.bounds.c_max - s.bounds.c_min;
  double sum = 0;
  for (double v: values)
    sum += std::abs(v - q10) / width;
  return sum / values.size();
}

inline bool success_indicator(double v, const PropertyConditional &c) {
  if (c.d < 0)
    return std::abs(v - c.c_low) <= 0.1 * std::abs(c.c_low);
  if (c.d > 0)
    return std::abs(v - c.c_high) <= 0.1 * std::abs(c.c_high);
  return c.c_low <= v && v <= c.c_high;
}

// values[p][i]: property p of molecule i. Percent of (molecule, property)
// indicators met, averaged per molecule.
inline double success_pct(const std::vector<std::vector<double>> &values,
                          std::span<const PropertySlot> slots) {
  if (slots.empty() || values.size() != slots.size())
    throw MetricsError("success_pct needs one value column per conditional");
  const std::size_t n = values[0].size();
  if (n == 0)
    return 0;
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int met = 0;
    for (std::size_t p = 0; p < slots.size(); ++p)
      met += success_indicator(values[p][i], slots[p].cond);
    sum += static_cast<double>(met) / slots.size();
  }
  return sum / n * 100;
}

struct HitCriteria {
  double score_threshold = 0;  // docking scores: lower is better
  double qed = 0.5;
  double sas = 5;
  double novel_similarity = 0.4;
};

struct HitRatios {
  double hit = 0;
  double novel_hit = 0;
  std::size_t missing = 0;  // samples without a score, excluded
};

// Hits: score < threshold, QED > qed, SAS < sas. Novel hits are also the
// first occurrence of their key and have max Tanimoto to every reference
// below novel_similarity. Both are fractions of the scored samples.
inline HitRatios hit_ratios(const SampleSet &s, const SampleCache &cache,
                            const ScoreTable &scores,
                            std::span<const Fingerprint> reference,
                            const PropertyCalculator &calc,
                            const HitCriteria &h) {
  if (scores.empty())
    throw MetricsError("hit ratios need a non-empty score table");
  HitRatios out;
  std::set<std::string> seen;
  std::size_t scored = 0, hits = 0, novel = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool first = seen.insert(cache.keys[i]).second;
    const auto ds = scores.find(CanonicalKey { cache.keys[i] });
    if (!ds) {
      ++out.missing;
      continue;
    }
    ++scored;
    const bool hit = *ds < h.score_threshold
                     && calc({ PropertyKind::QED, "QED" }, s.molecules[i]) > h.qed
                     && calc({ PropertyKind::SAS, "SAS" }, s.molecules[i]) < h.sas;
    if (!hit)
      continue;
    ++hits;
    if (!first)
      continue;
    double best = 0;
    for (const Fingerprint &r: reference)
      best = std::max(best, tanimoto(cache.fps[i], r));
    novel += best < h.novel_similarity;
  }
  if (scored > 0) {
    out.hit = static_cast<double>(hits) / scored;
    out.novel_hit = static_cast<double>(novel) / scored;
  }
  return out;
}

struct PropertySummary {
  std::string name;
  double mean = 0;
  double l1_dist = 0;
};

struct MetricsReport {
  std::size_t n = 0;
  double validity = 0;
  double uniqueness = 0;
  std::optional<double> novelty;  // needs a reference set
  double diversity = 0;
  int n_modes = 0;
  int n_circles = 0;
  int n_scaffolds = 0;
  double top1 = 0, top10 = 0, top100 = 0;
  double rw_c = 0, rw_s = 0, rwtd = 0;
  std::vector<PropertySummary> properties;
  double success_pct = 0;
  std::optional<HitRatios> hits;
};

struct MetricsOptions {
  double mode_reward_threshold = 0.5;
  double mode_similarity = 0.5;
  double circle_distance = 0.75;
  int fingerprint_radius = 2;
  int fingerprint_width = 2048;
  std::size_t num_scaffold_samples = 0;  // 0: all
  int workers = 1;
};

struct MetricsInputs {
  // Distance metrics on these conditionals; success percent too.
  std::vector<PropertySlot> conditionals;
  const std::set<std::string> *novelty_keys = nullptr;
  std::span<const Fingerprint> novelty_fps;
  const ScoreTable *scores = nullptr;
  HitCriteria hit;
};

inline MetricsReport evaluate_samples(const SampleSet &s,
                                      const PropertyCalculator &calc,
                                      const MetricsInputs &in,
                                      const MetricsOptions &o) {
  MetricsReport r;
  r.n = s.total;
  if (s.total == 0)
    return r;
  r.validity = static_cast<double>(s.size()) / s.total;
  SampleCache cache = build_cache(s, o.fingerprint_radius,
                                  o.fingerprint_width);
  std::set<std::string> distinct(cache.keys.begin(), cache.keys.end());
  r.uniqueness = static_cast<double>(distinct.size()) / s.total;
  if (in.novelty_keys != nullptr) {
    std::size_t novel = 0;
    for (const std::string &k: distinct)
      novel += in.novelty_keys->count(k) == 0;
    r.novelty = static_cast<double>(novel) / s.total;
  }
  if (s.size() >= 2)
    r.diversity = diversity(cache.fps, o.workers);
  r.n_modes = n_modes(cache.fps, s.rewards, cache.keys,
                      o.mode_reward_threshold, o.mode_similarity);
  r.n_circles = n_circles(cache.fps, s.rewards, cache.keys,
                          o.circle_distance);
  const std::size_t ns = o.num_scaffold_samples == 0
                             ? s.size()
                             : std::min(s.size(), o.num_scaffold_samples);
  r.n_scaffolds = n_scaffolds(std::span(s.molecules).first(ns));
  r.top1 = top_k_mean(s.rewards, 1);
  r.top10 = top_k_mean(s.rewards, 10);
  r.top100 = top_k_mean(s.rewards, 100);
  r.rw_c = r.top100 * r.n_circles;
  r.rw_s = r.top100 * r.n_scaffolds;
  r.rwtd = r.top100 * r.diversity;

  std::vector<std::vector<double>> values;
  for (const PropertySlot &slot: in.conditionals) {
    std::vector<double> v;
    for (const MolGraph &g: s.molecules)
      v.push_back(calc(slot.cond.property, g));
    PropertySummary ps { slot.cond.property.name, 0, l1_dist(v, slot) };
    if (!v.empty())
      ps.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    r.properties.push_back(ps);
    values.push_back(std::move(v));
  }
  if (!in.conditionals.empty())
    r.success_pct = success_pct(values, in.conditionals);
  if (in.scores != nullptr)
    r.hits = hit_ratios(s, cache, *in.scores, in.novelty_fps, calc, in.hit);
  return r;
}

// "key: value" lines: metric parameters first, then results. Absent
// optional metrics are written as "absent".
inline std::string format_report(const MetricsReport &r,
                                 const MetricsOptions &o,
                                 const MetricsInputs &in) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "# parameters\n"
      << "mode_reward_threshold: " << o.mode_reward_threshold << "\n"
      << "mode_similarity: " << o.mode_similarity << "\n"
      << "circle_distance: " << o.circle_distance << "\n"
      << "fingerprint_radius: " << o.fingerprint_radius << "\n"
      << "fingerprint_width: " << o.fingerprint_width << "\n"
      << "num_scaffold_samples: " << o.num_scaffold_samples << "\n"
      << "top_k: 100\n";
  if (in.scores != nullptr)
    out << "hit_score_threshold: " << in.hit.score_threshold << "\n"
        << "hit_qed: " << in.hit.qed << "\n"
        << "hit_sas: " << in.hit.sas << "\n"
        << "novel_hit_similarity: " << in.hit.novel_similarity << "\n";
  out << "# metrics\n"
      << "n: " << r.n << "\n"
      << "validity: " << r.validity << "\n"
      << "uniqueness: " << r.uniqueness << "\n"
      << "novelty: ";
  if (r.novelty)
    out << *r.novelty << "\n";
  else
    out << "absent\n";
  out << "diversity: " << r.diversity << "\n"
      << "n_modes: " << r.n_modes << "\n"
      << "n_circles: " << r.n_circles << "\n"
      << "n_scaffolds: " << r.n_scaffolds << "\n"
      << "top1: " << r.top1 << "\n"
      << "top10: " << r.top10 << "\n"
      << "top100: " << r.top100 << "\n"
      << "rw_c: " << r.rw_c << "\n"
      << "rw_s: " << r.rw_s << "\n"
      << "rwtd: " << r.rwtd << "\n"
      << "success_pct: " << r.success_pct << "\n";
  for (const PropertySummary &p: r.properties)
    out << "l1_dist." << p.name << ": " << p.l1_dist << "\n";
  if (r.hits) {
    out << "hit_ratio: " << r.hits->hit << "\n"
        << "novel_hit_ratio: " << r.hits->novel_hit << "\n"
        << "hit_unscored: " << r.hits->missing << "\n";
  } else {
    out << "hit_ratio: absent\nnovel_hit_ratio: absent\n";
  }
  return out.str();
}

// Tab-separated table: one row per property.
inline std::string format_property_table(const MetricsReport &r) {
  std::ostringstream out;
  out << std::setprecision(10) << "property\tmean\tl1_dist\n";
  for (const PropertySummary &p: r.properties)
    out << p.name << "\t" << p.mean << "\t" << p.l1_dist << "\n";
  return out.str();
}

}  // namespace agfn

#endif  // AGFN_METRICS_HPP_
