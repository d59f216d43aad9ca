//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "agfn/sampler.hpp"

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "agfn/config.hpp"

namespace agfn {
namespace {

const std::string kSource = AGFN_SOURCE_DIR;

struct Toy {
  RunConfig config = load_config(kSource + "/configs/toy.cfg");
  Policy policy { config.model, config.encoding_width() };
  std::vector<double> cond = std::vector<double>(config.encoding_width(), 0.5);

  explicit Toy(std::uint64_t seed) { policy.initialize(seed); }
};

// Depth-first walk over every action sequence with uniform choice.
void enumerate(const State &s, double p, const MdpConfig &cfg,
               std::map<std::string, double> &out) {
  if (s.terminal) {
    out[canonical_key(s.graph).text] += p;
    return;
  }
  std::vector<Action> acts = forward_actions(s, cfg);
  for (const Action &a: acts)
    enumerate(apply(s, a, cfg), p / acts.size(), cfg, out);
}

std::vector<std::string> keys_of(const std::vector<Trajectory> &ts) {
  std::vector<std::string> k;
  for (const Trajectory &t: ts)
    k.push_back(canonical_key(t.last().graph).text + "/"
                + std::to_string(t.length()));
  return k;
}

std::vector<Trajectory> draw(const Toy &toy, int n, std::uint64_t seed,
                             int workers, int chunk = 16) {
  std::vector<State> starts(n, empty_state());
  std::vector<std::vector<double>> conds(n, toy.cond);
  SamplingOptions opt;
  opt.chunk_size = chunk;
  std::mt19937_64 rng(seed);
  return sample_trajectories(toy.policy, toy.config.mdp, starts, conds, opt,
                             rng, workers);
}

TEST(SamplerTest, DeterministicAcrossWorkerCounts) {
  Toy toy(3);
  auto a = keys_of(draw(toy, 100, 9, 1));
  EXPECT_EQ(a, keys_of(draw(toy, 100, 9, 1)));
  EXPECT_EQ(a, keys_of(draw(toy, 100, 9, 3)));
  EXPECT_NE(a, keys_of(draw(toy, 100, 10, 1)));
}

TEST(SamplerTest, TrajectoriesAreValidAndReplay) {
  Toy toy(4);
  for (const Trajectory &t: draw(toy, 200, 1, 2)) {
    ASSERT_TRUE(t.terminal());
    EXPECT_TRUE(is_valid(t.last().graph, toy.config.mdp.limits));
    EXPECT_LE(t.length(), toy.config.mdp.max_traj_len);
    EXPECT_TRUE(replays(t, toy.config.mdp));
  }
}

TEST(SamplerTest, RandomStopEndsAtOnce) {
  Toy toy(5);
  std::vector<State> starts(20, empty_state());
  std::vector<std::vector<double>> conds(20, toy.cond);
  SamplingOptions opt;
  opt.random_stop_prob = 1;
  std::mt19937_64 rng(1);
  // Stop is illegal on the empty graph, so one atom is always placed first.
  for (const Trajectory &t: sample_trajectories(
           toy.policy, toy.config.mdp, starts, conds, opt, rng))
    EXPECT_EQ(t.length(), 2);
}

TEST(SamplerTest, BadOptions) {
  Toy toy(1);
  std::vector<State> starts(2, empty_state());
  std::vector<std::vector<double>> conds(1, toy.cond);
  std::mt19937_64 rng(1);
  EXPECT_THROW(sample_trajectories(toy.policy, toy.config.mdp, starts, conds,
                                   {}, rng),
               std::invalid_argument);
}

TEST(ExactDistributionTest, UniformPolicyMatchesEnumeration) {
  Toy toy(1);
  toy.policy.set_zero();
  auto exact = exact_terminal_distribution(toy.policy, toy.config.mdp,
                                           empty_state(), toy.cond);
  std::map<std::string, double> oracle;
  enumerate(empty_state(), 1.0, toy.config.mdp, oracle);
  ASSERT_EQ(exact.size(), oracle.size());
  for (const auto &[k, p]: oracle)
    EXPECT_NEAR(exact.at(k), p, 1e-12) << k;
}

TEST(ExactDistributionTest, MatchesSampledFrequencies) {
  Toy toy(7);
  auto exact = exact_terminal_distribution(toy.policy, toy.config.mdp,
                                           empty_state(), toy.cond);
  double total = 0;
  for (const auto &[k, p]: exact)
    total += p;
  EXPECT_NEAR(total, 1.0, 1e-9);

  const int n = 20000;
  std::map<std::string, double> freq;
  for (const Trajectory &t: draw(toy, n, 21, 1, 512))
    freq[canonical_key(t.last().graph).text] += 1.0 / n;
  for (const auto &[k, p]: exact) {
    const double sd = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(freq[k], p, 5 * sd + 1e-4) << k;
  }
}

}  // namespace
}  // namespace agfn
