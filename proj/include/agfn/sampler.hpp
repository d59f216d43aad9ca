//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_SAMPLER_HPP_
#define AGFN_SAMPLER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "agfn/canon.hpp"
#include "agfn/mdp.hpp"
#include "agfn/policy.hpp"
#include "agfn/smiles.hpp"

namespace agfn {

struct SamplingOptions {
  double random_action_prob = 0;
  double random_stop_prob = 0;
  double temperature = 1;
  // Trajectories evaluated per policy call.
  int chunk_size = 256;
};

namespace internal {

// Index drawn from exp(logp / temperature), renormalised.
inline int draw(std::span<const double> logp, double temperature,
                std::mt19937_64 &rng) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double l: logp)
    mx = std::max(mx, l / temperature);
  std::vector<double> w(logp.size());
  double total = 0;
  for (std::size_t i = 0; i < logp.size(); ++i) {
    w[i] = std::exp(logp[i] / temperature - mx);
    total += w[i];
  }
  double u = std::uniform_real_distribution<double>(0, total)(rng);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (u < w[i])
      return static_cast<int>(i);
    u -= w[i];
  }
  return static_cast<int>(w.size()) - 1;
}

// Rolls out trajectories [begin, end) together, one policy call per step.
inline void rollout_group(const Policy &policy, const MdpConfig &cfg,
                          std::span<Trajectory> out,
                          std::span<const std::vector<double> *const> conds,
                          const SamplingOptions &opt, std::mt19937_64 &rng) {
  std::vector<int> active(out.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    active[i] = static_cast<int>(i);
  std::uniform_real_distribution<double> unit(0, 1);
  while (!active.empty()) {
    std::vector<const State *> states;
    std::vector<const std::vector<double> *> cp;
    std::vector<std::vector<Action>> legal;
    for (int i: active) {
      states.push_back(&out[i].last());
      cp.push_back(conds[i]);
      legal.push_back(forward_actions(out[i].last(), cfg));
      if (legal.back().empty())
        throw MdpError("dead end: no forward action");
    }
    std::vector<PolicyQuery> qs;
    for (std::size_t q = 0; q < legal.size(); ++q)
      qs.push_back({ static_cast<int>(q), legal[q] });
    ad::Tape tape(false);
    Policy::Output res = policy.log_probs(tape, states, cp, qs);
    const ad::Mat &lp = tape.value(res.logp);

    std::vector<int> still;
    for (std::size_t q = 0; q < legal.size(); ++q) {
      const auto &acts = legal[q];
      int pick = -1;
      if (opt.random_stop_prob > 0 && unit(rng) < opt.random_stop_prob
          && acts.back().type == ActionType::stop)
        pick = static_cast<int>(acts.size()) - 1;
      else if (opt.random_action_prob > 0
               && unit(rng) < opt.random_action_prob)
        pick = std::uniform_int_distribution<int>(
            0, static_cast<int>(acts.size()) - 1)(rng);
      else
        pick = draw(std::span<const double>(lp.data() + res.offset[q],
                                            acts.size()),
                    opt.temperature, rng);
      Trajectory &t = out[active[q]];
      t.states.push_back(apply(t.last(), acts[pick], cfg));
      t.actions.push_back(acts[pick]);
      if (!t.last().terminal)
        still.push_back(active[q]);
    }
    active = std::move(still);
  }
}

}  // namespace internal

// Samples one trajectory per start state. Work is split into fixed chunks,
// each with its own generator seeded from `rng` in order, so results depend
// only on the seed and the chunk size, not on the worker count.
inline std::vector<Trajectory>
sample_trajectories(const Policy &policy, const MdpConfig &cfg,
                    std::span<const State> starts,
                    std::span<const std::vector<double>> conds,
                    const SamplingOptions &opt, std::mt19937_64 &rng,
                    int workers = 1) {
  if (starts.size() != conds.size())
    throw std::invalid_argument("one conditioning vector per start state");
  if (opt.chunk_size < 1 || workers < 1 || !(opt.temperature > 0))
    throw std::invalid_argument("bad sampling options");
  std::vector<Trajectory> out(starts.size());
  std::vector<const std::vector<double> *> cp;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    out[i].states.push_back(starts[i]);
    cp.push_back(&conds[i]);
  }
  const std::size_t n = starts.size();
  const std::size_t chunk = static_cast<std::size_t>(opt.chunk_size);
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<std::uint64_t> seeds(nchunks);
  for (auto &s: seeds)
    s = rng();

  auto run = [&](std::size_t c) {
    const std::size_t b = c * chunk, e = std::min(n, b + chunk);
    std::mt19937_64 local(seeds[c]);
    internal::rollout_group(
        policy, cfg, std::span<Trajectory>(out).subspan(b, e - b),
        std::span<const std::vector<double> *const>(cp).subspan(b, e - b), opt,
        local);
  };
  if (workers == 1 || nchunks <= 1) {
    for (std::size_t c = 0; c < nchunks; ++c)
      run(c);
    return out;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = static_cast<std::size_t>(w); c < nchunks;
             c += static_cast<std::size_t>(workers))
          run(c);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto &t: pool)
    t.join();
  for (auto &e: errors) {
    if (e)
      std::rethrow_exception(e);
  }
  return out;
}

// Exact probability of each terminal molecule (by canonical key) under the
// policy, by summing over all action sequences from s0. Only for tiny
// domains: the number of labelled states grows factorially.
inline std::map<std::string, double>
exact_terminal_distribution(const Policy &policy, const MdpConfig &cfg,
                            const State &s0, const std::vector<double> &cond) {
  // Forward sweep over states grouped by construction depth.
  std::map<std::string, double> out;
  std::vector<std::pair<State, double>> layer { { s0, 1.0 } };
  // Labelled identity: atoms in index order, then bonds in index order.
  auto key_of = [](const State &s) {
    std::string k = std::to_string(s.frozen) + ":" + std::to_string(s.base_steps);
    for (int v = 0; v < s.graph.num_atoms(); ++v) {
      k += ";" + std::to_string(element_index(s.graph.atom(v).element)) + ","
           + std::to_string(static_cast<int>(s.graph.atom(v).chirality));
    }
    for (const Bond &b: s.graph.bonds())
      k += "|" + std::to_string(b.u) + "-" + std::to_string(b.v) + ":"
           + std::to_string(order_value(b.order));
    return k;
  };
  while (!layer.empty()) {
    std::vector<const State *> states;
    std::vector<const std::vector<double> *> cp;
    std::vector<std::vector<Action>> legal;
    for (const auto &[s, p]: layer) {
      states.push_back(&s);
      cp.push_back(&cond);
      legal.push_back(forward_actions(s, cfg));
    }
    std::vector<PolicyQuery> qs;
    for (std::size_t q = 0; q < legal.size(); ++q)
      qs.push_back({ static_cast<int>(q), legal[q] });
    ad::Tape tape(false);
    Policy::Output res = policy.log_probs(tape, states, cp, qs);
    const ad::Mat &lp = tape.value(res.logp);
    std::map<std::string, std::pair<State, double>> next;
    for (std::size_t q = 0; q < legal.size(); ++q) {
      for (std::size_t j = 0; j < legal[q].size(); ++j) {
        const double p
            = layer[q].second * std::exp(lp(res.offset[q] + j, 0));
        State t = apply(layer[q].first, legal[q][j], cfg);
        if (t.terminal) {
          out[canonical_key(t.graph).text] += p;
          continue;
        }
        auto [it, fresh] = next.try_emplace(key_of(t), std::move(t), 0.0);
        it->second.second += p;
      }
    }
    layer.clear();
    for (auto &[k, v]: next)
      layer.push_back(std::move(v));
  }
  return out;
}

}  // namespace agfn

#endif  // AGFN_SAMPLER_HPP_
