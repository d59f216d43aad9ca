//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_COMMANDS_HPP_
#define AGFN_COMMANDS_HPP_

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "agfn/checkpoint.hpp"
#include "agfn/config.hpp"
#include "agfn/descriptors.hpp"
#include "agfn/metrics.hpp"
#include "agfn/policy.hpp"
#include "agfn/reward.hpp"
#include "agfn/sampler.hpp"
#include "agfn/smiles.hpp"
#include "agfn/trainer.hpp"

namespace agfn::cli {

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kDataError = 3,
  kNumericError = 4,
};

struct Options {
  std::string config;
  std::string checkpoint;  // sample: model to load
  std::string prior;       // finetune: pretrained model
  std::string objective = "tb";
  std::string seed_scaffold;
  std::string samples;  // evaluate: input
  std::string out;
  std::optional<long> n;
  std::optional<int> workers;
  bool strict = false;
  bool force = false;
  bool resume = false;
};

// Everything a command needs beyond the config file.
struct Environment {
  RunConfig config;
  PropertyCalculator calc;
  std::map<std::string, ScoreTable> tables;
  const ScoreTable *task_table = nullptr;
};

inline std::unique_ptr<Environment> load_environment(const Options &o) {
  auto env = std::make_unique<Environment>();
  env->config = o.config.empty() ? default_config() : load_config(o.config);
  if (o.workers) {
    if (*o.workers < 1)
      throw ConfigError("--workers must be positive");
    env->config.training.num_workers = *o.workers;
  }
  for (const auto &[name, path]: env->config.data.score_tables) {
    try {
      env->tables[name] = ScoreTable::load_file(path);
    } catch (const ScoreTableError &e) {
      throw DataError(e.what());
    }
    env->calc.add_table(name, env->tables[name]);
  }
  if (!env->config.task.score_table.empty())
    env->task_table = &env->tables.at(env->config.task.score_table);
  return env;
}

inline State start_state(const std::string &scaffold, const MdpConfig &cfg) {
  if (scaffold.empty())
    return empty_state();
  try {
    return seed_state(parse_smiles(scaffold), cfg);
  } catch (const std::exception &e) {
    throw DataError("seed scaffold '" + scaffold + "': " + e.what());
  }
}

inline Checkpoint load_model(const std::string &path, const RunConfig &c,
                             bool force) {
  Checkpoint ck;
  try {
    ck = load_checkpoint(path);
  } catch (const CheckpointError &e) {
    throw DataError(e.what());
  }
  try {
    check_config_hash(ck, config_hash(c), force);
  } catch (const CheckpointError &e) {
    throw ConfigError(e.what());
  }
  return ck;
}

inline std::ofstream open_output(const std::string &path,
                                 std::ios::openmode mode = std::ios::trunc) {
  const std::filesystem::path p(path);
  if (p.has_parent_path())
    std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::out | mode);
  if (!out)
    throw DataError("cannot write " + path);
  return out;
}

inline void report_dataset(const OfflineData &d, const std::string &path,
                           std::ostream &err) {
  err << "dataset " << path << ": " << d.molecules.size() << " usable, "
      << d.malformed << " malformed, " << d.out_of_limits
      << " over graph limits, " << d.disallowed << " outside the action space, "
      << d.over_budget << " over the trajectory budget\n";
}

inline int train(const Options &o, TrainMode mode, std::ostream &err) {
  auto env = load_environment(o);
  RunConfig &c = env->config;
  const bool needs_data = c.training.online_offline_mix_ratio < 1;
  if (needs_data && c.data.dataset.empty())
    throw ConfigError("training.online_offline_mix_ratio < 1 needs "
                      "data.dataset");
  OfflineData data;
  if (needs_data) {
    data = load_offline_data(c.data.dataset, c.mdp);
    report_dataset(data, c.data.dataset, err);
    if (data.molecules.empty())
      throw DataError("no usable molecules in " + c.data.dataset);
  }
  const State s0 = start_state(o.seed_scaffold, c.mdp);

  Policy policy(c.model, c.encoding_width());
  policy.initialize(c.training.random_seed);
  std::optional<Policy> prior;
  if (mode == TrainMode::finetune_tb || mode == TrainMode::finetune_rtb) {
    Checkpoint ck = load_model(o.prior, c, o.force);
    restore_params(policy.params(), ck);
    if (mode == TrainMode::finetune_rtb)
      prior = policy;
    std::mt19937_64 noise(c.training.random_seed);
    recalibrate_log_z(policy, c.training.logz_noise_sigma, noise);
  }

  RewardModel reward { &env->calc, {} };
  if (mode != TrainMode::pretrain)
    reward.external = task_reward(c, env->calc, env->task_table);
  Trainer trainer(c, mode, policy, prior ? &*prior : nullptr, reward,
                  needs_data ? &data : nullptr, s0);

  const std::string dir = c.io.checkpoint_dir;
  if (o.resume) {
    const std::string last = dir + "/last.ckpt";
    Checkpoint ck = load_model(last, c, o.force);
    trainer.resume(ck);
    err << "resuming from " << last << " at step " << ck.step << "\n";
  }
  std::ofstream log = open_output(c.io.log_path, o.resume ? std::ios::app
                                                          : std::ios::trunc);
  try {
    trainer.run(&log, dir);
  } catch (const NumericError &e) {
    err << e.what();
    if (!dir.empty()) {
      std::ofstream dump = open_output(dir + "/nonfinite_dump.txt");
      dump << e.what();
    }
    return kNumericError;
  }
  err << train_mode_name(mode) << ": " << trainer.step_count()
      << " steps, checkpoints in " << dir << "\n";
  return kOk;
}

inline int pretrain(const Options &o, std::ostream &err) {
  return train(o, TrainMode::pretrain, err);
}

// Without a prior this trains a task model from scratch.
inline int finetune(const Options &o, std::ostream &err) {
  if (o.objective != "tb" && o.objective != "rtb")
    throw ConfigError("--objective must be tb or rtb");
  if (o.prior.empty()) {
    if (o.objective == "rtb")
      throw ConfigError("--objective rtb needs --prior");
    return train(o, TrainMode::tasktrain, err);
  }
  return train(o, o.objective == "rtb" ? TrainMode::finetune_rtb
                                       : TrainMode::finetune_tb,
               err);
}

// Properties written next to each sample: conditionals, then task
// properties.
inline std::vector<PropertyId> sample_columns(const RunConfig &c) {
  std::vector<PropertyId> cols;
  for (const PropertySlot &s: c.conditionals.slots)
    cols.push_back(s.cond.property);
  for (const PropertySlot &s: c.task.slots) {
    if (std::find(cols.begin(), cols.end(), s.cond.property) == cols.end())
      cols.push_back(s.cond.property);
  }
  return cols;
}

inline std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(8) << v;
  return s.str();
}

inline int sample(const Options &o, std::ostream &err) {
  auto env = load_environment(o);
  RunConfig &c = env->config;
  if (o.checkpoint.empty())
    throw ConfigError("sample needs --checkpoint");
  if (o.out.empty())
    throw ConfigError("sample needs --out");
  const long n = o.n.value_or(c.sample.n);
  if (n < 0)
    throw ConfigError("--n must be non-negative");
  Policy policy(c.model, c.encoding_width());
  restore_params(policy.params(), load_model(o.checkpoint, c, o.force));
  const State s0 = start_state(o.seed_scaffold, c.mdp);
  ConditioningContext ctx = base_context(c);
  RewardModel reward { &env->calc,
                       task_reward(c, env->calc, env->task_table) };
  const std::vector<PropertyId> cols = sample_columns(c);

  SamplingOptions opt;
  opt.temperature = c.training.sample_temp;
  opt.chunk_size = c.training.sampling_batch_size;
  std::mt19937_64 rng(c.training.random_seed);
  std::ofstream out = open_output(o.out);
  const long cap = n * c.sample.attempt_factor;
  std::set<std::string> seen;
  long written = 0, drawn = 0;
  while (written < n) {
    if (c.sample.unique_filter && drawn >= cap)
      throw DataError("unique filter: " + std::to_string(written) + " of "
                      + std::to_string(n) + " distinct molecules after "
                      + std::to_string(drawn) + " attempts");
    long batch = n - written;
    if (c.sample.unique_filter)
      batch = std::min(batch, cap - drawn);
    std::vector<State> starts(batch, s0);
    std::vector<std::vector<double>> conds(batch, ctx.encoding);
    std::vector<Trajectory> ts = sample_trajectories(
        policy, c.mdp, starts, conds, opt, rng, c.training.num_workers);
    drawn += batch;
    for (const Trajectory &t: ts) {
      const MolGraph &g = t.last().graph;
      const CanonicalKey key = canonical_key(g);
      if (c.sample.unique_filter && !seen.insert(key.text).second)
        continue;
      out << key.text << "\t"
          << format_number(
                 aggregate_reward(g, ctx, env->calc, reward.external));
      for (const PropertyId &p: cols)
        out << "\t" << format_number(env->calc(p, g));
      out << "\n";
      ++written;
    }
  }
  err << "wrote " << written << " samples to " << o.out << "\n";
  return kOk;
}

// Sample file rows: SMILES, reward, ignored property columns.
inline SampleSet read_samples(const std::string &path, bool strict,
                              const GraphLimits &limits, std::ostream &err) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open samples " + path);
  SampleSet s;
  std::string line;
  std::size_t lineno = 0, bad = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream ls(line);
    std::string smi, rew;
    std::getline(ls, smi, '\t');
    std::getline(ls, rew, '\t');
    std::string why;
    double r = 0;
    const char *end = rew.data() + rew.size();
    auto [ptr, ec] = std::from_chars(rew.data(), end, r);
    if (rew.empty() || ec != std::errc() || ptr != end || !std::isfinite(r)) {
      why = "bad reward column";
    } else {
      try {
        MolGraph g = parse_smiles(smi);
        if (auto e = validation_error(g, limits))
          why = *e;
        else
          s.add(std::move(g), r);
      } catch (const SmilesError &e) {
        why = e.what();
      }
    }
    if (!why.empty()) {
      const std::string msg = path + ":" + std::to_string(lineno) + ": " + why;
      if (strict)
        throw DataError(msg);
      if (++bad <= 10)
        err << msg << "\n";
      s.add_invalid();
    }
  }
  return s;
}

inline double parse_threshold(const RunConfig &c,
                              const std::map<std::string, ScoreTable> &tables) {
  const std::string &v = c.metrics.actives_median;
  double x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec == std::errc() && ptr == v.data() + v.size())
    return x;
  auto it = tables.find(v);
  if (it == tables.end())
    throw ConfigError("metrics.actives_median: neither a number nor a score "
                      "table name: " + v);
  return it->second.median();
}

inline int evaluate(const Options &o, std::ostream &out, std::ostream &err) {
  auto env = load_environment(o);
  RunConfig &c = env->config;
  if (o.samples.empty())
    throw ConfigError("evaluate needs a samples file");
  SampleSet s = read_samples(o.samples, o.strict, c.mdp.limits, err);

  MetricsOptions mo;
  mo.mode_reward_threshold = c.metrics.mode_reward_threshold;
  mo.mode_similarity = c.metrics.mode_similarity;
  mo.circle_distance = c.metrics.circle_distance;
  mo.fingerprint_radius = c.metrics.fingerprint_radius;
  mo.fingerprint_width = c.metrics.fingerprint_width;
  mo.num_scaffold_samples
      = static_cast<std::size_t>(c.metrics.num_scaffold_samples);
  mo.workers = c.training.num_workers;

  MetricsInputs in;
  in.conditionals = c.conditionals.slots;
  for (const PropertySlot &t: c.task.slots)
    in.conditionals.push_back(t);
  std::set<std::string> ref_keys;
  std::vector<Fingerprint> ref_fps;
  if (!c.data.novelty_reference.empty()) {
    DatasetReport ref = read_smiles_file(c.data.novelty_reference, false);
    for (const SmilesRecord &r: ref.molecules) {
      ref_keys.insert(canonical_key(r.graph).text);
      ref_fps.push_back(fingerprint(r.graph, mo.fingerprint_radius,
                                    mo.fingerprint_width));
    }
    in.novelty_keys = &ref_keys;
    in.novelty_fps = ref_fps;
  }
  if (env->task_table != nullptr && !c.metrics.actives_median.empty()) {
    in.scores = env->task_table;
    in.hit.score_threshold = parse_threshold(c, env->tables);
    in.hit.qed = c.metrics.hit_qed;
    in.hit.sas = c.metrics.hit_sas;
    in.hit.novel_similarity = c.metrics.novel_hit_similarity;
  }
  MetricsReport r = evaluate_samples(s, env->calc, in, mo);
  const std::string text = format_report(r, mo, in);
  const std::string table = format_property_table(r);
  if (o.out.empty()) {
    out << text << "\n" << table;
  } else {
    open_output(o.out) << text;
    open_output(o.out + ".tsv") << table;
  }
  return kOk;
}

// Runs `body`, mapping failures to exit codes.
template <class F>
int guarded(F &&body, std::ostream &err) {
  try {
    return body();
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericError &e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const DataError &e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const SmilesError &e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const ScoreTableError &e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const CheckpointError &e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace agfn::cli

#endif  // AGFN_COMMANDS_HPP_
