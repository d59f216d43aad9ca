//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_CONFIG_HPP_
#define AGFN_CONFIG_HPP_

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agfn/element.hpp"
#include "agfn/mdp.hpp"
#include "agfn/policy.hpp"
#include "agfn/reward.hpp"

namespace agfn {

class ConfigError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  long max_num_iter = 500000;
  bool bootstrap_own_reward = false;
  std::uint64_t random_seed = 1428570;
  double beta = 96;
  bool gfn_batch_shuffle = false;
  int sampling_batch_size = 2048;
  int training_batch_size = 64;
  double learning_rate = 1e-4;
  double online_offline_mix_ratio = 0.5;
  int num_workers = 1;
  double gfn_loss_coeff = 0.04;  // lambda1
  double mle_coeff = 20;         // lambda2
  double illegal_action_logreward = kIllegalLogReward;
  double reward_loss_multiplier = 1;
  double weight_decay = 1e-8;
  int num_data_loader_workers = 1;
  double momentum = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double lr_decay = 20000;
  double z_lr_decay = 20000;
  std::string clip_grad_type = "norm";
  double clip_grad_param = 10;
  double random_action_prob = 0.001;
  double random_stop_prob = 0.001;
  double sample_temp = 1;
  long checkpoint_every = 1000;
  double z_learning_rate = 1e-3;
  // Std of the noise added to the log Z output when finetuning starts.
  double logz_noise_sigma = 0.1;
};

struct ConditionalsConfig {
  std::vector<PropertySlot> slots;
  // Sample fresh ranges per trajectory; otherwise the listed ranges are used
  // as they are.
  bool sample = true;
  double oob_percent = 0.1;
  double sigma_fraction = 0.05;
  double zinc_rad_scale = 1;
  std::string reward_aggregation = "mul";
};

// Finetuning reward R_ext: product of task property rewards and an
// optional external score table.
struct TaskConfig {
  std::vector<PropertySlot> slots;
  std::string score_table;
  double missing_score = 0;
};

struct DataConfig {
  std::string dataset;
  std::string novelty_reference;
  // name:path pairs.
  std::vector<std::pair<std::string, std::string>> score_tables;
};

struct IoConfig {
  std::string checkpoint_dir = "checkpoints";
  std::string log_path = "train.log";
  bool log_wall_time = true;
};

struct MetricsConfig {
  double mode_reward_threshold = 0.5;
  double mode_similarity = 0.5;
  double circle_distance = 0.75;
  int fingerprint_radius = 2;
  int fingerprint_width = 2048;
  int num_scaffold_samples = 0;  // 0 uses all samples
  double hit_qed = 0.5;
  double hit_sas = 5;
  double novel_hit_similarity = 0.4;
  std::string actives_median;  // empty: hit ratios absent
};

struct SampleConfig {
  long n = 1000;
  bool unique_filter = false;
  int attempt_factor = 10;
};

struct RunConfig {
  ModelConfig model;
  int num_thermometer_dim = 16;
  MdpConfig mdp;
  int num_back_steps_max = 25;
  ConditionalsConfig conditionals;
  TaskConfig task;
  TrainConfig training;
  DataConfig data;
  IoConfig io;
  MetricsConfig metrics;
  SampleConfig sample;

  int encoding_width() const {
    return agfn::encoding_width(static_cast<int>(conditionals.slots.size()),
                                num_thermometer_dim);
  }
};

namespace internal {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty())
    return out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep))
    out.push_back(trim(part));
  return out;
}

inline std::string fmt_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string &key, const std::string &v) {
  double out = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

template <class I>
I parse_int(const std::string &key, const std::string &v) {
  I out = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError(key + ": not an integer: '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "TRUE" || v == "1")
    return true;
  if (v == "false" || v == "FALSE" || v == "0")
    return false;
  throw ConfigError(key + ": not a boolean: '" + v + "'");
}

struct Field {
  std::string key;
  std::function<std::string()> get;
  std::function<void(const std::string &)> set;
};

inline Field f_double(std::string key, double &x) {
  return { key, [&x] { return fmt_double(x); },
           [&x, key](const std::string &v) { x = parse_double(key, v); } };
}

template <class I>
Field f_int(std::string key, I &x) {
  return { key, [&x] { return std::to_string(x); },
           [&x, key](const std::string &v) { x = parse_int<I>(key, v); } };
}

inline Field f_bool(std::string key, bool &x) {
  return { key, [&x] { return std::string(x ? "true" : "false"); },
           [&x, key](const std::string &v) { x = parse_bool(key, v); } };
}

inline Field f_string(std::string key, std::string &x) {
  return { key, [&x] { return x; }, [&x](const std::string &v) { x = v; } };
}

inline std::string element_list(unsigned mask) {
  std::string out;
  for (int e = 0; e < kNumElements; ++e) {
    if ((mask >> e) & 1U) {
      if (!out.empty())
        out += ",";
      out += symbol(element_from_index(e));
    }
  }
  return out;
}

inline unsigned parse_element_list(const std::string &key,
                                   const std::string &v) {
  unsigned mask = 0;
  for (const std::string &s: split(v, ',')) {
    auto e = element_from_symbol(s);
    if (!e)
      throw ConfigError(key + ": unknown element '" + s + "'");
    mask |= 1U << element_index(*e);
  }
  if (mask == 0)
    throw ConfigError(key + ": no elements");
  return mask;
}

inline std::string property_list(const std::vector<PropertySlot> &slots) {
  std::string out;
  for (const PropertySlot &s: slots) {
    if (!out.empty())
      out += ",";
    out += s.cond.property.name;
  }
  return out;
}

inline std::vector<PropertySlot> parse_property_list(const std::string &v) {
  std::vector<PropertySlot> out;
  for (const std::string &name: split(v, ',')) {
    PropertyId id = property_from_name(name);
    PropertySlot s = default_slot(id.kind);
    s.cond.property = id;
    for (const PropertySlot &o: out) {
      if (o.cond.property.name == id.name)
        throw ConfigError("property listed twice: " + name);
    }
    out.push_back(s);
  }
  return out;
}

inline void slot_fields(std::vector<Field> &f, const std::string &prefix,
                        PropertySlot &s) {
  const std::string p = prefix + s.cond.property.name + ".";
  f.push_back(f_double(p + "c_low", s.cond.c_low));
  f.push_back(f_double(p + "c_high", s.cond.c_high));
  f.push_back(f_int(p + "d", s.cond.d));
  f.push_back(f_double(p + "lambda", s.cond.lambda));
  f.push_back(f_double(p + "c_min", s.bounds.c_min));
  f.push_back(f_double(p + "c_max", s.bounds.c_max));
  f.push_back(f_double(p + "c_min_star", s.bounds.c_min_star));
  f.push_back(f_double(p + "c_max_star", s.bounds.c_max_star));
}

// Every key except the per-property ones, which depend on the lists.
inline std::vector<Field> fields(RunConfig &c) {
  std::vector<Field> f;
  ModelConfig &m = c.model;
  f.push_back(f_int("model.num_layers", m.num_layers));
  f.push_back(f_int("model.num_emb", m.num_emb));
  f.push_back(f_int("model.num_heads", m.num_heads));
  f.push_back(f_int("model.num_mlp_layers", m.num_mlp_layers));
  f.push_back(f_int("model.i2h_width", m.i2h_width));
  f.push_back(f_bool("model.tb_p_b_is_parameterized", m.parameterize_pb));
  f.push_back(f_int("model.num_thermometer_dim", c.num_thermometer_dim));

  MdpConfig &d = c.mdp;
  f.push_back(f_int("mdp.max_nodes", d.limits.max_nodes));
  f.push_back(f_int("mdp.max_edges", d.limits.max_edges));
  f.push_back(f_int("mdp.max_traj_len", d.max_traj_len));
  f.push_back(f_int("mdp.num_back_steps_max", c.num_back_steps_max));
  f.push_back(f_bool("mdp.allow_chirality", d.allow_chirality));
  f.push_back(f_int("mdp.max_bond_order", d.max_bond_order));
  f.push_back({ "mdp.elements", [&d] { return element_list(d.element_mask); },
                [&d](const std::string &v) {
                  d.element_mask = parse_element_list("mdp.elements", v);
                } });

  ConditionalsConfig &k = c.conditionals;
  f.push_back({ "conditionals.properties",
                [&k] { return property_list(k.slots); },
                [&k](const std::string &v) { k.slots = parse_property_list(v); } });
  f.push_back(f_bool("conditionals.sample", k.sample));
  f.push_back(f_double("conditionals.oob_percent", k.oob_percent));
  f.push_back(f_double("conditionals.sigma_fraction", k.sigma_fraction));
  f.push_back(f_double("conditionals.zinc_rad_scale", k.zinc_rad_scale));
  f.push_back(f_string("conditionals.reward_aggregation",
                       k.reward_aggregation));

  TaskConfig &t = c.task;
  f.push_back({ "task.properties", [&t] { return property_list(t.slots); },
                [&t](const std::string &v) { t.slots = parse_property_list(v); } });
  f.push_back(f_string("task.score_table", t.score_table));
  f.push_back(f_double("task.missing_score", t.missing_score));

  TrainConfig &r = c.training;
  f.push_back(f_int("training.max_num_iter", r.max_num_iter));
  f.push_back(f_bool("training.bootstrap_own_reward", r.bootstrap_own_reward));
  f.push_back(f_int("training.random_seed", r.random_seed));
  f.push_back(f_double("training.beta", r.beta));
  f.push_back(f_bool("training.gfn_batch_shuffle", r.gfn_batch_shuffle));
  f.push_back(f_int("training.sampling_batch_size", r.sampling_batch_size));
  f.push_back(f_int("training.training_batch_size", r.training_batch_size));
  f.push_back(f_double("training.learning_rate", r.learning_rate));
  f.push_back(f_double("training.online_offline_mix_ratio",
                       r.online_offline_mix_ratio));
  f.push_back(f_int("training.num_workers", r.num_workers));
  f.push_back(f_double("training.gfn_loss_coeff", r.gfn_loss_coeff));
  f.push_back(f_double("training.mle_coeff", r.mle_coeff));
  f.push_back(f_double("training.illegal_action_logreward",
                       r.illegal_action_logreward));
  f.push_back(f_double("training.reward_loss_multiplier",
                       r.reward_loss_multiplier));
  f.push_back(f_double("training.weight_decay", r.weight_decay));
  f.push_back(f_int("training.num_data_loader_workers",
                    r.num_data_loader_workers));
  f.push_back(f_double("training.momentum", r.momentum));
  f.push_back(f_double("training.adam_beta2", r.adam_beta2));
  f.push_back(f_double("training.adam_eps", r.adam_eps));
  f.push_back(f_double("training.lr_decay", r.lr_decay));
  f.push_back(f_double("training.z_lr_decay", r.z_lr_decay));
  f.push_back(f_string("training.clip_grad_type", r.clip_grad_type));
  f.push_back(f_double("training.clip_grad_param", r.clip_grad_param));
  f.push_back(f_double("training.random_action_prob", r.random_action_prob));
  f.push_back(f_double("training.random_stop_prob", r.random_stop_prob));
  f.push_back(f_double("training.sample_temp", r.sample_temp));
  f.push_back(f_int("training.checkpoint_every", r.checkpoint_every));
  f.push_back(f_double("training.z_learning_rate", r.z_learning_rate));
  f.push_back(f_double("training.logz_noise_sigma", r.logz_noise_sigma));

  DataConfig &a = c.data;
  f.push_back(f_string("data.dataset", a.dataset));
  f.push_back(f_string("data.novelty_reference", a.novelty_reference));
  f.push_back({ "data.score_tables",
                [&a] {
                  std::string out;
                  for (const auto &[n, p]: a.score_tables)
                    out += (out.empty() ? "" : ",") + n + ":" + p;
                  return out;
                },
                [&a](const std::string &v) {
                  a.score_tables.clear();
                  for (const std::string &item: split(v, ',')) {
                    const auto colon = item.find(':');
                    if (colon == std::string::npos || colon == 0)
                      throw ConfigError("data.score_tables: expected "
                                        "name:path, got '" + item + "'");
                    a.score_tables.emplace_back(trim(item.substr(0, colon)),
                                                trim(item.substr(colon + 1)));
                  }
                } });

  IoConfig &io = c.io;
  f.push_back(f_string("io.checkpoint_dir", io.checkpoint_dir));
  f.push_back(f_string("io.log_path", io.log_path));
  f.push_back(f_bool("io.log_wall_time", io.log_wall_time));

  MetricsConfig &mc = c.metrics;
  f.push_back(f_double("metrics.mode_reward_threshold",
                       mc.mode_reward_threshold));
  f.push_back(f_double("metrics.mode_similarity", mc.mode_similarity));
  f.push_back(f_double("metrics.circle_distance", mc.circle_distance));
  f.push_back(f_int("metrics.fingerprint_radius", mc.fingerprint_radius));
  f.push_back(f_int("metrics.fingerprint_width", mc.fingerprint_width));
  f.push_back(f_int("metrics.num_scaffold_samples", mc.num_scaffold_samples));
  f.push_back(f_double("metrics.hit_qed", mc.hit_qed));
  f.push_back(f_double("metrics.hit_sas", mc.hit_sas));
  f.push_back(f_double("metrics.novel_hit_similarity",
                       mc.novel_hit_similarity));
  f.push_back(f_string("metrics.actives_median", mc.actives_median));

  SampleConfig &s = c.sample;
  f.push_back(f_int("sample.n", s.n));
  f.push_back(f_bool("sample.unique_filter", s.unique_filter));
  f.push_back(f_int("sample.attempt_factor", s.attempt_factor));
  return f;
}

inline std::vector<Field> all_fields(RunConfig &c) {
  std::vector<Field> f = fields(c);
  for (PropertySlot &s: c.conditionals.slots)
    slot_fields(f, "conditionals.", s);
  for (PropertySlot &s: c.task.slots)
    slot_fields(f, "task.", s);
  return f;
}

}  // namespace internal

inline void validate(const RunConfig &c) {
  try {
    c.model.validate();
  } catch (const PolicyError &e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  if (c.num_thermometer_dim < 2)
    throw ConfigError("model.num_thermometer_dim must be at least 2");
  if (c.mdp.limits.max_nodes < 1 || c.mdp.limits.max_edges < 0
      || c.mdp.max_traj_len < 2)
    throw ConfigError("mdp caps must be positive");
  if (c.mdp.max_bond_order < 1 || c.mdp.max_bond_order > 3)
    throw ConfigError("mdp.max_bond_order must be 1, 2 or 3");
  if (c.num_back_steps_max < 1)
    throw ConfigError("mdp.num_back_steps_max must be positive");
  if (c.conditionals.slots.empty())
    throw ConfigError("conditionals.properties is empty");
  if (c.conditionals.oob_percent < 0 || c.conditionals.oob_percent > 1)
    throw ConfigError("conditionals.oob_percent must lie in [0, 1]");
  if (!(c.conditionals.sigma_fraction > 0))
    throw ConfigError("conditionals.sigma_fraction must be positive");
  if (!(c.conditionals.zinc_rad_scale > 0))
    throw ConfigError("conditionals.zinc_rad_scale must be positive");
  if (c.conditionals.reward_aggregation != "mul")
    throw ConfigError("conditionals.reward_aggregation: only 'mul' is "
                      "supported");
  for (const auto *list: { &c.conditionals.slots, &c.task.slots }) {
    for (const PropertySlot &s: *list) {
      try {
        s.cond.validate();
        s.bounds.validate();
      } catch (const RewardError &e) {
        throw ConfigError(s.cond.property.name + ": " + e.what());
      }
    }
  }
  const TrainConfig &t = c.training;
  if (t.bootstrap_own_reward)
    throw ConfigError("training.bootstrap_own_reward is not supported");
  if (!(t.beta > 0))
    throw ConfigError("training.beta must be positive");
  if (t.online_offline_mix_ratio < 0 || t.online_offline_mix_ratio > 1)
    throw ConfigError("training.online_offline_mix_ratio must lie in [0, 1]");
  if (!(t.learning_rate > 0) || !(t.z_learning_rate > 0))
    throw ConfigError("learning rates must be positive");
  if (!(t.lr_decay > 0) || !(t.z_lr_decay > 0))
    throw ConfigError("decay horizons must be positive");
  if (t.training_batch_size < 1 || t.sampling_batch_size < 1)
    throw ConfigError("batch sizes must be positive");
  if (t.num_workers < 1 || t.num_data_loader_workers < 1)
    throw ConfigError("worker counts must be positive");
  if (t.max_num_iter < 0 || t.checkpoint_every < 1)
    throw ConfigError("training.max_num_iter >= 0 and checkpoint_every >= 1");
  if (t.clip_grad_type != "norm" && t.clip_grad_type != "value")
    throw ConfigError("training.clip_grad_type must be 'norm' or 'value'");
  if (!(t.clip_grad_param > 0))
    throw ConfigError("training.clip_grad_param must be positive");
  for (double p: { t.random_action_prob, t.random_stop_prob }) {
    if (p < 0 || p > 1)
      throw ConfigError("exploration probabilities must lie in [0, 1]");
  }
  if (!(t.sample_temp > 0))
    throw ConfigError("training.sample_temp must be positive");
  if (!(t.momentum >= 0 && t.momentum < 1 && t.adam_beta2 >= 0
        && t.adam_beta2 < 1 && t.adam_eps > 0 && t.weight_decay >= 0))
    throw ConfigError("bad optimiser constants");
  if (t.logz_noise_sigma < 0)
    throw ConfigError("training.logz_noise_sigma must be non-negative");
  if (!(t.illegal_action_logreward < 0))
    throw ConfigError("training.illegal_action_logreward must be negative");
  const MetricsConfig &m = c.metrics;
  if (!(m.circle_distance > 0 && m.circle_distance < 1))
    throw ConfigError("metrics.circle_distance must lie in (0, 1)");
  if (m.fingerprint_width < 1 || m.fingerprint_radius < 0)
    throw ConfigError("bad fingerprint parameters");
  if (c.sample.n < 0 || c.sample.attempt_factor < 1)
    throw ConfigError("bad sample settings");
  if (!c.task.score_table.empty()) {
    bool found = false;
    for (const auto &[name, path]: c.data.score_tables)
      found |= name == c.task.score_table;
    if (!found)
      throw ConfigError("task.score_table names an unknown table: "
                        + c.task.score_table);
  }
}

// Built-in settings: desk-scale model, pretraining conditionals.
inline RunConfig default_config() {
  RunConfig c;
  c.conditionals.slots = default_pretraining_context(c.num_thermometer_dim).slots;
  return c;
}

// Flat "section.key = value" text; '#' starts a comment. Property lists are
// applied before their per-property keys regardless of line order.
inline RunConfig parse_config(std::istream &in, const std::string &origin,
                              RunConfig c = default_config()) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.resize(hash);
    if (internal::trim(line).empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno)
                        + ": expected 'key = value'");
    std::string key = internal::trim(std::string_view(line).substr(0, eq));
    std::string value = internal::trim(std::string_view(line).substr(eq + 1));
    for (const auto &[k, v]: kv) {
      if (k == key)
        throw ConfigError(origin + ":" + std::to_string(lineno)
                          + ": duplicate key " + key);
    }
    kv.emplace_back(std::move(key), std::move(value));
  }
  try {
    for (const char *list: { "conditionals.properties", "task.properties" }) {
      for (const auto &[k, v]: kv) {
        if (k == list) {
          for (internal::Field &f: internal::fields(c)) {
            if (f.key == k)
              f.set(v);
          }
        }
      }
    }
    std::vector<internal::Field> fs = internal::all_fields(c);
    for (const auto &[k, v]: kv) {
      if (k == "conditionals.properties" || k == "task.properties")
        continue;
      bool known = false;
      for (internal::Field &f: fs) {
        if (f.key == k) {
          f.set(v);
          known = true;
          break;
        }
      }
      if (!known)
        throw ConfigError("unknown key " + k);
    }
  } catch (const ConfigError &e) {
    throw ConfigError(origin + ": " + e.what());
  } catch (const std::invalid_argument &e) {
    throw ConfigError(origin + ": " + e.what());
  }
  validate(c);
  return c;
}

inline RunConfig parse_config_string(const std::string &text) {
  std::istringstream in(text);
  return parse_config(in, "<string>");
}

inline RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config " + path);
  return parse_config(in, path);
}

inline std::string write_config(const RunConfig &config) {
  RunConfig c = config;
  std::string out;
  for (const internal::Field &f: internal::all_fields(c))
    out += f.key + " = " + f.get() + "\n";
  return out;
}

// FNV-1a over the keys that fix the parameter shapes and their meaning:
// model, mdp and the conditioning layout.
inline std::uint64_t config_hash(const RunConfig &config) {
  RunConfig c = config;
  std::uint64_t h = 1469598103934665603ULL;
  for (const internal::Field &f: internal::fields(c)) {
    if (!(f.key.starts_with("model.") || f.key.starts_with("mdp.")
          || f.key == "conditionals.properties"))
      continue;
    for (char ch: f.key + "=" + f.get() + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ULL;
    }
  }
  return h;
}


}  // namespace agfn

#endif  // AGFN_CONFIG_HPP_
