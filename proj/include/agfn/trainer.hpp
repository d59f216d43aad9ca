//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_TRAINER_HPP_
#define AGFN_TRAINER_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "agfn/autodiff.hpp"
#include "agfn/canon.hpp"
#include "agfn/checkpoint.hpp"
#include "agfn/config.hpp"
#include "agfn/descriptors.hpp"
#include "agfn/mdp.hpp"
#include "agfn/policy.hpp"
#include "agfn/reward.hpp"
#include "agfn/sampler.hpp"
#include "agfn/smiles.hpp"

namespace agfn {

// Non-finite loss or parameters.
class NumericError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class TrainMode { pretrain, finetune_tb, finetune_rtb, tasktrain };

inline std::string_view train_mode_name(TrainMode m) {
  switch (m) {
  case TrainMode::pretrain:
    return "pretrain";
  case TrainMode::finetune_tb:
    return "finetune_tb";
  case TrainMode::finetune_rtb:
    return "finetune_rtb";
  case TrainMode::tasktrain:
    return "tasktrain";
  }
  return "?";
}

// A terminal trajectory with its conditioning and reward.
struct BatchItem {
  Trajectory traj;
  ConditioningContext ctx;
  bool offline = false;
  double log_reward = 0;    // floored log R(x | c)
  double log_symmetry = 0;  // log |Aut(x)| - log |Aut(s0)|
};

struct LossBreakdown {
  double tb = 0;
  double mle = 0;
  double rtb = 0;
  double total = 0;
  std::vector<double> residuals;
};

struct LossSettings {
  double beta = 1;
  double lambda1 = 0.04;
  double lambda2 = 20;
  TrainMode mode = TrainMode::pretrain;
};

struct LossTerms {
  ad::Var total;
  LossBreakdown values;
};

// log |Aut| of a state graph; frozen atoms are told apart so only
// symmetries fixing the seed count.
inline double log_symmetry(const State &s) {
  ColoredGraph cg = to_colored_graph(s.graph, ColorMode::kState);
  for (int v = 0; v < s.frozen; ++v)
    cg.color[v] = -1 - v;
  return std::log(automorphism_count(cg));
}

inline double symmetry_correction(const Trajectory &t) {
  return log_symmetry(t.last()) - log_symmetry(t.states.front());
}

struct TrajectorySums {
  ad::Var log_pf;  // B x 1
  ad::Var log_pb;  // B x 1, valid only when requested
};

// Per-trajectory sums of forward (and optionally backward) log-probabilities
// in one batched policy call. The backward step out of the terminal state is
// deterministic and contributes 0.
inline TrajectorySums trajectory_log_probs(ad::Tape &tape, const Policy &policy,
                                           std::span<const BatchItem> items,
                                           const MdpConfig &cfg,
                                           bool with_pb) {
  std::vector<const State *> states;
  std::vector<const std::vector<double> *> conds;
  std::vector<std::vector<Action>> legal;
  std::vector<int> query_state, traj_fwd, traj_bwd;
  // (query, chosen index) per step
  std::vector<std::pair<int, int>> fwd, bwd;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Trajectory &t = items[i].traj;
    if (!t.terminal())
      throw std::invalid_argument("loss needs terminal trajectories");
    const int base = static_cast<int>(states.size());
    for (int k = 0; k < t.length(); ++k) {
      states.push_back(&t.states[k]);
      conds.push_back(&items[i].ctx.encoding);
    }
    for (int k = 0; k < t.length(); ++k) {
      legal.push_back(forward_actions(t.states[k], cfg));
      auto it = std::find(legal.back().begin(), legal.back().end(),
                          t.actions[k]);
      if (it == legal.back().end())
        throw MdpError("trajectory action is not legal: "
                       + to_string(t.actions[k]));
      query_state.push_back(base + k);
      fwd.emplace_back(static_cast<int>(legal.size()) - 1,
                       static_cast<int>(it - legal.back().begin()));
      traj_fwd.push_back(static_cast<int>(i));
    }
    if (with_pb) {
      for (int k = 0; k + 1 < t.length(); ++k) {
        const State &after = t.states[k + 1];
        legal.push_back(backward_actions(after));
        const Action b = backward_inverse(t.states[k], t.actions[k]);
        auto it = std::find(legal.back().begin(), legal.back().end(), b);
        if (it == legal.back().end())
          throw MdpError("backward inverse is not legal: " + to_string(b));
        query_state.push_back(base + k + 1);
        bwd.emplace_back(static_cast<int>(legal.size()) - 1,
                         static_cast<int>(it - legal.back().begin()));
        traj_bwd.push_back(static_cast<int>(i));
      }
    }
  }
  std::vector<PolicyQuery> qs;
  for (std::size_t q = 0; q < legal.size(); ++q)
    qs.push_back({ query_state[q], legal[q] });
  Policy::Output out = policy.log_probs(tape, states, conds, qs);

  const int n = static_cast<int>(items.size());
  std::vector<int> rows_f, rows_b;
  for (auto [q, j]: fwd)
    rows_f.push_back(out.offset[q] + j);
  for (auto [q, j]: bwd)
    rows_b.push_back(out.offset[q] + j);
  TrajectorySums sums;
  sums.log_pf = tape.scatter_add_rows(tape.gather_rows(out.logp, rows_f),
                                      traj_fwd, n);
  if (with_pb)
    sums.log_pb = tape.scatter_add_rows(tape.gather_rows(out.logp, rows_b),
                                        traj_bwd, n);
  else
    sums.log_pb = tape.constant(ad::Mat::Zero(n, 1));
  return sums;
}

// Losses of one batch.
//   TB:  (log Z(c) + sum log P_F - beta log R - sum log P_B - log sym)^2
//   MLE: -sum log P_F, offline trajectories only
//   RTB: (log Z(c) + sum log P_F - beta log R - sum log P_F_prior)^2
// total = lambda1 * tb + lambda2 * mle in pretraining; finetuning uses the
// bare objective unless offline data is mixed in.
inline LossTerms compute_loss(ad::Tape &tape, const Policy &policy,
                              const Policy *prior,
                              std::span<const BatchItem> items,
                              const MdpConfig &cfg, const LossSettings &ls) {
  if (items.empty())
    throw std::invalid_argument("empty batch");
  const bool rtb = ls.mode == TrainMode::finetune_rtb;
  if (rtb && prior == nullptr)
    throw std::invalid_argument("relative trajectory balance needs a prior");
  const int n = static_cast<int>(items.size());
  TrajectorySums sums = trajectory_log_probs(tape, policy, items, cfg, !rtb);

  std::vector<const std::vector<double> *> conds;
  ad::Mat target(n, 1);
  ad::Mat offline_mask = ad::Mat::Zero(n, 1);
  int n_offline = 0;
  for (int i = 0; i < n; ++i) {
    conds.push_back(&items[i].ctx.encoding);
    target(i, 0) = ls.beta * items[i].log_reward;
    if (!rtb)
      target(i, 0) += items[i].log_symmetry;
    if (items[i].offline) {
      offline_mask(i, 0) = 1;
      ++n_offline;
    }
  }
  if (rtb) {
    ad::Tape frozen(false);
    TrajectorySums p = trajectory_log_probs(frozen, *prior, items, cfg, false);
    target += frozen.value(p.log_pf);
  }
  ad::Var log_z = policy.log_z(tape, conds);
  ad::Var resid = tape.sub(tape.add(log_z, sums.log_pf),
                           tape.add(sums.log_pb, tape.constant(target)));
  ad::Var balance = tape.scale(tape.sum(tape.square(resid)), 1.0 / n);

  LossTerms out;
  const ad::Mat &r = tape.value(resid);
  out.values.residuals.assign(r.data(), r.data() + r.size());
  const double bal = tape.scalar(balance);
  (rtb ? out.values.rtb : out.values.tb) = bal;

  ad::Var mle = tape.constant(ad::Mat::Zero(1, 1));
  if (n_offline > 0) {
    mle = tape.scale(tape.sum(tape.mul(sums.log_pf,
                                       tape.constant(offline_mask))),
                     -1.0 / n_offline);
    out.values.mle = tape.scalar(mle);
  }
  const bool mixed = ls.mode == TrainMode::pretrain || n_offline > 0;
  if (mixed) {
    out.total = tape.add(tape.scale(balance, ls.lambda1),
                         tape.scale(mle, ls.lambda2));
    out.values.total = ls.lambda1 * bal + ls.lambda2 * out.values.mle;
  } else {
    out.total = balance;
    out.values.total = bal;
  }
  return out;
}

struct AdamSettings {
  double lr = 1e-4;
  double z_lr = 1e-3;
  double lr_decay = 20000;
  double z_lr_decay = 20000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-8;
  std::string clip_type = "norm";
  double clip = 10;
};

// Adam with L2 weight decay, a separate rate for the log Z group, rates
// halving every `decay` steps, and gradient clipping. Parameters are kept at
// float precision.
class Adam {
public:
  Adam(ad::ParamSet &ps, AdamSettings s): ps_(ps), s_(std::move(s)) {
    for (const ad::Param &p: ps_.all()) {
      m_.push_back(ad::Mat::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(ad::Mat::Zero(p.value.rows(), p.value.cols()));
    }
  }

  long steps() const { return t_; }
  void set_steps(long t) { t_ = t; }

  double rate(int group) const {
    const bool z = group == kParamGroupLogZ;
    return (z ? s_.z_lr : s_.lr)
           * std::exp2(-static_cast<double>(t_) / (z ? s_.z_lr_decay
                                                      : s_.lr_decay));
  }

  double grad_norm() const {
    double sq = 0;
    for (const ad::Param &p: ps_.all())
      sq += p.grad.squaredNorm();
    return std::sqrt(sq);
  }

  // Returns the norm before clipping.
  double clip() {
    const double norm = grad_norm();
    if (s_.clip_type == "value") {
      for (ad::Param &p: ps_.all())
        p.grad = p.grad.cwiseMax(-s_.clip).cwiseMin(s_.clip);
    } else {
      const double coef = s_.clip / (norm + 1e-6);
      if (coef < 1) {
        for (ad::Param &p: ps_.all())
          p.grad *= coef;
      }
    }
    return norm;
  }

  void step() {
    const double b1 = s_.beta1, b2 = s_.beta2;
    const double c1 = 1 - std::pow(b1, static_cast<double>(t_ + 1));
    const double c2 = 1 - std::pow(b2, static_cast<double>(t_ + 1));
    for (std::size_t i = 0; i < ps_.size(); ++i) {
      ad::Param &p = ps_[i];
      const double lr = rate(p.group);
      ad::Mat g = p.grad + s_.weight_decay * p.value;
      m_[i] = b1 * m_[i] + (1 - b1) * g;
      v_[i] = b2 * v_[i] + (1 - b2) * g.cwiseProduct(g);
      ad::Mat denom = ((v_[i] / c2).array().sqrt() + s_.eps).matrix();
      p.value -= lr * (m_[i] / c1).cwiseQuotient(denom);
      p.value = p.value.cast<float>().cast<double>();
    }
    ++t_;
  }

  void save(Checkpoint &ck) const {
    for (std::size_t i = 0; i < ps_.size(); ++i) {
      ck.tensors.push_back(to_tensor("adam.m/" + ps_[i].name, m_[i]));
      ck.tensors.push_back(to_tensor("adam.v/" + ps_[i].name, v_[i]));
    }
  }

  void restore(const Checkpoint &ck) {
    for (std::size_t i = 0; i < ps_.size(); ++i) {
      const Tensor *m = ck.find("adam.m/" + ps_[i].name);
      const Tensor *v = ck.find("adam.v/" + ps_[i].name);
      if (m == nullptr || v == nullptr)
        throw CheckpointError("checkpoint lacks optimiser state for "
                              + ps_[i].name);
      m_[i] = to_matrix(*m);
      v_[i] = to_matrix(*v);
    }
  }

private:
  ad::ParamSet &ps_;
  AdamSettings s_;
  std::vector<ad::Mat> m_, v_;
  long t_ = 0;
};

inline AdamSettings adam_settings(const TrainConfig &t) {
  AdamSettings s;
  s.lr = t.learning_rate;
  s.z_lr = t.z_learning_rate;
  s.lr_decay = t.lr_decay;
  s.z_lr_decay = t.z_lr_decay;
  s.beta1 = t.momentum;
  s.beta2 = t.adam_beta2;
  s.eps = t.adam_eps;
  s.weight_decay = t.weight_decay;
  s.clip_type = t.clip_grad_type;
  s.clip = t.clip_grad_param;
  return s;
}

// Dataset molecules usable as offline trajectories under an MDP config.
struct OfflineData {
  std::vector<MolGraph> molecules;
  int malformed = 0;
  int out_of_limits = 0;
  int over_budget = 0;
  int disallowed = 0;  // elements, bond orders or chirality not in the MDP
};

inline bool fits_mdp(const MolGraph &g, const MdpConfig &cfg) {
  for (int v = 0; v < g.num_atoms(); ++v) {
    if (!cfg.element_allowed(element_index(g.atom(v).element)))
      return false;
    if (!cfg.allow_chirality && g.atom(v).chirality != Chirality::none)
      return false;
  }
  for (const Bond &b: g.bonds()) {
    if (order_value(b.order) > cfg.max_bond_order)
      return false;
  }
  return true;
}

inline OfflineData load_offline_data(const std::string &path,
                                     const MdpConfig &cfg) {
  DatasetReport rep;
  try {
    rep = read_smiles_file(path, false, cfg.limits);
  } catch (const std::exception &e) {
    throw DataError(e.what());
  }
  OfflineData d;
  d.malformed = static_cast<int>(rep.malformed);
  d.out_of_limits = static_cast<int>(rep.out_of_limits);
  for (SmilesRecord &r: rep.molecules) {
    if (!fits_mdp(r.graph, cfg)) {
      ++d.disallowed;
    } else if (construction_steps(r.graph) + 1 > cfg.max_traj_len) {
      ++d.over_budget;
    } else {
      d.molecules.push_back(std::move(r.graph));
    }
  }
  return d;
}

// Reward R(x | c) as configured: product of conditional property rewards,
// times R_ext when finetuning.
struct RewardModel {
  const PropertyCalculator *calc = nullptr;
  ExternalReward external;

  double log_reward(const MolGraph &x, const ConditioningContext &ctx) const {
    return floored_log(aggregate_reward(x, ctx, *calc, external));
  }
};

// Builds R_ext from the task section: task property rewards times the
// score table value (missing molecules get task.missing_score).
inline ExternalReward task_reward(const RunConfig &c,
                                  const PropertyCalculator &calc,
                                  const ScoreTable *table) {
  if (c.task.slots.empty() && table == nullptr)
    return {};
  std::vector<PropertySlot> slots = c.task.slots;
  const double missing = c.task.missing_score;
  return [slots, &calc, table, missing](const MolGraph &x) {
    double r = 1;
    for (const PropertySlot &s: slots)
      r *= property_reward(calc(s.cond.property, x), s.cond);
    if (table != nullptr)
      r *= table->find(canonical_key(x)).value_or(missing);
    return r;
  };
}

// The conditioning template with decay rates scaled.
inline ConditioningContext base_context(const RunConfig &c) {
  ConditioningContext ctx;
  ctx.slots = c.conditionals.slots;
  for (PropertySlot &s: ctx.slots)
    s.cond.lambda *= c.conditionals.zinc_rad_scale;
  encode(ctx, c.num_thermometer_dim);
  return ctx;
}

struct StepStats {
  long step = 0;
  LossBreakdown loss;
  double mean_reward = 0;
  double validity = 0;
  double grad_norm = 0;
  int online = 0;
  int offline = 0;
};

// One training run. Owns the learned policy; the prior, when present, is
// only read.
class Trainer {
public:
  Trainer(const RunConfig &config, TrainMode mode, Policy &policy,
          const Policy *prior, const RewardModel &reward,
          const OfflineData *data, State seed = {})
      : c_(config), mode_(mode), policy_(policy), prior_(prior),
        reward_(reward), data_(data), seed_(std::move(seed)),
        adam_(policy.params(), adam_settings(config.training)),
        base_ctx_(base_context(config)), rng_(config.training.random_seed) {
    if (mode == TrainMode::finetune_rtb && prior == nullptr)
      throw std::invalid_argument("finetune_rtb needs a prior policy");
    if (n_offline() > 0 && (data == nullptr || data->molecules.empty()))
      throw DataError("offline share requested but the dataset is empty");
    if (policy.cond_width() != c_.encoding_width())
      throw std::invalid_argument("policy conditioning width does not match "
                                  "the configured conditionals");
  }

  Adam &optimizer() { return adam_; }
  long step_count() const { return adam_.steps(); }
  std::mt19937_64 &rng() { return rng_; }

  int n_online() const {
    return static_cast<int>(std::lround(c_.training.online_offline_mix_ratio
                                        * c_.training.training_batch_size));
  }
  int n_offline() const { return c_.training.training_batch_size - n_online(); }

  LossSettings loss_settings() const {
    return { c_.training.beta, c_.training.gfn_loss_coeff,
             c_.training.mle_coeff, mode_ };
  }

  ConditioningContext draw_context(SampleMode m, const MolGraph *x) {
    if (!c_.conditionals.sample)
      return base_ctx_;
    SamplingParams sp { c_.conditionals.oob_percent,
                        c_.conditionals.sigma_fraction };
    return sample_conditionals(base_ctx_, m, x, *reward_.calc, sp,
                               c_.num_thermometer_dim, rng_);
  }

  // mix_ratio * B trajectories from the current policy with exploration
  // noise, the rest deconstructed from dataset molecules.
  std::vector<BatchItem> assemble_batch() {
    std::vector<BatchItem> batch;
    const int on = n_online(), off = n_offline();
    std::vector<State> starts(on, seed_);
    std::vector<ConditioningContext> ctxs;
    std::vector<std::vector<double>> encs;
    for (int i = 0; i < on; ++i) {
      ctxs.push_back(draw_context(SampleMode::online, nullptr));
      encs.push_back(ctxs.back().encoding);
    }
    SamplingOptions opt;
    opt.random_action_prob = c_.training.random_action_prob;
    opt.random_stop_prob = c_.training.random_stop_prob;
    opt.temperature = c_.training.sample_temp;
    opt.chunk_size = std::max(1, c_.training.sampling_batch_size);
    std::vector<Trajectory> trajs = sample_trajectories(
        policy_, c_.mdp, starts, encs, opt, rng_, c_.training.num_workers);
    for (int i = 0; i < on; ++i)
      batch.push_back({ std::move(trajs[i]), std::move(ctxs[i]), false });

    for (int i = 0; i < off; ++i) {
      std::uniform_int_distribution<std::size_t> pick(
          0, data_->molecules.size() - 1);
      const MolGraph &x = data_->molecules[pick(rng_)];
      ConditioningContext ctx = draw_context(SampleMode::offline, &x);
      Trajectory t = deconstruct(x, uniform_chooser(rng_), c_.mdp);
      batch.push_back({ std::move(t), std::move(ctx), true });
    }
    for (BatchItem &b: batch) {
      b.log_reward = std::max(reward_.log_reward(b.traj.last().graph, b.ctx),
                              c_.training.illegal_action_logreward);
      b.log_symmetry = symmetry_correction(b.traj);
    }
    if (c_.training.gfn_batch_shuffle)
      std::shuffle(batch.begin(), batch.end(), rng_);
    return batch;
  }

  StepStats step() {
    std::vector<BatchItem> batch = assemble_batch();
    return train_on(batch);
  }

  StepStats train_on(std::span<const BatchItem> batch) {
    StepStats st;
    st.step = adam_.steps();
    policy_.params().zero_grad();
    ad::Tape tape;
    LossTerms lt = compute_loss(tape, policy_, prior_, batch, c_.mdp,
                                loss_settings());
    st.loss = lt.values;
    if (!std::isfinite(st.loss.total))
      throw NumericError(dump(batch, st));
    tape.backward(lt.total);
    st.grad_norm = adam_.clip();
    if (!std::isfinite(st.grad_norm))
      throw NumericError(dump(batch, st));
    adam_.step();
    int valid = 0;
    for (const BatchItem &b: batch) {
      st.mean_reward += std::exp(b.log_reward) / batch.size();
      valid += is_valid(b.traj.last().graph, c_.mdp.limits) ? 1 : 0;
      (b.offline ? st.offline : st.online) += 1;
    }
    st.validity = static_cast<double>(valid) / batch.size();
    return st;
  }

  Checkpoint checkpoint() const {
    Checkpoint ck;
    ck.config_hash = config_hash(c_);
    ck.step = static_cast<std::uint64_t>(adam_.steps());
    append_params(ck, policy_.params());
    adam_.save(ck);
    return ck;
  }

  void resume(const Checkpoint &ck) {
    restore_params(policy_.params(), ck);
    adam_.restore(ck);
    adam_.set_steps(static_cast<long>(ck.step));
    // Fresh stream per resume point; exact continuation of the generator
    // state is not stored.
    rng_.seed(c_.training.random_seed + ck.step);
  }

  // Runs until max_num_iter, logging and checkpointing every
  // checkpoint_every steps. A final checkpoint is always written.
  void run(std::ostream *log, const std::string &checkpoint_dir) {
    const auto start = std::chrono::steady_clock::now();
    const long every = c_.training.checkpoint_every;
    double tb = 0, mle = 0, rtb = 0, reward = 0, validity = 0;
    long n = 0;
    if (!checkpoint_dir.empty())
      std::filesystem::create_directories(checkpoint_dir);
    while (adam_.steps() < c_.training.max_num_iter) {
      StepStats st = step();
      tb += st.loss.tb;
      mle += st.loss.mle;
      rtb += st.loss.rtb;
      reward += st.mean_reward;
      validity += st.validity;
      ++n;
      const long done = adam_.steps();
      if (done % every == 0) {
        if (log != nullptr) {
          std::ostringstream rec;
          rec << std::setprecision(9) << "step=" << done << " tb=" << tb / n
              << " mle=" << mle / n << " rtb=" << rtb / n
              << " mean_reward=" << reward / n
              << " validity=" << validity / n;
          if (c_.io.log_wall_time) {
            const std::chrono::duration<double> wall
                = std::chrono::steady_clock::now() - start;
            rec << " wall=" << std::fixed << std::setprecision(3)
                << wall.count();
          }
          *log << rec.str() << "\n" << std::flush;
        }
        if (!checkpoint_dir.empty()) {
          Checkpoint ck = checkpoint();
          save_checkpoint(checkpoint_dir + "/step_" + std::to_string(done)
                              + ".ckpt",
                          ck);
        }
        tb = mle = rtb = reward = validity = 0;
        n = 0;
      }
    }
    if (!checkpoint_dir.empty())
      save_checkpoint(checkpoint_dir + "/last.ckpt", checkpoint());
  }

private:
  std::string dump(std::span<const BatchItem> batch,
                   const StepStats &st) const {
    std::ostringstream out;
    out << "non-finite loss at step " << st.step << " (tb=" << st.loss.tb
        << " mle=" << st.loss.mle << " rtb=" << st.loss.rtb
        << " grad_norm=" << st.grad_norm << ")\n";
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const BatchItem &b = batch[i];
      out << "  [" << i << "] " << (b.offline ? "offline " : "online  ")
          << canonical_key(b.traj.last().graph).text
          << " logR=" << b.log_reward << " len=" << b.traj.length();
      if (i < st.loss.residuals.size())
        out << " resid=" << st.loss.residuals[i];
      out << "\n";
    }
    return out.str();
  }

  RunConfig c_;
  TrainMode mode_;
  Policy &policy_;
  const Policy *prior_;
  RewardModel reward_;
  const OfflineData *data_;
  State seed_;
  Adam adam_;
  ConditioningContext base_ctx_;
  std::mt19937_64 rng_;
};

// Finetuning start: copy of the prior with noise on the log Z output bias.
inline void recalibrate_log_z(Policy &policy, double sigma,
                              std::mt19937_64 &rng) {
  if (sigma <= 0)
    return;
  const int i = policy.params().find("logz.out.b");
  if (i < 0)
    throw std::logic_error("policy has no log Z bias");
  std::normal_distribution<double> noise(0, sigma);
  ad::Mat &b = policy.params()[i].value;
  for (Eigen::Index k = 0; k < b.size(); ++k)
    b.data()[k] = static_cast<float>(b.data()[k] + noise(rng));
}

}  // namespace agfn

#endif  // AGFN_TRAINER_HPP_
