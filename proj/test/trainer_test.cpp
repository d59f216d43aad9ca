//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "agfn/trainer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace agfn {
namespace {

namespace fs = std::filesystem;

const std::string kSource = AGFN_SOURCE_DIR;

RunConfig toy_config() { return load_config(kSource + "/configs/toy.cfg"); }

struct Fixture {
  RunConfig config = toy_config();
  Policy policy { config.model, config.encoding_width() };
  PropertyCalculator calc;
  RewardModel reward { &calc, {} };
  ConditioningContext ctx = base_context(config);

  BatchItem item(const std::string &smiles, std::uint64_t seed,
                 double log_reward, bool offline = false) {
    std::mt19937_64 rng(seed);
    BatchItem b;
    b.traj = deconstruct(parse_smiles(smiles), uniform_chooser(rng),
                         config.mdp);
    b.ctx = ctx;
    b.offline = offline;
    b.log_reward = log_reward;
    b.log_symmetry = symmetry_correction(b.traj);
    return b;
  }
};

fs::path scratch_dir(const std::string &name) {
  fs::path p = fs::temp_directory_path() / ("agfn_trainer_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(SymmetryTest, KnownAutomorphismCounts) {
  Fixture f;
  EXPECT_NEAR(f.item("C", 1, 0).log_symmetry, 0, 1e-12);
  EXPECT_NEAR(f.item("C=O", 1, 0).log_symmetry, 0, 1e-12);
  EXPECT_NEAR(f.item("CC", 1, 0).log_symmetry, std::log(2), 1e-12);
  EXPECT_NEAR(f.item("OCO", 1, 0).log_symmetry, std::log(2), 1e-12);
  EXPECT_NEAR(f.item("C1CC1", 1, 0).log_symmetry, std::log(6), 1e-12);
}

// With all parameters zero every policy is uniform and log Z = 0, so the
// residual is a sum of action-count logarithms.
TEST(LossTest, TrajectoryBalanceByHand) {
  Fixture f;
  f.policy.set_zero();
  std::vector<BatchItem> batch { f.item("C=O", 2, -1.5), f.item("OCO", 5, 0.3),
                                 f.item("CC", 8, -0.2) };
  LossSettings ls { 2.0, 1.0, 20.0, TrainMode::finetune_tb };
  double expected = 0;
  std::vector<double> resid;
  for (const BatchItem &b: batch) {
    const Trajectory &t = b.traj;
    double r = 0;
    for (int k = 0; k < t.length(); ++k) {
      r -= std::log(forward_actions(t.states[k], f.config.mdp).size());
      if (k + 1 < t.length())
        r += std::log(backward_actions(t.states[k + 1]).size());
    }
    r -= ls.beta * b.log_reward + b.log_symmetry;
    resid.push_back(r);
    expected += r * r / batch.size();
  }
  ad::Tape tape;
  LossTerms lt = compute_loss(tape, f.policy, nullptr, batch, f.config.mdp,
                              ls);
  EXPECT_NEAR(lt.values.tb, expected, 1e-10);
  EXPECT_NEAR(lt.values.total, expected, 1e-10);
  EXPECT_NEAR(tape.scalar(lt.total), expected, 1e-10);
  EXPECT_EQ(lt.values.mle, 0);
  for (std::size_t i = 0; i < resid.size(); ++i)
    EXPECT_NEAR(lt.values.residuals[i], resid[i], 1e-10);
}

TEST(LossTest, MaximumLikelihoodByHand) {
  Fixture f;
  f.policy.set_zero();
  std::vector<BatchItem> batch { f.item("C=O", 2, 0, true),
                                 f.item("CC", 1, 0, false),
                                 f.item("OCO", 3, 0, true) };
  double nll = 0;
  for (const BatchItem &b: batch) {
    if (!b.offline)
      continue;
    for (int k = 0; k < b.traj.length(); ++k)
      nll += std::log(forward_actions(b.traj.states[k], f.config.mdp).size());
  }
  nll /= 2;
  LossSettings ls { 1.0, 0.04, 20.0, TrainMode::pretrain };
  ad::Tape tape;
  LossTerms lt = compute_loss(tape, f.policy, nullptr, batch, f.config.mdp,
                              ls);
  EXPECT_NEAR(lt.values.mle, nll, 1e-10);
  EXPECT_NEAR(lt.values.total, 0.04 * lt.values.tb + 20 * nll, 1e-9);
  EXPECT_NEAR(tape.scalar(lt.total), lt.values.total, 1e-9);
}

// Scaling R by 2 is absorbed exactly by log Z + beta log 2.
TEST(LossTest, RewardScaleAbsorbedByLogZ) {
  Fixture f;
  f.policy.initialize(5);
  const double beta = 3;
  std::vector<BatchItem> a { f.item("C=O", 1, -0.7), f.item("CC", 2, 0.1) };
  std::vector<BatchItem> b = a;
  for (BatchItem &x: b)
    x.log_reward += std::log(2.0);
  LossSettings ls { beta, 1, 0, TrainMode::finetune_tb };
  ad::Tape t1;
  const double base
      = compute_loss(t1, f.policy, nullptr, a, f.config.mdp, ls).values.tb;
  const int z = f.policy.params().find("logz.out.b");
  f.policy.params()[z].value(0, 0) += beta * std::log(2.0);
  ad::Tape t2;
  EXPECT_NEAR(compute_loss(t2, f.policy, nullptr, b, f.config.mdp, ls)
                  .values.tb,
              base, 1e-9);
}

TEST(LossTest, RelativeBalanceAgainstItself) {
  Fixture f;
  f.policy.initialize(9);
  Policy prior = f.policy;
  std::vector<BatchItem> batch { f.item("C=O", 1, 0), f.item("OCO", 4, 0) };
  ad::Tape probe(false);
  std::vector<const std::vector<double> *> conds { &f.ctx.encoding };
  const double log_z = probe.scalar(f.policy.log_z(probe, conds));
  const double beta = 2;
  for (BatchItem &b: batch)
    b.log_reward = log_z / beta;
  LossSettings ls { beta, 1, 0, TrainMode::finetune_rtb };
  f.policy.params().zero_grad();
  ad::Tape tape;
  LossTerms lt = compute_loss(tape, f.policy, &prior, batch, f.config.mdp, ls);
  EXPECT_NEAR(lt.values.rtb, 0, 1e-18);
  tape.backward(lt.total);
  for (const ad::Param &p: f.policy.params().all())
    EXPECT_NEAR(p.grad.cwiseAbs().maxCoeff(), 0, 1e-9) << p.name;

  // Off balance the residual is log Z - beta log R whatever the trajectory.
  batch[0].log_reward = 0.25;
  ad::Tape t2;
  lt = compute_loss(t2, f.policy, &prior, batch, f.config.mdp, ls);
  EXPECT_NEAR(lt.values.residuals[0], log_z - beta * 0.25, 1e-9);
  EXPECT_THROW(compute_loss(t2, f.policy, nullptr, batch, f.config.mdp, ls),
               std::invalid_argument);
}

TEST(LossTest, GradientMatchesFiniteDifferences) {
  Fixture f;
  ModelConfig m;
  m.num_layers = 1;
  m.num_emb = 4;
  m.num_mlp_layers = 1;
  Policy pi(m, f.config.encoding_width());
  pi.initialize(17);
  Policy prior(m, f.config.encoding_width());
  prior.initialize(18);
  std::vector<BatchItem> batch { f.item("C=O", 1, -0.4, true),
                                 f.item("OCC", 2, 0.2, false) };
  for (TrainMode mode: { TrainMode::pretrain, TrainMode::finetune_rtb }) {
    LossSettings ls { 1.5, 0.5, 0.7, mode };
    auto value = [&] {
      ad::Tape t(false);
      return compute_loss(t, pi, &prior, batch, f.config.mdp, ls)
          .values.total;
    };
    pi.params().zero_grad();
    ad::Tape tape;
    tape.backward(
        compute_loss(tape, pi, &prior, batch, f.config.mdp, ls).total);
    std::mt19937_64 rng(3);
    for (ad::Param &p: pi.params().all()) {
      for (int trial = 0; trial < 2; ++trial) {
        const Eigen::Index i = std::uniform_int_distribution<Eigen::Index>(
            0, p.value.size() - 1)(rng);
        const double keep = p.value.data()[i], h = 1e-5;
        p.value.data()[i] = keep + h;
        const double up = value();
        p.value.data()[i] = keep - h;
        const double down = value();
        p.value.data()[i] = keep;
        EXPECT_NEAR(p.grad.data()[i], (up - down) / (2 * h), 1e-6)
            << p.name << " mode " << train_mode_name(mode);
      }
    }
  }
}

TEST(AdamTest, FirstStepsByHand) {
  ad::ParamSet ps;
  ps.add("w", ad::Mat::Constant(1, 1, 0.5));
  ps.add("z", ad::Mat::Constant(1, 1, -1.0), kParamGroupLogZ);
  AdamSettings s;
  s.lr = 0.1;
  s.z_lr = 0.2;
  s.lr_decay = 2;
  s.z_lr_decay = 4;
  s.weight_decay = 0.01;
  Adam opt(ps, s);
  double w = 0.5, z = -1.0, mw = 0, vw = 0, mz = 0, vz = 0;
  for (int t = 1; t <= 3; ++t) {
    ps[0].grad(0, 0) = 0.3 * t;
    ps[1].grad(0, 0) = -0.2;
    opt.step();
    auto upd = [&](double &x, double g, double &m, double &v, double lr,
                   double decay) {
      g += 0.01 * x;
      m = 0.9 * m + 0.1 * g;
      v = 0.999 * v + 0.001 * g * g;
      const double mh = m / (1 - std::pow(0.9, t)),
                   vh = v / (1 - std::pow(0.999, t));
      x -= lr * std::pow(0.5, (t - 1) / decay) * mh / (std::sqrt(vh) + 1e-8);
      x = static_cast<float>(x);
    };
    upd(w, 0.3 * t, mw, vw, 0.1, 2);
    upd(z, -0.2, mz, vz, 0.2, 4);
    EXPECT_DOUBLE_EQ(ps[0].value(0, 0), w);
    EXPECT_DOUBLE_EQ(ps[1].value(0, 0), z);
  }
}

TEST(AdamTest, ClipBoundsTheNorm) {
  ad::ParamSet ps;
  ps.add("a", ad::Mat::Zero(2, 3));
  ps.add("b", ad::Mat::Zero(1, 4));
  Adam opt(ps, AdamSettings {});
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 30);
  for (int trial = 0; trial < 20; ++trial) {
    for (ad::Param &p: ps.all())
      p.grad = p.grad.unaryExpr([&](double) { return g(rng); });
    const double before = opt.clip();
    EXPECT_GT(before, 10);
    EXPECT_LE(opt.grad_norm(), 10 + 1e-6);
  }
  ps[0].grad.setConstant(0.1);
  ps[1].grad.setConstant(0.1);
  const ad::Mat keep = ps[0].grad;
  opt.clip();
  EXPECT_EQ(ps[0].grad, keep);

  AdamSettings sv;
  sv.clip_type = "value";
  sv.clip = 0.5;
  Adam byvalue(ps, sv);
  ps[0].grad(0, 0) = 3;
  ps[0].grad(1, 1) = -3;
  byvalue.clip();
  EXPECT_EQ(ps[0].grad(0, 0), 0.5);
  EXPECT_EQ(ps[0].grad(1, 1), -0.5);
}

TEST(OfflineDataTest, FiltersByMdp) {
  fs::path dir = scratch_dir("data");
  {
    std::ofstream out(dir / "d.smi");
    out << "C\nCO\nC=O\nN\nCCCC\nnot_a_smiles(\nC#C\nOCO\n";
  }
  RunConfig c = toy_config();
  OfflineData d = load_offline_data((dir / "d.smi").string(), c.mdp);
  EXPECT_EQ(d.molecules.size(), 4u);
  EXPECT_EQ(d.malformed, 1);
  EXPECT_EQ(d.out_of_limits, 1);
  EXPECT_EQ(d.disallowed, 2);  // N, triple bond
  c.mdp.max_traj_len = 3;  // only C fits; bond orders cost a step each
  d = load_offline_data((dir / "d.smi").string(), c.mdp);
  EXPECT_EQ(d.over_budget, 3);
  EXPECT_THROW(load_offline_data((dir / "missing.smi").string(), c.mdp),
               DataError);
}

struct ToyRun {
  RunConfig config;
  Policy policy;
  PropertyCalculator calc;
  OfflineData data;

  explicit ToyRun(RunConfig c)
      : config(std::move(c)), policy(config.model, config.encoding_width()) {
    policy.initialize(config.training.random_seed);
    for (const char *s: { "C", "CO", "C=O", "CC", "OCO", "CCO", "C=C" })
      data.molecules.push_back(parse_smiles(s));
  }

  Trainer trainer(TrainMode mode, const Policy *prior = nullptr) {
    return Trainer(config, mode, policy, prior, RewardModel { &calc, {} },
                   &data);
  }
};

RunConfig quick_config() {
  RunConfig c = toy_config();
  c.training.training_batch_size = 8;
  c.training.online_offline_mix_ratio = 0.5;
  c.training.max_num_iter = 6;
  c.training.checkpoint_every = 3;
  c.training.random_action_prob = 0.1;
  c.training.gfn_batch_shuffle = true;
  c.conditionals.sample = true;
  return c;
}

TEST(TrainerTest, BatchComposition) {
  ToyRun r(quick_config());
  Trainer t = r.trainer(TrainMode::pretrain);
  EXPECT_EQ(t.n_online(), 4);
  EXPECT_EQ(t.n_offline(), 4);
  std::vector<BatchItem> batch = t.assemble_batch();
  ASSERT_EQ(batch.size(), 8u);
  int offline = 0;
  for (const BatchItem &b: batch) {
    offline += b.offline;
    EXPECT_TRUE(b.traj.terminal());
    EXPECT_TRUE(replays(b.traj, r.config.mdp));
    EXPECT_EQ(static_cast<int>(b.ctx.encoding.size()),
              r.config.encoding_width());
    EXPECT_GE(b.log_reward, r.config.training.illegal_action_logreward);
  }
  EXPECT_EQ(offline, 4);
}

TEST(TrainerTest, Deterministic) {
  ToyRun a(quick_config()), b(quick_config());
  Trainer ta = a.trainer(TrainMode::pretrain);
  Trainer tb = b.trainer(TrainMode::pretrain);
  for (int i = 0; i < 3; ++i) {
    StepStats sa = ta.step(), sb = tb.step();
    EXPECT_EQ(sa.loss.total, sb.loss.total);
  }
  for (std::size_t i = 0; i < a.policy.params().size(); ++i)
    EXPECT_EQ(a.policy.params()[i].value, b.policy.params()[i].value);
}

TEST(TrainerTest, ParametersStayFloat) {
  ToyRun r(quick_config());
  Trainer t = r.trainer(TrainMode::pretrain);
  t.step();
  for (const ad::Param &p: r.policy.params().all()) {
    for (Eigen::Index i = 0; i < p.value.size(); ++i)
      ASSERT_EQ(p.value.data()[i],
                static_cast<double>(static_cast<float>(p.value.data()[i])));
  }
}

TEST(TrainerTest, PriorUntouchedByRelativeBalance) {
  RunConfig c = quick_config();
  c.training.online_offline_mix_ratio = 1;
  ToyRun r(c);
  Policy prior = r.policy;
  const Policy snapshot = prior;
  Trainer t = r.trainer(TrainMode::finetune_rtb, &prior);
  for (int i = 0; i < 3; ++i)
    t.step();
  for (std::size_t i = 0; i < prior.params().size(); ++i)
    EXPECT_EQ(prior.params()[i].value, snapshot.params()[i].value);
  EXPECT_NE(r.policy.params()[0].value, snapshot.params()[0].value);
  EXPECT_THROW(r.trainer(TrainMode::finetune_rtb), std::invalid_argument);
}

TEST(TrainerTest, ZeroIterationsWritesInitialCheckpoint) {
  RunConfig c = quick_config();
  c.training.max_num_iter = 0;
  ToyRun r(c);
  fs::path dir = scratch_dir("zero");
  std::ostringstream log;
  r.trainer(TrainMode::pretrain).run(&log, dir.string());
  EXPECT_TRUE(log.str().empty());
  Checkpoint ck = load_checkpoint((dir / "last.ckpt").string());
  EXPECT_EQ(ck.step, 0u);
  EXPECT_EQ(ck.config_hash, config_hash(c));
  Policy back(c.model, c.encoding_width());
  restore_params(back.params(), ck);
  for (std::size_t i = 0; i < back.params().size(); ++i)
    EXPECT_EQ(back.params()[i].value, r.policy.params()[i].value);
}

TEST(TrainerTest, RunLogsAndCheckpoints) {
  ToyRun r(quick_config());
  fs::path dir = scratch_dir("run");
  std::ostringstream log;
  r.trainer(TrainMode::pretrain).run(&log, dir.string());
  EXPECT_TRUE(fs::exists(dir / "step_3.ckpt"));
  EXPECT_TRUE(fs::exists(dir / "step_6.ckpt"));
  EXPECT_TRUE(fs::exists(dir / "last.ckpt"));
  std::istringstream lines(log.str());
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    ++n;
    EXPECT_EQ(line.rfind("step=" + std::to_string(3 * n) + " tb=", 0), 0u);
    EXPECT_NE(line.find(" validity="), std::string::npos);
    EXPECT_EQ(line.find("wall="), std::string::npos);
  }
  EXPECT_EQ(n, 2);

  // Resume restores parameters, optimiser state and step.
  Checkpoint ck = load_checkpoint((dir / "step_3.ckpt").string());
  ToyRun other(quick_config());
  Trainer t = other.trainer(TrainMode::pretrain);
  t.resume(ck);
  EXPECT_EQ(t.step_count(), 3);
  Checkpoint again = t.checkpoint();
  ASSERT_EQ(again.tensors.size(), ck.tensors.size());
  for (std::size_t i = 0; i < ck.tensors.size(); ++i)
    EXPECT_EQ(again.tensors[i].data, ck.tensors[i].data);
}

TEST(TrainerTest, NonFiniteLossAborts) {
  ToyRun r(quick_config());
  Trainer t = r.trainer(TrainMode::pretrain);
  std::vector<BatchItem> batch = t.assemble_batch();
  batch[0].log_reward = std::nan("");
  try {
    t.train_on(batch);
    FAIL() << "expected NumericError";
  } catch (const NumericError &e) {
    EXPECT_NE(std::string(e.what()).find("logR=nan"), std::string::npos);
  }
}

TEST(TrainerTest, LogZNoise) {
  ToyRun r(quick_config());
  const int z = r.policy.params().find("logz.out.b");
  const ad::Mat before = r.policy.params()[z].value;
  std::mt19937_64 rng(1);
  recalibrate_log_z(r.policy, 0.0, rng);
  EXPECT_EQ(r.policy.params()[z].value, before);
  recalibrate_log_z(r.policy, 0.1, rng);
  EXPECT_NE(r.policy.params()[z].value, before);
  EXPECT_LT((r.policy.params()[z].value - before).cwiseAbs().maxCoeff(), 1.0);
}

}  // namespace
}  // namespace agfn
