//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "agfn/agfn.hpp"

namespace fs = std::filesystem;
using namespace agfn;

namespace {

const std::string kSource = AGFN_SOURCE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "agfn_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return { std::istreambuf_iterator<char>(in), {} };
}

std::string write_cfg(const RunConfig &c, const std::string &name) {
  const fs::path p = work_dir() / name;
  std::ofstream(p) << write_config(c);
  return p.string();
}

int quiet(int (*cmd)(const cli::Options &, std::ostream &),
          const cli::Options &o) {
  std::ostringstream err;
  const int rc = cli::guarded([&] { return cmd(o, err); }, err);
  if (rc != cli::kOk)
    std::cerr << err.str();
  return rc;
}

// Canonical key -> frequency over the first column of a sample file.
std::map<std::string, double> frequencies(const fs::path &samples) {
  std::map<std::string, double> f;
  std::ifstream in(samples);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    f[line.substr(0, line.find('\t'))] += 1;
    ++n;
  }
  for (auto &[k, v]: f)
    v /= static_cast<double>(n);
  return f;
}

double l1(const std::map<std::string, double> &p,
          const std::map<std::string, double> &q) {
  std::set<std::string> keys;
  for (const auto &[k, v]: p)
    keys.insert(k);
  for (const auto &[k, v]: q)
    keys.insert(k);
  double d = 0;
  for (const std::string &k: keys) {
    auto a = p.find(k), b = q.find(k);
    d += std::abs((a == p.end() ? 0 : a->second)
                  - (b == q.end() ? 0 : b->second));
  }
  return d;
}

// Every terminal molecule reachable in the MDP, by exhaustive search.
std::map<std::string, MolGraph> enumerate_terminals(const MdpConfig &cfg) {
  std::map<std::string, MolGraph> out;
  std::set<std::string> visited;
  std::function<void(const State &)> walk = [&](const State &s) {
    for (const Action &a: forward_actions(s, cfg)) {
      State t = apply(s, a, cfg);
      if (t.terminal) {
        out.emplace(canonical_key(t.graph).text, t.graph);
        continue;
      }
      std::ostringstream id;
      for (int v = 0; v < t.graph.num_atoms(); ++v)
        id << symbol(t.graph.atom(v).element) << ";";
      for (const auto &[u, w, o]: t.graph.sorted_bonds())
        id << u << "-" << w << ":" << o << ";";
      if (visited.insert(id.str()).second)
        walk(t);
    }
  };
  walk(empty_state());
  return out;
}

RunConfig toy_config() {
  RunConfig c = load_config(kSource + "/configs/toy.cfg");
  c.io.checkpoint_dir = (work_dir() / "toy").string();
  c.io.log_path = (work_dir() / "toy/train.log").string();
  return c;
}

/* 1. Reward exactness */

// Piecewise definitions per preference direction, written out separately.
double reward_oracle(double p, double lo, double hi, int d, double lambda) {
  if (d < 0) {
    if (p < lo)
      return std::exp(-(lo - p) / lambda);
    if (p > hi)
      return 0.5 * std::exp(-(p - hi) / lambda);
    return -0.5 * (p - lo) / (hi - lo) + 1;
  }
  if (d == 0) {
    if (p < lo)
      return std::exp(-(lo - p) / lambda);
    if (p > hi)
      return std::exp(-(p - hi) / lambda);
    return 1;
  }
  if (p < lo)
    return 0.5 * std::exp((p - lo) / lambda);
  if (p > hi)
    return std::exp((hi - p) / lambda);
  return 0.5 + 0.5 * (p - lo) / (hi - lo);
}

Outcome reward_exactness() {
  const double lo = 10, hi = 30, lambda = 2;
  double worst = 0, jump = 0;
  bool anchors = true;
  for (int d: { -1, 0, 1 }) {
    PropertyConditional c { { PropertyKind::TPSA, "TPSA" }, lo, hi, d,
                            lambda };
    for (int i = 0; i < 1000; ++i) {
      const double p = lo - 5 * lambda
                       + (hi - lo + 10 * lambda) * i / 999.0;
      worst = std::max(worst, std::abs(property_reward(p, c)
                                       - reward_oracle(p, lo, hi, d, lambda)));
    }
    for (double edge: { lo, hi }) {
      const double below = std::nextafter(edge, -1e9);
      const double above = std::nextafter(edge, 1e9);
      jump = std::max(jump, std::abs(property_reward(below, c)
                                     - property_reward(edge, c)));
      jump = std::max(jump, std::abs(property_reward(above, c)
                                     - property_reward(edge, c)));
    }
    if (d == 0) {
      anchors &= property_reward(20, c) == 1.0;
      anchors &= property_reward(lo - lambda, c) == std::exp(-1.0);
    } else {
      anchors &= property_reward(lo, c) == (d > 0 ? 0.5 : 1.0);
      anchors &= property_reward(hi, c) == (d > 0 ? 1.0 : 0.5);
    }
  }
  return { worst < 1e-12 && jump < 1e-12 && anchors,
           "max_err=" + fmt(worst) + " boundary_jump=" + fmt(jump)
               + " anchors=" + (anchors ? "ok" : "mismatch") };
}

/* 2. Mask soundness */

Outcome validity() {
  MdpConfig cfg;
  std::mt19937_64 rng(2);
  int valid = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    Trajectory t = rollout(empty_state(), uniform_chooser(rng), cfg);
    valid += t.terminal() && is_valid(t.last().graph, cfg.limits);
  }
  return { valid == n, std::to_string(valid) + "/" + std::to_string(n)
                           + " valid" };
}

/* 3. SMILES round trip */

Outcome smiles_round_trip() {
  const GraphLimits wide { 1000, 1000 };
  DatasetReport rep = read_smiles_file(kSource + "/data/corpus.smi", false,
                                       wide);
  int same = 0;
  for (const SmilesRecord &r: rep.molecules) {
    const CanonicalKey k = canonical_key(r.graph);
    same += canonical_key(parse_smiles(write_smiles(r.graph))) == k;
  }
  std::mt19937_64 rng(3);
  int invariant = 0;
  const std::size_t subset = std::min<std::size_t>(50, rep.molecules.size());
  for (std::size_t m = 0; m < subset; ++m) {
    const MolGraph &g = rep.molecules[m].graph;
    const CanonicalKey k = canonical_key(g);
    std::vector<int> perm(g.num_atoms());
    std::iota(perm.begin(), perm.end(), 0);
    bool ok = true;
    for (int t = 0; t < 100 && ok; ++t) {
      std::shuffle(perm.begin(), perm.end(), rng);
      ok = canonical_key(g.permuted(perm)) == k;
    }
    invariant += ok;
  }
  const std::size_t lines = rep.molecules.size() + rep.malformed
                            + rep.out_of_limits;
  return { lines == 1000 && same == static_cast<int>(lines)
               && invariant == static_cast<int>(subset),
           "round_trip=" + std::to_string(same) + "/" + std::to_string(lines)
               + " permutation_invariant=" + std::to_string(invariant) + "/"
               + std::to_string(subset) };
}

/* 4. Gradient correctness */

Outcome gradients() {
  RunConfig c = toy_config();
  ModelConfig m;
  m.num_layers = 2;
  m.num_emb = 1;
  m.num_heads = 1;
  m.num_mlp_layers = 0;
  c.model = m;
  c.num_thermometer_dim = 2;
  Policy pi(m, c.encoding_width());
  const long params = pi.params().count();
  ConditioningContext ctx = base_context(c);
  std::vector<std::string> mols { "C", "CO", "C=O", "OCO", "CC=O", "C1CO1" };
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> logr(-3, 0);

  double worst = 0;
  const char *names[] = { "tb", "mle", "rtb" };
  std::string detail;
  for (int which = 0; which < 3; ++which) {
    double worst_here = 0;
    for (int trial = 0; trial < 100; ++trial) {
      pi.initialize(1000 + trial);
      Policy prior(m, c.encoding_width());
      prior.initialize(5000 + trial);
      // Zero biases put ReLUs exactly on their kink; move off it.
      std::normal_distribution<double> jitter(0, 0.3);
      for (Policy *q: { &pi, &prior }) {
        for (ad::Param &par: q->params().all())
          for (long i = 0; i < par.value.size(); ++i)
            par.value.data()[i] += jitter(rng);
      }
      std::vector<BatchItem> batch;
      for (int b = 0; b < 3; ++b) {
        BatchItem it;
        const MolGraph x = parse_smiles(mols[rng() % mols.size()]);
        it.traj = deconstruct(x, uniform_chooser(rng), c.mdp);
        it.ctx = ctx;
        it.offline = which == 1;
        it.log_reward = logr(rng);
        it.log_symmetry = symmetry_correction(it.traj);
        batch.push_back(std::move(it));
      }
      LossSettings ls;
      ls.beta = 1.5;
      if (which == 0) {
        ls.mode = TrainMode::finetune_tb;
      } else if (which == 1) {
        ls.mode = TrainMode::pretrain;
        ls.lambda1 = 0;
        ls.lambda2 = 1;
      } else {
        ls.mode = TrainMode::finetune_rtb;
      }
      auto loss = [&] {
        ad::Tape t(false);
        return compute_loss(t, pi, &prior, batch, c.mdp, ls).values.total;
      };
      pi.params().zero_grad();
      ad::Tape tape;
      tape.backward(compute_loss(tape, pi, &prior, batch, c.mdp, ls).total);
      // One random coordinate per trial.
      const long k = static_cast<long>(rng() % params);
      long seen = 0;
      for (ad::Param &p: pi.params().all()) {
        if (k >= seen + p.value.size()) {
          seen += p.value.size();
          continue;
        }
        double &x = p.value.data()[k - seen];
        const double keep = x, h = 1e-6;
        x = keep + h;
        const double up = loss();
        x = keep - h;
        const double down = loss();
        x = keep;
        const double fd = (up - down) / (2 * h);
        const double g = p.grad.data()[k - seen];
        const double rel
            = std::abs(g - fd) / std::max({ std::abs(g), std::abs(fd), 1e-3 });
        worst_here = std::max(worst_here, rel);
        break;
      }
    }
    worst = std::max(worst, worst_here);
    detail += std::string(names[which]) + "=" + fmt(worst_here) + " ";
  }
  return { params <= 200 && worst < 1e-3,
           "params=" + std::to_string(params) + " max_rel_err " + detail };
}

/* 5. TB distribution matching */

struct ToyRun {
  bool ok = false;
  double last_tb = 0;
  long steps = 0;
};

ToyRun pretrain_toy() {
  ToyRun r;
  RunConfig c = toy_config();
  cli::Options o;
  o.config = write_cfg(c, "toy.cfg");
  if (quiet(cli::pretrain, o) != cli::kOk)
    return r;
  std::ifstream log(c.io.log_path);
  std::string line, last;
  while (std::getline(log, line))
    last = line;
  const auto at = last.find(" tb=");
  if (at == std::string::npos)
    return r;
  r.last_tb = std::stod(last.substr(at + 4));
  r.steps = c.training.max_num_iter;
  r.ok = true;
  return r;
}

Outcome tb_matching() {
  ToyRun run = pretrain_toy();
  if (!run.ok)
    return { false, "pretraining failed" };
  RunConfig c = toy_config();
  cli::Options o;
  o.config = write_cfg(c, "toy.cfg");
  o.checkpoint = c.io.checkpoint_dir + "/last.ckpt";
  o.out = (work_dir() / "toy_samples.tsv").string();
  o.n = 50000;
  if (quiet(cli::sample, o) != cli::kOk)
    return { false, "sampling failed" };

  PropertyCalculator calc;
  ConditioningContext ctx = base_context(c);
  std::map<std::string, double> target;
  double z = 0;
  for (const auto &[k, g]: enumerate_terminals(c.mdp)) {
    const double r = std::pow(aggregate_reward(g, ctx, calc, {}),
                              c.training.beta);
    target[k] = r;
    z += r;
  }
  for (auto &[k, v]: target)
    v /= z;
  const double dist = l1(frequencies(o.out), target);
  return { run.steps <= 20000 && dist < 0.1 && run.last_tb < 1e-2,
           "terminals=" + std::to_string(target.size()) + " steps="
               + std::to_string(run.steps) + " L1=" + fmt(dist)
               + " tb=" + fmt(run.last_tb) };
}

/* 6. RTB posterior */

// Crafted external reward: favours oxygen and unsaturation.
double crafted_ext(const MolGraph &g) {
  double r = 0.1;
  for (int v = 0; v < g.num_atoms(); ++v)
    r += g.atom(v).element == Element::O ? 0.3 : 0;
  for (const Bond &b: g.bonds())
    r += b.order == BondOrder::double_ ? 0.2 : 0;
  return r;
}

Outcome rtb_posterior() {
  RunConfig base = toy_config();
  const fs::path prior_path = work_dir() / "prior.ckpt";
  if (!fs::exists(base.io.checkpoint_dir + "/last.ckpt"))
    return { false, "no pretrained toy model" };
  fs::copy_file(base.io.checkpoint_dir + "/last.ckpt", prior_path,
                fs::copy_options::overwrite_existing);
  const std::string before = slurp(prior_path);

  auto terminals = enumerate_terminals(base.mdp);
  const fs::path table = work_dir() / "ext.tsv";
  {
    std::ofstream t(table);
    for (const auto &[k, g]: terminals)
      t << k << "\t" << std::setprecision(17) << crafted_ext(g) << "\n";
  }
  RunConfig c = base;
  c.data.score_tables = { { "ext", table.string() } };
  c.task.score_table = "ext";
  c.io.checkpoint_dir = (work_dir() / "rtb").string();
  c.io.log_path = (work_dir() / "rtb/train.log").string();
  c.training.max_num_iter = 3000;
  cli::Options o;
  o.config = write_cfg(c, "rtb.cfg");
  o.prior = prior_path.string();
  o.objective = "rtb";
  if (quiet(cli::finetune, o) != cli::kOk)
    return { false, "finetuning failed" };
  o.checkpoint = c.io.checkpoint_dir + "/last.ckpt";
  o.out = (work_dir() / "rtb_samples.tsv").string();
  o.n = 50000;
  if (quiet(cli::sample, o) != cli::kOk)
    return { false, "sampling failed" };

  Policy prior(c.model, c.encoding_width());
  restore_params(prior.params(), load_checkpoint(prior_path.string()));
  ConditioningContext ctx = base_context(c);
  auto p0 = exact_terminal_distribution(prior, c.mdp, empty_state(),
                                        ctx.encoding);
  PropertyCalculator calc;
  std::map<std::string, double> target;
  double z = 0;
  for (const auto &[k, g]: terminals) {
    const double r = aggregate_reward(g, ctx, calc, crafted_ext);
    target[k] = p0[k] * std::pow(r, c.training.beta);
    z += target[k];
  }
  for (auto &[k, v]: target)
    v /= z;
  const double dist = l1(frequencies(o.out), target);
  const bool frozen = slurp(prior_path) == before;
  return { dist < 0.1 && frozen,
           "L1=" + fmt(dist) + " prior_bit_identical="
               + (frozen ? "yes" : "no") };
}

/* 7. Offline pathway */

Outcome offline_pathway() {
  MdpConfig wide;
  wide.limits = { 1000, 1000 };
  wide.max_traj_len = 100000;
  DatasetReport rep = read_smiles_file(kSource + "/data/corpus.smi", false,
                                       wide.limits);
  std::mt19937_64 rng(7);
  int faithful = 0;
  for (const SmilesRecord &r: rep.molecules) {
    Trajectory t = deconstruct(r.graph, uniform_chooser(rng), wide);
    State s = t.states.front();
    for (const Action &a: t.actions)
      s = apply(s, a, wide);
    faithful += s.terminal && canonical_key(s.graph) == canonical_key(r.graph);
  }

  RunConfig c = toy_config();
  c.training.online_offline_mix_ratio = 0;
  c.training.gfn_loss_coeff = 0;
  c.training.mle_coeff = 1;
  Policy pi(c.model, c.encoding_width());
  pi.initialize(c.training.random_seed);
  PropertyCalculator calc;
  OfflineData data;
  const MolGraph target = parse_smiles("OC=O");
  const std::string key = canonical_key(target).text;
  data.molecules.push_back(target);
  Trainer trainer(c, TrainMode::pretrain, pi, nullptr,
                  RewardModel { &calc, {} }, &data);
  ConditioningContext ctx = base_context(c);
  double p = 0;
  long steps = 0;
  while (steps < 5000) {
    trainer.step();
    ++steps;
    if (steps % 250 == 0) {
      p = exact_terminal_distribution(pi, c.mdp, empty_state(),
                                      ctx.encoding)[key];
      if (p > 0.9)
        break;
    }
  }
  const int n = static_cast<int>(rep.molecules.size());
  return { faithful == n && p > 0.9,
           "replay=" + std::to_string(faithful) + "/" + std::to_string(n)
               + " p(" + key + ")=" + fmt(p) + " after "
               + std::to_string(steps) + " steps" };
}

/* 8. Metric oracles */

double set_tanimoto(const Fingerprint &a, const Fingerprint &b) {
  std::set<int> x, y;
  for (int i = 0; i < a.width(); ++i) {
    if (a.test(i))
      x.insert(i);
    if (b.test(i))
      y.insert(i);
  }
  std::vector<int> i, u;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(),
                        std::back_inserter(i));
  std::set_union(x.begin(), x.end(), y.begin(), y.end(),
                 std::back_inserter(u));
  return static_cast<double>(i.size()) / u.size();
}

Outcome metric_oracles() {
  const std::vector<std::vector<std::pair<std::string, double>>> sets {
    { { "c1ccccc1O", 0.9 }, { "c1ccccc1N", 0.9 }, { "CCO", 0.7 },
      { "CCCO", 0.6 }, { "C1CCCCC1", 0.55 }, { "CC(=O)O", 0.5 },
      { "c1ccncc1", 0.45 }, { "CCN", 0.8 }, { "OCCO", 0.2 },
      { "c1ccccc1", 0.9 } },
    { { "CCCCCC", 0.51 }, { "CCCCCO", 0.52 }, { "CCCCCN", 0.53 },
      { "OCCCCO", 0.5 }, { "NCCCCN", 0.49 } },
    { { "C1CC1", 1.0 }, { "C1CCC1", 1.0 }, { "C1CCCC1", 1.0 },
      { "c1ccoc1", 0.1 }, { "c1ccsc1", 0.75 }, { "c1cc[nH]c1", 0.75 },
      { "FC(F)F", 0.3 } },
  };
  bool ok = true;
  double rw_err = 0;
  int checked = 0;
  for (const auto &set: sets) {
    SampleSet s;
    for (const auto &[smi, r]: set)
      s.add(parse_smiles(smi), r);
    SampleCache c = build_cache(s, 2, 2048);
    const int n = static_cast<int>(s.size());
    // Greedy order by (reward desc, key asc).
    std::vector<std::tuple<double, std::string, int>> order;
    for (int i = 0; i < n; ++i)
      order.emplace_back(-s.rewards[i], c.keys[i], i);
    std::sort(order.begin(), order.end());

    std::vector<int> modes, circles;
    for (const auto &[nr, k, i]: order) {
      bool fresh = -nr >= 0.5;
      for (int m: modes)
        fresh = fresh && set_tanimoto(c.fps[i], c.fps[m]) < 0.5;
      if (fresh)
        modes.push_back(i);
      bool far = true;
      for (int m: circles)
        far = far && 1 - set_tanimoto(c.fps[i], c.fps[m]) >= 0.75;
      if (far)
        circles.push_back(i);
    }
    double pair_sum = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j)
        pair_sum += set_tanimoto(c.fps[i], c.fps[j]);
    }
    const double div = 1 - pair_sum / (n * (n - 1) / 2.0);

    PropertySlot slot;
    slot.cond = { { PropertyKind::MolWt, "MolWt" }, 60, 100, 0, 1 };
    slot.bounds = { 0, 500, 0, 500 };
    PropertySlot up = slot;
    up.cond.d = 1;
    PropertyCalculator calc;
    double l1_expect = 0, success_expect = 0;
    std::vector<double> w;
    for (const MolGraph &g: s.molecules) {
      const double v = molecular_weight(g);
      w.push_back(v);
      l1_expect += std::abs(v - 64.0) / 500;
      success_expect += ((60 <= v && v <= 100) + (std::abs(v - 100) <= 10))
                        / 2.0;
    }
    l1_expect /= n;
    success_expect = success_expect / n * 100;

    MetricsInputs in;
    in.conditionals = { slot, up };
    MetricsReport r = evaluate_samples(s, calc, in, {});
    ok &= r.n_modes == static_cast<int>(modes.size());
    ok &= r.n_circles == static_cast<int>(circles.size());
    ok &= r.diversity == div;
    ok &= r.success_pct == success_expect;
    ok &= r.properties[0].l1_dist == l1_expect;
    std::vector<double> sorted = s.rewards;
    std::sort(sorted.rbegin(), sorted.rend());
    const std::size_t k = std::min<std::size_t>(100, sorted.size());
    const double top = std::accumulate(sorted.begin(), sorted.begin() + k,
                                       0.0) / k;
    rw_err = std::max({ rw_err, std::abs(r.rw_c - top * circles.size()),
                        std::abs(r.rwtd - top * div),
                        std::abs(r.rw_s - top * r.n_scaffolds) });
    ++checked;
  }
  ok &= rw_err < 1e-12;
  return { ok, std::to_string(checked) + " crafted sets, rw_err="
                   + fmt(rw_err) };
}

/* 9. Scaffold-seeded generation */

Outcome scaffold_seeded() {
  RunConfig c = load_config(kSource + "/configs/desk.cfg");
  Policy pi(c.model, c.encoding_width());
  pi.initialize(c.training.random_seed);
  const MolGraph core = parse_smiles("c1ccccc1");
  const State s0 = seed_state(core, c.mdp);
  ConditioningContext ctx = base_context(c);
  const int n = 1000;
  std::vector<State> starts(n, s0);
  std::vector<std::vector<double>> conds(n, ctx.encoding);
  SamplingOptions opt;
  std::mt19937_64 rng(9);
  auto ts = sample_trajectories(pi, c.mdp, starts, conds, opt, rng);
  int kept = 0;
  std::set<std::string> distinct;
  for (const Trajectory &t: ts) {
    const MolGraph &g = t.last().graph;
    bool ok = g.num_atoms() >= core.num_atoms();
    for (int v = 0; ok && v < core.num_atoms(); ++v)
      ok = g.atom(v).element == core.atom(v).element
           && g.atom(v).chirality == core.atom(v).chirality;
    for (const Bond &b: core.bonds()) {
      const int gb = ok ? g.find_bond(b.u, b.v) : -1;
      ok = ok && gb >= 0 && g.bond(gb).order == b.order;
    }
    // No extra bonds among core atoms either.
    for (const Bond &b: g.bonds())
      ok = ok && !(b.u < core.num_atoms() && b.v < core.num_atoms()
                   && core.find_bond(b.u, b.v) < 0);
    kept += ok;
    distinct.insert(canonical_key(g).text);
  }
  return { kept == n, std::to_string(kept) + "/" + std::to_string(n)
                          + " keep the core, "
                          + std::to_string(distinct.size()) + " distinct" };
}

/* 10. Determinism */

Outcome determinism() {
  std::vector<std::string> logs, samples;
  for (int rep = 0; rep < 2; ++rep) {
    RunConfig c = toy_config();
    const std::string tag = "det" + std::to_string(rep);
    c.io.checkpoint_dir = (work_dir() / tag).string();
    c.io.log_path = (work_dir() / tag / "train.log").string();
    c.training.max_num_iter = 300;
    c.training.num_workers = 1;
    cli::Options o;
    o.config = write_cfg(c, tag + ".cfg");
    if (quiet(cli::pretrain, o) != cli::kOk)
      return { false, "training failed" };
    o.checkpoint = c.io.checkpoint_dir + "/last.ckpt";
    o.out = (work_dir() / tag / "samples.tsv").string();
    o.n = 2000;
    if (quiet(cli::sample, o) != cli::kOk)
      return { false, "sampling failed" };
    logs.push_back(slurp(c.io.log_path));
    samples.push_back(slurp(o.out));
  }
  const bool ok = !logs[0].empty() && logs[0] == logs[1]
                  && !samples[0].empty() && samples[0] == samples[1];
  return { ok, std::string("logs ") + (logs[0] == logs[1] ? "equal" : "differ")
                   + ", samples "
                   + (samples[0] == samples[1] ? "equal" : "differ") };
}

}  // namespace

int main(int argc, char **argv) {
  // Optional criterion ids restrict the run.
  std::set<int> only;
  for (int i = 1; i < argc; ++i)
    only.insert(std::stoi(argv[i]));
  struct Criterion {
    int id;
    const char *name;
    double budget_s;
    Outcome (*run)();
  };
  const Criterion all[] = {
    { 1, "reward exactness", 1, reward_exactness },
    { 2, "mask soundness / validity", 30, validity },
    { 3, "SMILES round-trip", 60, smiles_round_trip },
    { 4, "gradient correctness", 120, gradients },
    { 5, "TB distribution matching", 600, tb_matching },
    { 6, "RTB posterior correctness", 600, rtb_posterior },
    { 7, "offline/MLE pathway", 300, offline_pathway },
    { 8, "metric oracle equivalence", 60, metric_oracles },
    { 9, "scaffold-seeded generation", 120, scaffold_seeded },
    { 10, "determinism", 300, determinism },
  };
  int failed = 0;
  for (const Criterion &c: all) {
    if (!only.empty() && !only.count(c.id))
      continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception &e) {
      out = { false, std::string("exception: ") + e.what() };
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    const bool pass = out.pass && secs < c.budget_s;
    failed += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name
              << ": " << out.detail << " (" << fmt(secs) << " s, budget "
              << c.budget_s << " s)" << std::endl;
  }
  return failed;
}
