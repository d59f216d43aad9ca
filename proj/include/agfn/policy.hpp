//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_POLICY_HPP_
#define AGFN_POLICY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "agfn/autodiff.hpp"
#include "agfn/mdp.hpp"

namespace agfn {

class PolicyError: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct ModelConfig {
  int num_layers = 3;
  int num_emb = 32;
  int num_heads = 1;
  int num_mlp_layers = 1;
  // Hidden width of the MLP heads, in multiples of num_emb.
  int i2h_width = 1;
  bool parameterize_pb = true;

  void validate() const {
    if (num_layers < 0 || num_emb < 1 || num_heads < 1 || num_mlp_layers < 0
        || i2h_width < 1)
      throw PolicyError("model sizes must be positive");
    if (num_emb % num_heads != 0)
      throw PolicyError("num_emb must be divisible by num_heads");
  }
};

inline constexpr int kParamGroupPolicy = 0;
inline constexpr int kParamGroupLogZ = 1;

namespace internal {

// Node feature layout: element, chirality, degree, implicit H, spare
// valence, frozen flag, virtual flag.
inline constexpr int kFeatElement = 0;
inline constexpr int kFeatChirality = kFeatElement + kNumElements;
inline constexpr int kFeatDegree = kFeatChirality + 3;
inline constexpr int kFeatHydrogens = kFeatDegree + 7;
inline constexpr int kFeatSpare = kFeatHydrogens + 5;
inline constexpr int kFeatFrozen = kFeatSpare + 7;
inline constexpr int kFeatVirtual = kFeatFrozen + 1;
inline constexpr int kNumFeatures = kFeatVirtual + 1;

// Bond labels: unset, single, double, triple, virtual.
inline constexpr int kNumEdgeLabels = 5;
inline constexpr int kVirtualEdgeLabel = 4;

// Head output layouts.
// Element logits, two chirality logits, then the attach logit.
inline constexpr int kNodeFwdOut = kNumElements + 3;
inline constexpr int kNodeBwdOut = 2;                 // DeleteNode, Unset
inline constexpr int kEdgeFwdOut = 4;  // SetEdgeAttr 1..3, AddEdge on pairs
inline constexpr int kEdgeBwdOut = 2;  // DeleteEdge, Unset
inline constexpr int kGraphOut = 1 + kNumElements;  // Stop, first AddNode

}  // namespace internal

struct PolicyQuery {
  int state = 0;  // index into the evaluated states
  std::span<const Action> legal;
};

// Equivariant graph policy: additive-aggregation convolution concatenated
// with the layer input, then attention over neighbours. Conditioning enters
// through a virtual node linked to every atom.
class Policy {
public:
  Policy(const ModelConfig &cfg, int cond_width): cfg_(cfg),
                                                  cond_width_(cond_width) {
    cfg_.validate();
    if (cond_width < 0)
      throw PolicyError("negative conditioning width");
    build();
  }

  const ModelConfig &config() const { return cfg_; }
  int cond_width() const { return cond_width_; }
  ad::ParamSet &params() { return params_; }
  const ad::ParamSet &params() const { return params_; }

  // Scaled uniform initialisation, rounded to float precision.
  void initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (ad::Param &p: params_.all()) {
      if (p.name.ends_with(".b")) {
        p.value.setZero();
        continue;
      }
      const double limit = std::sqrt(6.0 / (p.value.rows() + p.value.cols()));
      std::uniform_real_distribution<double> u(-limit, limit);
      for (Eigen::Index i = 0; i < p.value.size(); ++i)
        p.value.data()[i] = static_cast<float>(u(rng));
    }
  }

  void set_zero() {
    for (ad::Param &p: params_.all())
      p.value.setZero();
  }

  struct Output {
    ad::Var logp;             // masked log-probabilities, all queries stacked
    std::vector<int> offset;  // query q owns rows [offset[q], offset[q+1])
  };

  // Log-probabilities of every legal action of each query. Forward queries
  // must list forward actions; backward queries backward ones.
  Output log_probs(ad::Tape &tape, std::span<const State *const> states,
                   std::span<const std::vector<double> *const> conds,
                   std::span<const PolicyQuery> queries) const {
    if (states.size() != conds.size())
      throw PolicyError("one conditioning vector per state");
    Graph G = assemble(states, conds);
    ad::Var h = trunk(tape, G);

    // Which heads are needed, and the candidate pairs.
    bool need_fwd = false, need_bwd = false;
    std::map<std::tuple<int, int, int>, int> pair_row;
    std::vector<int> pair_a, pair_b, pair_v;
    for (const PolicyQuery &q: queries) {
      if (q.legal.empty())
        throw PolicyError("query without legal actions");
      const bool fwd = is_forward(q.legal[0].type);
      need_fwd |= fwd;
      need_bwd |= !fwd;
      for (const Action &x: q.legal) {
        if (x.type != ActionType::add_edge)
          continue;
        auto key = std::make_tuple(q.state, x.a, x.b);
        if (pair_row.emplace(key, static_cast<int>(pair_a.size())).second) {
          pair_a.push_back(G.atom_rows[G.atom_base[q.state] + x.a]);
          pair_b.push_back(G.atom_rows[G.atom_base[q.state] + x.b]);
          pair_v.push_back(G.virt_row[q.state]);
        }
      }
    }

    const bool learned_b = cfg_.parameterize_pb;
    Heads H;
    ad::Var atoms_in = node_inputs(tape, h, G);
    ad::Var bonds_in = pair_inputs(tape, h, G.bond_u, G.bond_v, G.bond_virt);
    ad::Var virt = tape.gather_rows(h, G.virt_row);
    H.graph = mlp(tape, "head.graph", virt);
    if (need_fwd) {
      H.node_f = node_forward(tape, mlp(tape, "head.node_f", atoms_in));
      H.edge_f = mlp(tape, "head.edge_f", bonds_in);
      if (!pair_a.empty())
        H.pair_f = mlp(tape, "head.edge_f",
                       pair_inputs(tape, h, pair_a, pair_b, pair_v));
    }
    if (need_bwd && learned_b) {
      H.node_b = mlp(tape, "head.node_b", atoms_in);
      H.edge_b = mlp(tape, "head.edge_b", bonds_in);
    }

    // Route every legal action to one head entry.
    enum Src { kGraph, kNodeF, kEdgeF, kPairF, kNodeB, kEdgeB, kZero, kSrcs };
    std::vector<std::vector<std::pair<int, int>>> entries(kSrcs);
    std::vector<std::pair<int, int>> where;  // (source, index in source)
    std::vector<int> seg;
    Output out;
    out.offset.push_back(0);
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
      const PolicyQuery &q = queries[qi];
      const int ab = G.atom_base[q.state];
      const int bb = G.bond_base[q.state];
      for (const Action &x: q.legal) {
        int src = kZero, r = 0, c = 0;
        switch (x.type) {
        case ActionType::add_node:
          if (x.a < 0) {
            src = kGraph, r = q.state, c = 1 + x.value;
          } else {
            src = kNodeF, r = ab + x.a, c = x.value;
          }
          break;
        case ActionType::set_node_attr:
          src = kNodeF, r = ab + x.a, c = kNumElements + x.value - 1;
          break;
        case ActionType::add_edge:
          src = kPairF, r = pair_row.at({ q.state, x.a, x.b }), c = 3;
          break;
        case ActionType::set_edge_attr:
          src = kEdgeF, r = bb + x.a, c = x.value - 1;
          break;
        case ActionType::stop:
          src = kGraph, r = q.state, c = 0;
          break;
        case ActionType::delete_node:
          src = learned_b ? kNodeB : kZero, r = ab + x.a, c = 0;
          break;
        case ActionType::unset_node_attr:
          src = learned_b ? kNodeB : kZero, r = ab + x.a, c = 1;
          break;
        case ActionType::delete_edge:
          src = learned_b ? kEdgeB : kZero, r = bb + x.a, c = 0;
          break;
        case ActionType::unset_edge_attr:
          src = learned_b ? kEdgeB : kZero, r = bb + x.a, c = 1;
          break;
        }
        where.emplace_back(src, static_cast<int>(entries[src].size()));
        entries[src].emplace_back(r, c);
        seg.push_back(static_cast<int>(qi));
      }
      out.offset.push_back(static_cast<int>(seg.size()));
    }

    const ad::Var sources[kSrcs - 1] = { H.graph,  H.node_f, H.edge_f,
                                         H.pair_f, H.node_b, H.edge_b };
    std::vector<ad::Var> parts;
    std::vector<int> start(kSrcs, 0);
    int total = 0;
    for (int s = 0; s < kSrcs; ++s) {
      if (entries[s].empty())
        continue;
      start[s] = total;
      total += static_cast<int>(entries[s].size());
      if (s == kZero)
        parts.push_back(tape.constant(
            ad::Mat::Zero(static_cast<Eigen::Index>(entries[s].size()), 1)));
      else
        parts.push_back(tape.gather_entries(sources[s], entries[s]));
    }
    std::vector<int> perm(where.size());
    for (std::size_t i = 0; i < where.size(); ++i)
      perm[i] = start[where[i].first] + where[i].second;
    ad::Var logits = tape.gather_rows(tape.concat_rows(parts), perm);
    out.logp = tape.segment_log_softmax(logits, std::move(seg),
                                        static_cast<int>(queries.size()));
    return out;
  }

  // log Z(c) for each row, as a column.
  ad::Var log_z(ad::Tape &tape,
                std::span<const std::vector<double> *const> conds) const {
    ad::Mat c(static_cast<Eigen::Index>(conds.size()), cond_width_);
    for (std::size_t i = 0; i < conds.size(); ++i)
      c.row(static_cast<Eigen::Index>(i)) = row_of(*conds[i]);
    return mlp(tape, "logz", tape.constant(std::move(c)));
  }

private:
  struct Graph {
    ad::Mat features;
    ad::Mat cond;
    std::vector<int> atom_rows;   // h rows of all atoms, stacked by state
    std::vector<int> atom_virt;   // virtual row for each atom
    std::vector<int> atom_base;   // per state, index of its first atom
    std::vector<int> bond_base;   // per state, index of its first bond
    std::vector<int> bond_u, bond_v, bond_virt;  // h rows per bond
    std::vector<int> virt_row;    // per state
    std::vector<int> src, dst, label;  // directed message edges
    int rows = 0;
  };

  struct Heads {
    ad::Var graph, node_f, edge_f, pair_f, node_b, edge_b;
  };

  Eigen::RowVectorXd row_of(const std::vector<double> &c) const {
    if (static_cast<int>(c.size()) != cond_width_)
      throw PolicyError("conditioning width mismatch: got "
                        + std::to_string(c.size()) + ", expected "
                        + std::to_string(cond_width_));
    return Eigen::Map<const Eigen::RowVectorXd>(c.data(), cond_width_);
  }

  Graph assemble(std::span<const State *const> states,
                 std::span<const std::vector<double> *const> conds) const {
    using namespace internal;
    Graph G;
    int rows = 0, atoms = 0, bonds = 0;
    for (const State *s: states) {
      rows += s->graph.num_atoms() + 1;
      atoms += s->graph.num_atoms();
      bonds += s->graph.num_bonds();
    }
    G.rows = rows;
    G.features = ad::Mat::Zero(rows, kNumFeatures);
    G.cond.resize(static_cast<Eigen::Index>(states.size()), cond_width_);
    G.atom_rows.reserve(atoms);
    G.bond_u.reserve(bonds);
    int r = 0, atom_count = 0, bond_count = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const State &s = *states[i];
      const MolGraph &g = s.graph;
      const int n = g.num_atoms();
      const int base = r;
      const int virt = r + n;
      G.atom_base.push_back(atom_count);
      G.bond_base.push_back(bond_count);
      G.virt_row.push_back(virt);
      for (int v = 0; v < n; ++v) {
        auto f = G.features.row(base + v);
        f(kFeatElement + element_index(g.atom(v).element)) = 1;
        f(kFeatChirality + static_cast<int>(g.atom(v).chirality)) = 1;
        f(kFeatDegree + std::min(g.degree(v), 6)) = 1;
        f(kFeatHydrogens + std::min(implicit_hydrogens(g, v), 4)) = 1;
        f(kFeatSpare + std::clamp(spare_valence(g, v), 0, 6)) = 1;
        f(kFeatFrozen) = v < s.frozen ? 1 : 0;
        G.atom_rows.push_back(base + v);
        G.atom_virt.push_back(virt);
        // Virtual links in both directions.
        G.src.push_back(virt), G.dst.push_back(base + v);
        G.label.push_back(kVirtualEdgeLabel);
        G.src.push_back(base + v), G.dst.push_back(virt);
        G.label.push_back(kVirtualEdgeLabel);
      }
      G.features(virt, kFeatVirtual) = 1;
      for (const Bond &b: g.bonds()) {
        const int l = order_value(b.order);
        G.src.push_back(base + b.u), G.dst.push_back(base + b.v);
        G.label.push_back(l);
        G.src.push_back(base + b.v), G.dst.push_back(base + b.u);
        G.label.push_back(l);
        G.bond_u.push_back(base + b.u);
        G.bond_v.push_back(base + b.v);
        G.bond_virt.push_back(virt);
      }
      G.cond.row(static_cast<Eigen::Index>(i)) = row_of(*conds[i]);
      r += n + 1;
      atom_count += n;
      bond_count += g.num_bonds();
    }
    return G;
  }

  ad::Var p(ad::Tape &tape, const std::string &name) const {
    const int i = params_.find(name);
    if (i < 0)
      throw PolicyError("missing parameter " + name);
    return tape.param(params_[i]);
  }

  ad::Var linear(ad::Tape &tape, const std::string &name, ad::Var x) const {
    return tape.add_row(tape.matmul(x, p(tape, name + ".w")),
                        p(tape, name + ".b"));
  }

  ad::Var mlp(ad::Tape &tape, const std::string &name, ad::Var x) const {
    for (int i = 0; i < cfg_.num_mlp_layers; ++i)
      x = tape.relu(linear(tape, name + "." + std::to_string(i), x));
    return linear(tape, name + ".out", x);
  }

  ad::Var trunk(ad::Tape &tape, const Graph &G) const {
    const int d = cfg_.num_emb;
    ad::Var x = tape.constant(G.features);
    ad::Var h = tape.matmul(x, p(tape, "embed.w"));
    ad::Var c = linear(tape, "cond", tape.constant(G.cond));
    h = tape.add(h, tape.scatter_add_rows(c, G.virt_row, G.rows));

    // Attention runs over message edges plus self loops.
    std::vector<int> asrc = G.src, adst = G.dst;
    for (int v = 0; v < G.rows; ++v)
      asrc.push_back(v), adst.push_back(v);
    const int dh = d / cfg_.num_heads;
    const double inv = 1.0 / std::sqrt(static_cast<double>(dh));

    for (int l = 0; l < cfg_.num_layers; ++l) {
      const std::string L = "layer" + std::to_string(l) + ".";
      // Additive-aggregation convolution.
      ad::Var msg = tape.add(
          tape.gather_rows(tape.matmul(h, p(tape, L + "msg.w")), G.src),
          tape.gather_rows(p(tape, L + "edge.w"), G.label));
      ad::Var agg = tape.scatter_add_rows(msg, G.dst, G.rows);
      ad::Var conv = tape.relu(tape.add(agg, linear(tape, L + "self", h)));
      ad::Var z = tape.relu(linear(tape, L + "mix", tape.concat_cols(h, conv)));
      // Attention.
      ad::Var q = tape.matmul(z, p(tape, L + "q.w"));
      ad::Var k = tape.matmul(z, p(tape, L + "k.w"));
      ad::Var v = tape.matmul(z, p(tape, L + "v.w"));
      ad::Var heads;
      for (int hh = 0; hh < cfg_.num_heads; ++hh) {
        ad::Var qh = cfg_.num_heads == 1 ? q : tape.slice_cols(q, hh * dh, dh);
        ad::Var kh = cfg_.num_heads == 1 ? k : tape.slice_cols(k, hh * dh, dh);
        ad::Var vh = cfg_.num_heads == 1 ? v : tape.slice_cols(v, hh * dh, dh);
        ad::Var score = tape.scale(
            tape.row_dot(tape.gather_rows(qh, adst), tape.gather_rows(kh, asrc)),
            inv);
        ad::Var alpha = tape.segment_softmax(score, adst, G.rows);
        ad::Var o = tape.scatter_add_rows(
            tape.scale_rows(tape.gather_rows(vh, asrc), alpha), adst, G.rows);
        heads = hh == 0 ? o : tape.concat_cols(heads, o);
      }
      h = tape.add(h, tape.relu(linear(tape, L + "out", heads)));
    }
    return h;
  }

  // AddNode(v, e) scores attach(v) + element(v, e); the chirality columns
  // pass through.
  ad::Var node_forward(ad::Tape &tape, ad::Var raw) const {
    ad::Var attach = tape.matmul(tape.slice_cols(raw, kNumElements + 2, 1),
                                 tape.constant(ad::Mat::Ones(1, kNumElements)));
    ad::Var elem = tape.add(tape.slice_cols(raw, 0, kNumElements), attach);
    return tape.concat_cols(elem, tape.slice_cols(raw, kNumElements, 2));
  }

  ad::Var node_inputs(ad::Tape &tape, ad::Var h, const Graph &G) const {
    return tape.add(tape.gather_rows(h, G.atom_rows),
                    tape.gather_rows(h, G.atom_virt));
  }

  // Symmetric in the two endpoints.
  ad::Var pair_inputs(ad::Tape &tape, ad::Var h, const std::vector<int> &a,
                      const std::vector<int> &b,
                      const std::vector<int> &virt) const {
    return tape.add(tape.add(tape.gather_rows(h, a), tape.gather_rows(h, b)),
                    tape.gather_rows(h, virt));
  }

  void add_linear(const std::string &name, int in, int out, int group) {
    params_.add(name + ".w", ad::Mat::Zero(in, out), group);
    params_.add(name + ".b", ad::Mat::Zero(1, out), group);
  }

  void add_mlp(const std::string &name, int in, int out, int group) {
    int width = in;
    for (int i = 0; i < cfg_.num_mlp_layers; ++i) {
      const int hidden = cfg_.num_emb * cfg_.i2h_width;
      add_linear(name + "." + std::to_string(i), width, hidden, group);
      width = hidden;
    }
    add_linear(name + ".out", width, out, group);
  }

  void build() {
    using namespace internal;
    const int d = cfg_.num_emb;
    params_.add("embed.w", ad::Mat::Zero(kNumFeatures, d));
    add_linear("cond", cond_width_, d, kParamGroupPolicy);
    for (int l = 0; l < cfg_.num_layers; ++l) {
      const std::string L = "layer" + std::to_string(l) + ".";
      params_.add(L + "msg.w", ad::Mat::Zero(d, d));
      params_.add(L + "edge.w", ad::Mat::Zero(kNumEdgeLabels, d));
      add_linear(L + "self", d, d, kParamGroupPolicy);
      add_linear(L + "mix", 2 * d, d, kParamGroupPolicy);
      params_.add(L + "q.w", ad::Mat::Zero(d, d));
      params_.add(L + "k.w", ad::Mat::Zero(d, d));
      params_.add(L + "v.w", ad::Mat::Zero(d, d));
      add_linear(L + "out", d, d, kParamGroupPolicy);
    }
    add_mlp("head.graph", d, kGraphOut, kParamGroupPolicy);
    add_mlp("head.node_f", d, kNodeFwdOut, kParamGroupPolicy);
    add_mlp("head.edge_f", d, kEdgeFwdOut, kParamGroupPolicy);
    if (cfg_.parameterize_pb) {
      add_mlp("head.node_b", d, kNodeBwdOut, kParamGroupPolicy);
      add_mlp("head.edge_b", d, kEdgeBwdOut, kParamGroupPolicy);
    }
    add_mlp("logz", cond_width_, 1, kParamGroupLogZ);
  }

  ModelConfig cfg_;
  int cond_width_;
  mutable ad::ParamSet params_;  // grads accumulate during const forwards
};

}  // namespace agfn

#endif  // AGFN_POLICY_HPP_
