//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_MDP_HPP_
#define AGFN_MDP_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "agfn/molgraph.hpp"

namespace agfn {

class MdpError: public std::logic_error {
public:
  using std::logic_error::logic_error;
};

enum class ActionType : std::uint8_t {
  add_node,
  add_edge,
  set_node_attr,
  set_edge_attr,
  stop,
  delete_node,
  delete_edge,
  unset_node_attr,
  unset_edge_attr,
};

inline constexpr int kNumActionTypes = 9;

constexpr bool is_forward(ActionType t) {
  return static_cast<int>(t) <= static_cast<int>(ActionType::stop);
}

// Field use by type:
//   add_node        a = attach node (-1 on the empty state), value = element
//   add_edge        a < b are the endpoints
//   set_node_attr   a = node, value = chirality
//   set_edge_attr   a = bond, value = bond order
//   delete_node, unset_node_attr   a = node
//   delete_edge, unset_edge_attr   a = bond
struct Action {
  ActionType type = ActionType::stop;
  int a = -1;
  int b = -1;
  int value = 0;

  friend bool operator==(const Action &, const Action &) = default;
};

inline std::string to_string(const Action &x) {
  auto s = [](int v) { return std::to_string(v); };
  switch (x.type) {
  case ActionType::add_node:
    return "AddNode(" + (x.a < 0 ? std::string("-") : s(x.a)) + ","
           + std::string(symbol(element_from_index(x.value))) + ")";
  case ActionType::add_edge:
    return "AddEdge(" + s(x.a) + "," + s(x.b) + ")";
  case ActionType::set_node_attr:
    return "SetNodeAttr(" + s(x.a) + "," + (x.value == 1 ? "R" : "S") + ")";
  case ActionType::set_edge_attr:
    return "SetEdgeAttr(" + s(x.a) + "," + s(x.value) + ")";
  case ActionType::stop:
    return "Stop";
  case ActionType::delete_node:
    return "DeleteNode(" + s(x.a) + ")";
  case ActionType::delete_edge:
    return "DeleteEdge(" + s(x.a) + ")";
  case ActionType::unset_node_attr:
    return "UnsetNodeAttr(" + s(x.a) + ")";
  case ActionType::unset_edge_attr:
    return "UnsetEdgeAttr(" + s(x.a) + ")";
  }
  return "?";
}

struct MdpConfig {
  GraphLimits limits;
  // Forward steps allowed from s0, Stop included.
  int max_traj_len = 40;
  bool allow_chirality = true;
  // Bit i enables element_from_index(i).
  unsigned element_mask = (1U << kNumElements) - 1;
  int max_bond_order = 3;

  bool element_allowed(int e) const { return (element_mask >> e) & 1U; }
};

// Nodes [0, frozen) form an immutable seed. base_steps is the step count of
// the seed so budgets are measured from s0.
struct State {
  MolGraph graph;
  int frozen = 0;
  int base_steps = 0;
  bool terminal = false;

  friend bool operator==(const State &, const State &) = default;
};

inline int unset_bond_count(const MolGraph &g) {
  int u = 0;
  for (const Bond &b: g.bonds())
    u += b.order == BondOrder::unset;
  return u;
}

// Forward steps needed to build g from the empty state, Stop excluded. Every
// construction path has this length: one step per node, per ring-closing
// edge, per set bond order and per chirality tag.
inline int construction_steps(const MolGraph &g) {
  if (g.empty())
    return 0;
  int steps = g.num_bonds() + 1;
  for (const Bond &b: g.bonds())
    steps += b.order != BondOrder::unset;
  for (const Atom &a: g.atoms())
    steps += a.chirality != Chirality::none;
  return steps;
}

inline int steps_taken(const State &s) {
  return construction_steps(s.graph) - s.base_steps;
}

inline State empty_state() { return {}; }

// Scaffold-seeded s0: every node frozen.
inline State seed_state(const MolGraph &scaffold, const MdpConfig &cfg = {}) {
  if (auto err = validation_error(scaffold, cfg.limits))
    throw MdpError("invalid seed: " + *err);
  if (!all_bonds_set(scaffold))
    throw MdpError("seed has unset bond orders");
  State s;
  s.graph = scaffold;
  s.frozen = scaffold.num_atoms();
  s.base_steps = construction_steps(scaffold);
  return s;
}

namespace internal {

inline bool is_frozen(const State &s, int v) { return v < s.frozen; }

inline bool frozen_bond(const State &s, int b) {
  const Bond &bd = s.graph.bond(b);
  return is_frozen(s, bd.u) && is_frozen(s, bd.v);
}

// Remaining budget after a non-Stop step that leaves `unset_after` unset
// bonds: each must still be set, then Stop.
inline bool within_budget(const State &s, const MdpConfig &cfg,
                          int unset_after) {
  return steps_taken(s) + 1 + unset_after + 1 <= cfg.max_traj_len;
}

}  // namespace internal

inline bool forward_legal(const State &s, const Action &x,
                          const MdpConfig &cfg = {}) {
  if (s.terminal)
    return false;
  const MolGraph &g = s.graph;
  const int n = g.num_atoms();
  const int m = g.num_bonds();
  const int unset = unset_bond_count(g);
  switch (x.type) {
  case ActionType::add_node: {
    if (x.value < 0 || x.value >= kNumElements || !cfg.element_allowed(x.value))
      return false;
    if (n >= cfg.limits.max_nodes)
      return false;
    if (x.a < 0) {
      return n == 0 && internal::within_budget(s, cfg, 0);
    }
    if (x.a >= n || m >= cfg.limits.max_edges)
      return false;
    return spare_valence(g, x.a) >= 1
           && internal::within_budget(s, cfg, unset + 1);
  }
  case ActionType::add_edge:
    if (x.a < 0 || x.b >= n || x.a >= x.b)
      return false;
    if (m >= cfg.limits.max_edges || g.find_bond(x.a, x.b) >= 0)
      return false;
    if (internal::is_frozen(s, x.a) && internal::is_frozen(s, x.b))
      return false;
    return spare_valence(g, x.a) >= 1 && spare_valence(g, x.b) >= 1
           && internal::within_budget(s, cfg, unset + 1);
  case ActionType::set_node_attr:
    if (!cfg.allow_chirality || x.a < 0 || x.a >= n)
      return false;
    if (x.value != static_cast<int>(Chirality::r)
        && x.value != static_cast<int>(Chirality::s))
      return false;
    return !internal::is_frozen(s, x.a) && g.atom(x.a).element == Element::C
           && g.atom(x.a).chirality == Chirality::none
           && internal::within_budget(s, cfg, unset);
  case ActionType::set_edge_attr: {
    if (x.a < 0 || x.a >= m || x.value < 1 || x.value > cfg.max_bond_order)
      return false;
    const Bond &bd = g.bond(x.a);
    if (bd.order != BondOrder::unset)
      return false;
    // The unset bond already holds one unit of valence at each end.
    const int extra = x.value - 1;
    return spare_valence(g, bd.u) >= extra && spare_valence(g, bd.v) >= extra
           && internal::within_budget(s, cfg, unset - 1);
  }
  case ActionType::stop:
    return n > 0 && unset == 0 && steps_taken(s) + 1 <= cfg.max_traj_len;
  default:
    return false;
  }
}

// Legal constructive actions in a fixed order: AddNode (by attach node, then
// element), AddEdge (lexicographic pairs), SetNodeAttr, SetEdgeAttr, Stop.
inline std::vector<Action> forward_actions(const State &s,
                                           const MdpConfig &cfg = {}) {
  if (s.terminal)
    throw MdpError("forward_actions on a terminal state");
  const MolGraph &g = s.graph;
  const int n = g.num_atoms();
  std::vector<Action> out;
  auto push = [&](Action x) {
    if (forward_legal(s, x, cfg))
      out.push_back(x);
  };
  if (n == 0) {
    for (int e = 0; e < kNumElements; ++e)
      push({ ActionType::add_node, -1, -1, e });
    return out;
  }
  for (int v = 0; v < n; ++v) {
    for (int e = 0; e < kNumElements; ++e)
      push({ ActionType::add_node, v, -1, e });
  }
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v)
      push({ ActionType::add_edge, u, v, 0 });
  }
  for (int v = 0; v < n; ++v) {
    push({ ActionType::set_node_attr, v, -1, static_cast<int>(Chirality::r) });
    push({ ActionType::set_node_attr, v, -1, static_cast<int>(Chirality::s) });
  }
  for (int b = 0; b < g.num_bonds(); ++b) {
    for (int k = 1; k <= 3; ++k)
      push({ ActionType::set_edge_attr, b, -1, k });
  }
  push({ ActionType::stop });
  return out;
}

inline bool backward_legal(const State &s, const Action &x,
                           std::span<const char> ring_bonds) {
  if (s.terminal)
    return x.type == ActionType::stop;
  const MolGraph &g = s.graph;
  const int n = g.num_atoms();
  const int m = g.num_bonds();
  switch (x.type) {
  case ActionType::delete_node: {
    if (x.a < 0 || x.a >= n || internal::is_frozen(s, x.a))
      return false;
    if (g.degree(x.a) > 1 || g.atom(x.a).chirality != Chirality::none)
      return false;
    if (g.degree(x.a) == 0)
      return n == 1;
    return g.bond(g.incident(x.a)[0]).order == BondOrder::unset;
  }
  case ActionType::delete_edge:
    return x.a >= 0 && x.a < m && !internal::frozen_bond(s, x.a)
           && g.bond(x.a).order == BondOrder::unset && ring_bonds[x.a];
  case ActionType::unset_node_attr:
    return x.a >= 0 && x.a < n && !internal::is_frozen(s, x.a)
           && g.atom(x.a).chirality != Chirality::none;
  case ActionType::unset_edge_attr:
    return x.a >= 0 && x.a < m && !internal::frozen_bond(s, x.a)
           && g.bond(x.a).order != BondOrder::unset;
  default:
    return false;
  }
}

inline bool backward_legal(const State &s, const Action &x) {
  return backward_legal(s, x, ring_bond_flags(s.graph));
}

// Legal deconstructive actions in a fixed order: DeleteNode, DeleteEdge,
// UnsetNodeAttr, UnsetEdgeAttr. A terminal state has the single parent
// reached by undoing Stop.
inline std::vector<Action> backward_actions(const State &s) {
  if (s.terminal)
    return { Action { ActionType::stop } };
  const MolGraph &g = s.graph;
  if (g.empty())
    throw MdpError("backward_actions on the empty state");
  if (s.frozen > 0 && g.num_atoms() == s.frozen
      && construction_steps(g) == s.base_steps)
    throw MdpError("backward_actions on the seed state");
  const auto ring = ring_bond_flags(g);
  std::vector<Action> out;
  auto push = [&](Action x) {
    if (backward_legal(s, x, ring))
      out.push_back(x);
  };
  for (int v = 0; v < g.num_atoms(); ++v)
    push({ ActionType::delete_node, v });
  for (int b = 0; b < g.num_bonds(); ++b)
    push({ ActionType::delete_edge, b });
  for (int v = 0; v < g.num_atoms(); ++v)
    push({ ActionType::unset_node_attr, v });
  for (int b = 0; b < g.num_bonds(); ++b)
    push({ ActionType::unset_edge_attr, b });
  return out;
}

inline bool is_initial(const State &s) {
  return !s.terminal && s.graph.num_atoms() == s.frozen
         && construction_steps(s.graph) == s.base_steps;
}

// Applies a forward or backward action. Legality is checked; an illegal
// action is a programming error.
inline State apply(const State &s, const Action &x, const MdpConfig &cfg = {}) {
  State t = s;
  MolGraph &g = t.graph;
  if (is_forward(x.type)) {
    if (!forward_legal(s, x, cfg))
      throw MdpError("illegal forward action " + to_string(x));
    switch (x.type) {
    case ActionType::add_node: {
      const int v = g.add_atom(element_from_index(x.value));
      if (x.a >= 0)
        g.add_bond(x.a, v, BondOrder::unset);
      break;
    }
    case ActionType::add_edge:
      g.add_bond(x.a, x.b, BondOrder::unset);
      break;
    case ActionType::set_node_attr:
      g.set_chirality(x.a, static_cast<Chirality>(x.value));
      break;
    case ActionType::set_edge_attr:
      g.set_bond_order(x.a, order_from_value(x.value));
      break;
    default:  // stop
      t.terminal = true;
      break;
    }
    return t;
  }
  if (!backward_legal(s, x))
    throw MdpError("illegal backward action " + to_string(x));
  switch (x.type) {
  case ActionType::delete_node:
    g.remove_atom(x.a);
    break;
  case ActionType::delete_edge:
    g.remove_bond(x.a);
    break;
  case ActionType::unset_node_attr:
    g.set_chirality(x.a, Chirality::none);
    break;
  default:  // unset_edge_attr
    g.set_bond_order(x.a, BondOrder::unset);
    break;
  }
  return t;
}

inline State apply_backward_stop(const State &s) {
  if (!s.terminal)
    throw MdpError("state is not terminal");
  State t = s;
  t.terminal = false;
  return t;
}

// The backward action undoing forward action x taken in s; it is legal in
// apply(s, x).
inline Action backward_inverse(const State &s, const Action &x) {
  switch (x.type) {
  case ActionType::add_node:
    return { ActionType::delete_node, s.graph.num_atoms() };
  case ActionType::add_edge:
    return { ActionType::delete_edge, s.graph.num_bonds() };
  case ActionType::set_node_attr:
    return { ActionType::unset_node_attr, x.a };
  case ActionType::set_edge_attr:
    return { ActionType::unset_edge_attr, x.a };
  case ActionType::stop:
    return { ActionType::stop };
  default:
    throw MdpError("not a forward action: " + to_string(x));
  }
}

// The forward action undoing backward action x taken in s'. For DeleteNode
// the re-added node is appended, so the round trip is an isomorphic
// relabelling rather than the identical state.
inline Action forward_inverse(const State &s, const Action &x) {
  const MolGraph &g = s.graph;
  switch (x.type) {
  case ActionType::delete_node: {
    int attach = -1;
    if (g.degree(x.a) == 1) {
      attach = g.bond(g.incident(x.a)[0]).other(x.a);
      if (attach > x.a)
        --attach;
    }
    return { ActionType::add_node, attach, -1,
             element_index(g.atom(x.a).element) };
  }
  case ActionType::delete_edge: {
    const Bond &bd = g.bond(x.a);
    return { ActionType::add_edge, bd.u, bd.v, 0 };
  }
  case ActionType::unset_node_attr:
    return { ActionType::set_node_attr, x.a, -1,
             static_cast<int>(g.atom(x.a).chirality) };
  case ActionType::unset_edge_attr:
    return { ActionType::set_edge_attr, x.a, -1,
             order_value(g.bond(x.a).order) };
  case ActionType::stop:
    return { ActionType::stop };
  default:
    throw MdpError("not a backward action: " + to_string(x));
  }
}

// s_0 a_0 s_1 ... s_T; log-probability terms are filled by the policy.
struct Trajectory {
  std::vector<State> states;
  std::vector<Action> actions;
  std::vector<double> logpf;
  std::vector<double> logpb;

  int length() const { return static_cast<int>(actions.size()); }
  bool terminal() const { return !states.empty() && states.back().terminal; }
  const State &last() const { return states.back(); }
};

// Chooses an index into the action list.
using ActionChooser
    = std::function<int(const State &, std::span<const Action>)>;

inline ActionChooser uniform_chooser(std::mt19937_64 &rng) {
  return [&rng](const State &, std::span<const Action> actions) {
    std::uniform_int_distribution<int> pick(
        0, static_cast<int>(actions.size()) - 1);
    return pick(rng);
  };
}

// Forward rollout from s0 until Stop.
inline Trajectory rollout(const State &s0, const ActionChooser &choose,
                          const MdpConfig &cfg = {}) {
  Trajectory t;
  t.states.push_back(s0);
  while (!t.last().terminal) {
    auto actions = forward_actions(t.last(), cfg);
    if (actions.empty())
      throw MdpError("dead end: no forward action");
    const Action x = actions.at(choose(t.last(), actions));
    t.states.push_back(apply(t.last(), x, cfg));
    t.actions.push_back(x);
  }
  return t;
}

// Samples a backward path from x to the empty state (or to the frozen seed
// given by `frozen` prefix nodes) and replays it forward from s0. The result
// ends in a graph isomorphic to x, with atoms in creation order.
inline Trajectory deconstruct(const MolGraph &x, const ActionChooser &choose,
                              const MdpConfig &cfg = {}, int frozen = 0) {
  if (auto err = validation_error(x, cfg.limits))
    throw MdpError("cannot deconstruct: " + *err);
  if (x.empty() || !all_bonds_set(x))
    throw MdpError("cannot deconstruct an incomplete molecule");
  if (frozen < 0 || frozen > x.num_atoms())
    throw MdpError("bad frozen prefix");
  State s0;
  if (frozen > 0) {
    std::vector<int> keep(frozen);
    for (int i = 0; i < frozen; ++i)
      keep[i] = i;
    s0 = seed_state(x.induced_subgraph(keep), cfg);
  }
  if (construction_steps(x) - s0.base_steps + 1 > cfg.max_traj_len)
    throw MdpError("molecule exceeds the trajectory length budget");

  // Backward pass with original atom ids carried alongside.
  State s { x, frozen, s0.base_steps, false };
  std::vector<int> ids(x.num_atoms());
  for (int i = 0; i < x.num_atoms(); ++i)
    ids[i] = i;
  struct Undo {
    ActionType type;
    int u = -1, v = -1;  // original atom ids
    int value = 0;
  };
  std::vector<Undo> undo;
  while (!is_initial(s)) {
    auto actions = backward_actions(s);
    const Action b = actions.at(choose(s, actions));
    const Action f = forward_inverse(s, b);
    Undo r { f.type };
    switch (b.type) {
    case ActionType::delete_node: {
      r.v = ids[b.a];
      r.value = f.value;
      if (s.graph.degree(b.a) == 1)
        r.u = ids[s.graph.bond(s.graph.incident(b.a)[0]).other(b.a)];
      ids.erase(ids.begin() + b.a);
      break;
    }
    case ActionType::unset_node_attr:
      r.v = ids[b.a];
      r.value = f.value;
      break;
    default: {
      const Bond &bd = s.graph.bond(b.a);
      r.u = ids[bd.u];
      r.v = ids[bd.v];
      r.value = f.value;
      break;
    }
    }
    undo.push_back(r);
    s = apply(s, b, cfg);
  }

  // Forward replay.
  Trajectory t;
  t.states.push_back(s0);
  std::vector<int> fwd(x.num_atoms(), -1);
  for (int i = 0; i < frozen; ++i)
    fwd[i] = i;
  for (auto it = undo.rbegin(); it != undo.rend(); ++it) {
    const State &cur = t.last();
    Action f { it->type };
    switch (it->type) {
    case ActionType::add_node:
      f.a = it->u < 0 ? -1 : fwd[it->u];
      f.value = it->value;
      fwd[it->v] = cur.graph.num_atoms();
      break;
    case ActionType::add_edge:
      f.a = std::min(fwd[it->u], fwd[it->v]);
      f.b = std::max(fwd[it->u], fwd[it->v]);
      break;
    case ActionType::set_node_attr:
      f.a = fwd[it->v];
      f.value = it->value;
      break;
    default:
      f.a = cur.graph.find_bond(fwd[it->u], fwd[it->v]);
      f.value = it->value;
      break;
    }
    t.states.push_back(apply(cur, f, cfg));
    t.actions.push_back(f);
  }
  t.states.push_back(apply(t.last(), Action { ActionType::stop }, cfg));
  t.actions.push_back(Action { ActionType::stop });
  return t;
}

// Replays the actions of t from its first state; true iff every state
// matches bit-exactly.
inline bool replays(const Trajectory &t, const MdpConfig &cfg = {}) {
  if (t.states.size() != t.actions.size() + 1)
    return false;
  State s = t.states.front();
  for (int i = 0; i < t.length(); ++i) {
    if (!forward_legal(s, t.actions[i], cfg))
      return false;
    s = apply(s, t.actions[i], cfg);
    if (!(s == t.states[i + 1]))
      return false;
  }
  return true;
}

}  // namespace agfn

#endif  // AGFN_MDP_HPP_
