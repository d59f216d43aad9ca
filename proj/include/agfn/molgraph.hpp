//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_MOLGRAPH_HPP_
#define AGFN_MOLGRAPH_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "agfn/element.hpp"

namespace agfn {

enum class Chirality : std::uint8_t { none, r, s };

// `unset` marks a bond whose order has not been assigned yet (intermediate
// construction states only).
enum class BondOrder : std::uint8_t { unset = 0, single = 1, double_ = 2,
                                      triple = 3 };

constexpr int order_value(BondOrder o) { return static_cast<int>(o); }

constexpr BondOrder order_from_value(int v) {
  return static_cast<BondOrder>(v);
}

class GraphError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Atom {
  Element element = Element::C;
  Chirality chirality = Chirality::none;

  friend bool operator==(const Atom &, const Atom &) = default;
};

struct Bond {
  int u = 0;
  int v = 0;
  BondOrder order = BondOrder::unset;

  int other(int a) const { return a == u ? v : u; }
  friend bool operator==(const Bond &, const Bond &) = default;
};

struct GraphLimits {
  int max_nodes = 45;
  int max_edges = 50;
};

// Attributed molecular graph. Hydrogens are implicit and derived from the
// valence model; they are never stored.
class MolGraph {
public:
  MolGraph() = default;

  int num_atoms() const { return static_cast<int>(atoms_.size()); }
  int num_bonds() const { return static_cast<int>(bonds_.size()); }
  bool empty() const { return atoms_.empty(); }

  const Atom &atom(int i) const { return atoms_.at(i); }
  const Bond &bond(int b) const { return bonds_.at(b); }
  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const Bond> bonds() const { return bonds_; }

  // Bond indices incident to atom i.
  std::span<const int> incident(int i) const { return adj_.at(i); }
  int degree(int i) const { return static_cast<int>(adj_.at(i).size()); }

  int add_atom(Element e, Chirality c = Chirality::none) {
    atoms_.push_back({e, c});
    adj_.emplace_back();
    return num_atoms() - 1;
  }

  int add_bond(int u, int v, BondOrder order) {
    check_atom(u);
    check_atom(v);
    if (u == v)
      throw GraphError("self-loop on atom " + std::to_string(u));
    if (find_bond(u, v) >= 0)
      throw GraphError("duplicate bond " + std::to_string(u) + "-"
                       + std::to_string(v));
    if (u > v)
      std::swap(u, v);
    bonds_.push_back({u, v, order});
    int b = num_bonds() - 1;
    adj_[u].push_back(b);
    adj_[v].push_back(b);
    return b;
  }

  void set_bond_order(int b, BondOrder order) { bonds_.at(b).order = order; }
  void set_chirality(int i, Chirality c) { atoms_.at(i).chirality = c; }

  int find_bond(int u, int v) const {
    if (u < 0 || v < 0 || u >= num_atoms() || v >= num_atoms())
      return -1;
    const auto &a = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
    for (int b: a) {
      const Bond &bd = bonds_[b];
      if ((bd.u == u && bd.v == v) || (bd.u == v && bd.v == u))
        return b;
    }
    return -1;
  }

  void remove_bond(int b) {
    if (b < 0 || b >= num_bonds())
      throw GraphError("bond index out of range");
    bonds_.erase(bonds_.begin() + b);
    rebuild_adjacency();
  }

  // Removes atom i and its bonds; atoms after i shift down by one.
  void remove_atom(int i) {
    check_atom(i);
    std::vector<Bond> kept;
    kept.reserve(bonds_.size());
    for (Bond bd: bonds_) {
      if (bd.u == i || bd.v == i)
        continue;
      if (bd.u > i)
        --bd.u;
      if (bd.v > i)
        --bd.v;
      kept.push_back(bd);
    }
    atoms_.erase(atoms_.begin() + i);
    bonds_ = std::move(kept);
    rebuild_adjacency();
  }

  bool is_connected() const {
    if (atoms_.empty())
      return true;
    std::vector<char> seen(atoms_.size(), 0);
    std::vector<int> stack { 0 };
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b: adj_[a]) {
        int n = bonds_[b].other(a);
        if (!seen[n]) {
          seen[n] = 1;
          ++count;
          stack.push_back(n);
        }
      }
    }
    return count == num_atoms();
  }

  // Returns a copy where atom i becomes atom perm[i].
  MolGraph permuted(std::span<const int> perm) const {
    if (static_cast<int>(perm.size()) != num_atoms())
      throw GraphError("permutation size mismatch");
    MolGraph out;
    out.atoms_.resize(atoms_.size());
    out.adj_.resize(atoms_.size());
    for (int i = 0; i < num_atoms(); ++i)
      out.atoms_[perm[i]] = atoms_[i];
    for (const Bond &bd: bonds_)
      out.add_bond(perm[bd.u], perm[bd.v], bd.order);
    return out;
  }

  // Induced subgraph over `keep` (ascending original indices preserved in
  // order).
  MolGraph induced_subgraph(std::span<const int> keep) const {
    std::vector<int> map(atoms_.size(), -1);
    MolGraph out;
    for (int i: keep) {
      map[i] = out.add_atom(atoms_[i].element, atoms_[i].chirality);
    }
    for (const Bond &bd: bonds_) {
      if (map[bd.u] >= 0 && map[bd.v] >= 0)
        out.add_bond(map[bd.u], map[bd.v], bd.order);
    }
    return out;
  }

  // Exact (labelled) equality: same atoms in the same order and the same
  // bond set, irrespective of bond storage order.
  friend bool operator==(const MolGraph &a, const MolGraph &b) {
    if (a.atoms_ != b.atoms_ || a.bonds_.size() != b.bonds_.size())
      return false;
    return a.sorted_bonds() == b.sorted_bonds();
  }

  std::vector<std::tuple<int, int, int>> sorted_bonds() const {
    std::vector<std::tuple<int, int, int>> out;
    out.reserve(bonds_.size());
    for (const Bond &bd: bonds_)
      out.emplace_back(bd.u, bd.v, order_value(bd.order));
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  void check_atom(int i) const {
    if (i < 0 || i >= num_atoms())
      throw GraphError("atom index " + std::to_string(i) + " out of range");
  }

  void rebuild_adjacency() {
    adj_.assign(atoms_.size(), {});
    for (int b = 0; b < num_bonds(); ++b) {
      adj_[bonds_[b].u].push_back(b);
      adj_[bonds_[b].v].push_back(b);
    }
  }

  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<int>> adj_;
};

/* Valence model */

// Sum of set bond orders; unset bonds contribute nothing.
inline int explicit_valence(const MolGraph &g, int node) {
  if (node < 0 || node >= g.num_atoms())
    throw GraphError("atom index " + std::to_string(node) + " out of range");
  int v = 0;
  for (int b: g.incident(node))
    v += order_value(g.bond(b).order);
  return v;
}

// Valence already committed at an atom: unset bonds count as at least single.
inline int occupied_valence(const MolGraph &g, int node) {
  int v = 0;
  for (int b: g.incident(node))
    v += std::max(1, order_value(g.bond(b).order));
  return v;
}

// Capacity left for new bonds or bond-order increments, measured against the
// largest allowed valence of the element.
inline int spare_valence(const MolGraph &g, int node) {
  return element_data(g.atom(node).element).max_valence()
         - occupied_valence(g, node);
}

inline int implicit_hydrogens(const MolGraph &g, int node) {
  const int ev = explicit_valence(g, node);
  for (int allowed: element_data(g.atom(node).element).allowed_valences()) {
    if (allowed >= ev)
      return allowed - ev;
  }
  throw GraphError("valence overflow on atom " + std::to_string(node));
}

inline int total_implicit_hydrogens(const MolGraph &g) {
  int h = 0;
  for (int i = 0; i < g.num_atoms(); ++i)
    h += implicit_hydrogens(g, i);
  return h;
}

inline double molecular_weight(const MolGraph &g) {
  double mw = 0.0;
  for (int i = 0; i < g.num_atoms(); ++i) {
    mw += element_data(g.atom(i).element).mass
          + kHydrogenMass * implicit_hydrogens(g, i);
  }
  return mw;
}

inline bool all_bonds_set(const MolGraph &g) {
  return std::none_of(g.bonds().begin(), g.bonds().end(), [](const Bond &b) {
    return b.order == BondOrder::unset;
  });
}

// Describes the first violated structural invariant, if any.
inline std::optional<std::string>
validation_error(const MolGraph &g, const GraphLimits &limits = {}) {
  if (g.num_atoms() > limits.max_nodes)
    return "node count " + std::to_string(g.num_atoms()) + " exceeds "
           + std::to_string(limits.max_nodes);
  if (g.num_bonds() > limits.max_edges)
    return "edge count " + std::to_string(g.num_bonds()) + " exceeds "
           + std::to_string(limits.max_edges);
  for (int b = 0; b < g.num_bonds(); ++b) {
    const Bond &bd = g.bond(b);
    if (bd.u == bd.v)
      return "self-loop at bond " + std::to_string(b);
    for (int c = b + 1; c < g.num_bonds(); ++c) {
      const Bond &o = g.bond(c);
      if (std::minmax(bd.u, bd.v) == std::minmax(o.u, o.v))
        return "parallel bonds " + std::to_string(b) + "," + std::to_string(c);
    }
  }
  for (int i = 0; i < g.num_atoms(); ++i) {
    if (occupied_valence(g, i)
        > element_data(g.atom(i).element).max_valence())
      return "valence exceeded on atom " + std::to_string(i);
  }
  if (!g.is_connected())
    return "graph is disconnected";
  return std::nullopt;
}

inline bool is_valid(const MolGraph &g, const GraphLimits &limits = {}) {
  return !validation_error(g, limits).has_value();
}

/* Ring membership */

// Per-bond flag: true when the bond lies on a cycle (i.e. is not a bridge).
inline std::vector<char> ring_bond_flags(const MolGraph &g) {
  const int n = g.num_atoms();
  std::vector<char> in_ring(g.num_bonds(), 0);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  // Iterative Tarjan bridge finding.
  struct Frame {
    int node, parent_bond;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[root] >= 0)
      continue;
    std::vector<Frame> stack { { root, -1, 0 } };
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame &f = stack.back();
      auto inc = g.incident(f.node);
      if (f.next < inc.size()) {
        int b = inc[f.next++];
        if (b == f.parent_bond)
          continue;
        int m = g.bond(b).other(f.node);
        if (disc[m] < 0) {
          disc[m] = low[m] = timer++;
          stack.push_back({ m, b, 0 });
        } else {
          low[f.node] = std::min(low[f.node], disc[m]);
        }
      } else {
        Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          int p = stack.back().node;
          low[p] = std::min(low[p], low[done.node]);
        }
      }
    }
  }
  for (int b = 0; b < g.num_bonds(); ++b) {
    const Bond &bd = g.bond(b);
    int child = disc[bd.u] > disc[bd.v] ? bd.u : bd.v;
    int parent = bd.other(child);
    // Tree edge is a bridge iff low[child] > disc[parent]; back edges always
    // close a cycle.
    in_ring[b] = !(low[child] > disc[parent]);
  }
  return in_ring;
}

inline std::vector<char> ring_atom_flags(const MolGraph &g) {
  std::vector<char> atoms(g.num_atoms(), 0);
  auto bonds = ring_bond_flags(g);
  for (int b = 0; b < g.num_bonds(); ++b) {
    if (bonds[b]) {
      atoms[g.bond(b).u] = 1;
      atoms[g.bond(b).v] = 1;
    }
  }
  return atoms;
}

/* Scaffolds */

// Ring systems plus linkers. Terminal atoms joined by a multiple bond to a
// retained atom (e.g. exocyclic C=O) are kept. Acyclic input gives an empty
// graph.
inline MolGraph bemis_murcko_scaffold(const MolGraph &g) {
  const int n = g.num_atoms();
  if (n == 0 || g.num_bonds() < n)  // connected and acyclic
    return {};
  std::vector<int> deg(n);
  std::vector<char> removed(n, 0);
  for (int i = 0; i < n; ++i)
    deg[i] = g.degree(i);
  std::vector<int> queue;
  for (int i = 0; i < n; ++i) {
    if (deg[i] <= 1)
      queue.push_back(i);
  }
  while (!queue.empty()) {
    int a = queue.back();
    queue.pop_back();
    if (removed[a])
      continue;
    removed[a] = 1;
    for (int b: g.incident(a)) {
      int m = g.bond(b).other(a);
      if (!removed[m] && --deg[m] <= 1)
        queue.push_back(m);
    }
  }
  bool any = std::any_of(removed.begin(), removed.end(),
                         [](char r) { return r == 0; });
  if (!any)
    return {};
  std::vector<char> keep(n, 0);
  for (int i = 0; i < n; ++i)
    keep[i] = !removed[i];
  for (int i = 0; i < n; ++i) {
    if (keep[i] || g.degree(i) != 1)
      continue;
    const Bond &bd = g.bond(g.incident(i)[0]);
    if (order_value(bd.order) >= 2 && !removed[bd.other(i)])
      keep[i] = 1;
  }
  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    if (keep[i])
      idx.push_back(i);
  }
  return g.induced_subgraph(idx);
}

}  // namespace agfn

#endif  // AGFN_MOLGRAPH_HPP_
