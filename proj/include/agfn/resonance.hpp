//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_RESONANCE_HPP_
#define AGFN_RESONANCE_HPP_

#include <span>
#include <utility>
#include <vector>

#include "agfn/canon.hpp"
#include "agfn/molgraph.hpp"

namespace agfn {

// Bond label used for bonds whose order differs between Kekule structures.
inline constexpr int kResonantBondLabel = 4;

namespace internal {

using MatchAdjacency = std::vector<std::vector<std::pair<int, int>>>;

// Backtracking perfect matching over the atoms flagged in `needs`, taking the
// most constrained atom first. `mate` may hold pre-matched pairs.
inline bool match_double_bonds(const MatchAdjacency &adj, std::vector<int> &mate,
                               std::span<const char> needs) {
  int pick = -1;
  int best = 1 << 30;
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (!needs[v] || mate[v] >= 0)
      continue;
    int options = 0;
    for (auto [w, b]: adj[v]) {
      (void)b;
      if (mate[w] < 0)
        ++options;
    }
    if (options < best) {
      best = options;
      pick = static_cast<int>(v);
    }
  }
  if (pick < 0)
    return true;
  if (best == 0)
    return false;
  for (auto [w, b]: adj[pick]) {
    (void)b;
    if (mate[w] >= 0)
      continue;
    mate[pick] = w;
    mate[w] = pick;
    if (match_double_bonds(adj, mate, needs))
      return true;
    mate[pick] = -1;
    mate[w] = -1;
  }
  return false;
}

}  // namespace internal

// Flags bonds whose order (single vs double) is not the same in every Kekule
// structure of the molecule. Atoms taking part carry exactly one double bond;
// the alternatives are the perfect matchings of the subgraph they span.
inline std::vector<char> resonant_bond_flags(const MolGraph &g) {
  const int n = g.num_atoms();
  std::vector<char> out(g.num_bonds(), 0);
  std::vector<int> partner(n, -1);
  std::vector<char> member(n, 0);
  for (int v = 0; v < n; ++v) {
    int doubles = 0;
    bool other = false;
    for (int b: g.incident(v)) {
      BondOrder o = g.bond(b).order;
      if (o == BondOrder::double_) {
        ++doubles;
        partner[v] = g.bond(b).other(v);
      } else if (o != BondOrder::single) {
        other = true;
      }
    }
    member[v] = doubles == 1 && !other;
  }
  for (int v = 0; v < n; ++v) {
    if (member[v] && !member[partner[v]])
      member[v] = 0;
  }
  const auto ring = ring_bond_flags(g);
  for (int v = 0; v < n; ++v) {
    if (member[v] && !ring[g.find_bond(v, partner[v])])
      member[v] = 0;
  }
  internal::MatchAdjacency adj(n);
  std::vector<int> candidates;
  for (int b = 0; b < g.num_bonds(); ++b) {
    const Bond &bd = g.bond(b);
    if (!ring[b] || !member[bd.u] || !member[bd.v])
      continue;
    adj[bd.u].emplace_back(bd.v, b);
    adj[bd.v].emplace_back(bd.u, b);
    candidates.push_back(b);
  }
  // Matched edges on a bridge of the member subgraph are always fixed, so
  // only bonds that currently close a cycle are tested.
  for (int b: candidates) {
    if (out[b])
      continue;
    const Bond &bd = g.bond(b);
    std::vector<int> mate(n, -1);
    bool found;
    if (bd.order == BondOrder::double_) {
      internal::MatchAdjacency pruned = adj;
      auto drop = [&](int x, int y) {
        std::erase_if(pruned[x], [&](auto p) { return p.first == y; });
      };
      drop(bd.u, bd.v);
      drop(bd.v, bd.u);
      found = internal::match_double_bonds(pruned, mate, member);
    } else {
      mate[bd.u] = bd.v;
      mate[bd.v] = bd.u;
      found = internal::match_double_bonds(adj, mate, member);
    }
    if (!found)
      continue;
    // The symmetric difference with the current structure is a union of
    // alternating cycles; every bond on it is resonant.
    for (int c: candidates) {
      const Bond &cd = g.bond(c);
      bool now_double = mate[cd.u] == cd.v;
      if (now_double != (cd.order == BondOrder::double_))
        out[c] = 1;
    }
  }
  return out;
}

// Structure colouring with resonant bonds relabelled, so that all Kekule
// structures of a molecule give the same coloured graph.
inline ColoredGraph to_resonance_colored_graph(const MolGraph &g,
                                               std::span<const char> resonant) {
  ColoredGraph cg = to_colored_graph(g, ColorMode::kStructure);
  for (auto &a: cg.adj)
    a.clear();
  for (int b = 0; b < g.num_bonds(); ++b) {
    const Bond &bd = g.bond(b);
    const int label = resonant[b] ? kResonantBondLabel : order_value(bd.order);
    cg.adj[bd.u].emplace_back(bd.v, label);
    cg.adj[bd.v].emplace_back(bd.u, label);
  }
  return cg;
}

}  // namespace agfn

#endif  // AGFN_RESONANCE_HPP_
