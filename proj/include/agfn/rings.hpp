//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_RINGS_HPP_
#define AGFN_RINGS_HPP_

#include <algorithm>
#include <cstdint>
#include <deque>
#include <vector>

#include "agfn/molgraph.hpp"

namespace agfn {

// A ring as its atoms in cycle order and its bonds.
struct Ring {
  std::vector<int> atoms;
  std::vector<int> bonds;

  int size() const { return static_cast<int>(atoms.size()); }
};

namespace internal {

class BitRow {
public:
  explicit BitRow(int bits): words_((bits + 63) / 64, 0) { }

  void flip(int i) { words_[i / 64] ^= std::uint64_t { 1 } << (i % 64); }
  bool test(int i) const { return (words_[i / 64] >> (i % 64)) & 1; }
  bool none() const {
    return std::all_of(words_.begin(), words_.end(),
                       [](std::uint64_t w) { return w == 0; });
  }
  int lowest() const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      if (words_[k])
        return static_cast<int>(k * 64) + __builtin_ctzll(words_[k]);
    }
    return -1;
  }
  BitRow &operator^=(const BitRow &o) {
    for (std::size_t k = 0; k < words_.size(); ++k)
      words_[k] ^= o.words_[k];
    return *this;
  }

private:
  std::vector<std::uint64_t> words_;
};

// Incremental GF(2) elimination keyed by pivot bit.
class CycleBasis {
public:
  explicit CycleBasis(int bits): bits_(bits), rows_(bits, BitRow(0)),
                                 has_(bits, 0) { }

  bool add_if_independent(BitRow r) {
    for (;;) {
      const int p = r.lowest();
      if (p < 0)
        return false;
      if (!has_[p]) {
        rows_[p] = std::move(r);
        has_[p] = 1;
        return true;
      }
      r ^= rows_[p];
    }
  }

private:
  int bits_;
  std::vector<BitRow> rows_;
  std::vector<char> has_;
};

}  // namespace internal

// Smallest set of smallest rings: Horton candidate cycles (root, edge) built
// from BFS trees, sorted by size then by sorted atom list, greedily kept when
// independent over GF(2) until the cycle-space dimension is reached.
inline std::vector<Ring> sssr(const MolGraph &g) {
  const int n = g.num_atoms();
  const int m = g.num_bonds();
  if (n == 0)
    return {};
  // Cycle-space dimension E - V + components.
  int components = 0;
  {
    std::vector<int> comp(n, -1);
    for (int s = 0; s < n; ++s) {
      if (comp[s] >= 0)
        continue;
      ++components;
      std::deque<int> q { s };
      comp[s] = s;
      while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int b: g.incident(v)) {
          int w = g.bond(b).other(v);
          if (comp[w] < 0) {
            comp[w] = s;
            q.push_back(w);
          }
        }
      }
    }
  }
  const int dim = m - n + components;
  if (dim <= 0)
    return {};

  const auto in_ring = ring_bond_flags(g);
  struct Candidate {
    std::vector<int> atoms;  // cycle order
    std::vector<int> bonds;
    std::vector<int> sorted_atoms;
  };
  std::vector<Candidate> cands;
  std::vector<int> dist(n), parent_bond(n);
  for (int r = 0; r < n; ++r) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent_bond.begin(), parent_bond.end(), -1);
    std::deque<int> q { r };
    dist[r] = 0;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      std::vector<std::pair<int, int>> nb;
      for (int b: g.incident(v)) {
        if (in_ring[b])
          nb.emplace_back(g.bond(b).other(v), b);
      }
      std::sort(nb.begin(), nb.end());
      for (auto [w, b]: nb) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          parent_bond[w] = b;
          q.push_back(w);
        }
      }
    }
    auto path_to_root = [&](int v) {
      std::vector<int> atoms { v };
      std::vector<int> bonds;
      while (v != r) {
        int b = parent_bond[v];
        bonds.push_back(b);
        v = g.bond(b).other(v);
        atoms.push_back(v);
      }
      return std::make_pair(atoms, bonds);
    };
    for (int b = 0; b < m; ++b) {
      if (!in_ring[b])
        continue;
      const int u = g.bond(b).u, v = g.bond(b).v;
      if (dist[u] < 0 || dist[v] < 0)
        continue;
      if (parent_bond[u] == b || parent_bond[v] == b)
        continue;
      auto [pu, bu] = path_to_root(u);
      auto [pv, bv] = path_to_root(v);
      std::vector<int> su(pu.begin(), pu.end() - 1);
      std::vector<int> sv(pv.begin(), pv.end() - 1);
      std::sort(su.begin(), su.end());
      std::sort(sv.begin(), sv.end());
      std::vector<int> common;
      std::set_intersection(su.begin(), su.end(), sv.begin(), sv.end(),
                            std::back_inserter(common));
      if (!common.empty())
        continue;
      Candidate c;
      // u ... r ... v, then closing bond b.
      c.atoms = pu;
      for (auto it = pv.rbegin() + 1; it != pv.rend(); ++it)
        c.atoms.push_back(*it);
      c.bonds = bu;
      for (auto it = bv.rbegin(); it != bv.rend(); ++it)
        c.bonds.push_back(*it);
      c.bonds.push_back(b);
      c.sorted_atoms = c.atoms;
      std::sort(c.sorted_atoms.begin(), c.sorted_atoms.end());
      cands.push_back(std::move(c));
    }
  }
  std::sort(cands.begin(), cands.end(), [](const auto &a, const auto &b) {
    if (a.atoms.size() != b.atoms.size())
      return a.atoms.size() < b.atoms.size();
    return a.sorted_atoms < b.sorted_atoms;
  });

  std::vector<Ring> rings;
  internal::CycleBasis basis(m);
  for (const auto &c: cands) {
    internal::BitRow row(m);
    for (int b: c.bonds)
      row.flip(b);
    if (basis.add_if_independent(std::move(row))) {
      rings.push_back({ c.atoms, c.bonds });
      if (static_cast<int>(rings.size()) == dim)
        break;
    }
  }
  return rings;
}

// Number of SSSR rings; by default only five- and six-membered rings count.
inline int ring_count(const MolGraph &g, bool all_sizes = false) {
  int count = 0;
  for (const Ring &r: sssr(g)) {
    if (all_sizes || r.size() == 5 || r.size() == 6)
      ++count;
  }
  return count;
}

struct Aromaticity {
  std::vector<char> atoms;
  std::vector<char> bonds;
};

// Hueckel-style perception over SSSR rings and fused combinations of up to
// three rings. Electron donors: an atom with a ring double bond gives 1; an
// sp3 N or P, or a divalent O or S, gives 2; a carbon with an exocyclic double
// bond to N, O or S gives 0. Any other ring atom blocks aromaticity.
inline Aromaticity perceive_aromaticity(const MolGraph &g) {
  const int n = g.num_atoms();
  Aromaticity out { std::vector<char>(n, 0),
                    std::vector<char>(g.num_bonds(), 0) };
  const auto rings = sssr(g);
  if (rings.empty())
    return out;
  const auto ring_bond = ring_bond_flags(g);

  // Electron contribution, or -1 when the atom cannot be aromatic.
  std::vector<int> electrons(n, -1);
  for (int v = 0; v < n; ++v) {
    const Element e = g.atom(v).element;
    if (is_halogen(e))
      continue;
    int ring_double = 0, exo_double = 0, triple = 0, unset = 0;
    Element exo_partner = Element::C;
    for (int b: g.incident(v)) {
      const Bond &bd = g.bond(b);
      if (bd.order == BondOrder::double_) {
        if (ring_bond[b]) {
          ++ring_double;
        } else {
          ++exo_double;
          exo_partner = g.atom(bd.other(v)).element;
        }
      } else if (bd.order == BondOrder::triple) {
        ++triple;
      } else if (bd.order == BondOrder::unset) {
        ++unset;
      }
    }
    if (triple || unset || ring_double > 1)
      continue;
    const int connections = g.degree(v) + implicit_hydrogens(g, v);
    if (ring_double == 1 && exo_double == 0) {
      electrons[v] = 1;
    } else if (ring_double == 0 && exo_double == 1) {
      if (e == Element::C
          && (exo_partner == Element::O || exo_partner == Element::N
              || exo_partner == Element::S))
        electrons[v] = 0;
    } else if (ring_double == 0 && exo_double == 0) {
      if ((e == Element::N || e == Element::P) && connections == 3)
        electrons[v] = 2;
      else if ((e == Element::O || e == Element::S) && connections == 2)
        electrons[v] = 2;
    }
  }

  const int nr = static_cast<int>(rings.size());
  std::vector<char> candidate(nr, 0);
  for (int i = 0; i < nr; ++i) {
    candidate[i] = std::all_of(rings[i].atoms.begin(), rings[i].atoms.end(),
                               [&](int v) { return electrons[v] >= 0; });
  }
  auto shares_bond = [&](int i, int j) {
    for (int b: rings[i].bonds) {
      if (std::find(rings[j].bonds.begin(), rings[j].bonds.end(), b)
          != rings[j].bonds.end())
        return true;
    }
    return false;
  };
  auto try_set = [&](const std::vector<int> &set) {
    std::vector<char> in(n, 0);
    for (int i: set) {
      for (int v: rings[i].atoms)
        in[v] = 1;
    }
    int total = 0;
    for (int v = 0; v < n; ++v) {
      if (in[v])
        total += electrons[v];
    }
    if (total % 4 != 2)
      return;
    for (int i: set) {
      for (int v: rings[i].atoms)
        out.atoms[v] = 1;
      for (int b: rings[i].bonds)
        out.bonds[b] = 1;
    }
  };
  for (int i = 0; i < nr; ++i) {
    if (candidate[i])
      try_set({ i });
  }
  for (int i = 0; i < nr; ++i) {
    if (!candidate[i])
      continue;
    for (int j = i + 1; j < nr; ++j) {
      if (!candidate[j])
        continue;
      const bool ij = shares_bond(i, j);
      if (ij)
        try_set({ i, j });
      for (int k = j + 1; k < nr; ++k) {
        if (!candidate[k])
          continue;
        const int links = ij + shares_bond(i, k) + shares_bond(j, k);
        if (links >= 2)
          try_set({ i, j, k });
      }
    }
  }
  return out;
}

}  // namespace agfn

#endif  // AGFN_RINGS_HPP_
