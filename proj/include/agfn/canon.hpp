//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_CANON_HPP_
#define AGFN_CANON_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "agfn/molgraph.hpp"

namespace agfn {

// Vertex-coloured graph with labelled edges: the input to canonical labelling
// and automorphism counting.
struct ColoredGraph {
  std::vector<std::int64_t> color;                  // initial invariants
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbour, label)

  int size() const { return static_cast<int>(color.size()); }
};

enum class ColorMode {
  // (element, degree, explicit valence, ring membership); chirality ignored.
  kStructure,
  // kStructure plus chirality tags: distinguishes MDP states.
  kState,
};

inline ColoredGraph to_colored_graph(const MolGraph &g,
                                     ColorMode mode = ColorMode::kStructure) {
  ColoredGraph cg;
  const int n = g.num_atoms();
  cg.color.resize(n);
  cg.adj.resize(n);
  auto ring = ring_atom_flags(g);
  for (int i = 0; i < n; ++i) {
    std::int64_t c = element_index(g.atom(i).element);
    c = c * 16 + std::min(g.degree(i), 15);
    c = c * 32 + std::min(explicit_valence(g, i), 31);
    c = c * 2 + ring[i];
    if (mode == ColorMode::kState)
      c = c * 4 + static_cast<int>(g.atom(i).chirality);
    cg.color[i] = c;
  }
  for (const Bond &b: g.bonds()) {
    cg.adj[b.u].emplace_back(b.v, order_value(b.order));
    cg.adj[b.v].emplace_back(b.u, order_value(b.order));
  }
  return cg;
}

namespace internal {

// Colours are cell ranks: colour(v) = number of vertices strictly before v's
// cell. Refinement only splits cells and never reorders them.
inline std::vector<int> ranks_from_keys(std::span<const std::int64_t> keys) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) {
    int v = order[i];
    rank[v] = (i > 0 && keys[order[i - 1]] == keys[v]) ? rank[order[i - 1]] : i;
  }
  return rank;
}

inline int count_cells(std::span<const int> colors) {
  std::vector<int> c(colors.begin(), colors.end());
  std::sort(c.begin(), c.end());
  return static_cast<int>(std::unique(c.begin(), c.end()) - c.begin());
}

inline void refine(const ColoredGraph &g, std::vector<int> &colors) {
  const int n = g.size();
  int cells = count_cells(colors);
  std::vector<std::vector<std::int64_t>> sig(n);
  std::vector<int> order(n);
  while (cells < n) {
    for (int v = 0; v < n; ++v) {
      auto &s = sig[v];
      s.clear();
      s.push_back(colors[v]);
      std::size_t start = s.size();
      for (auto [w, label]: g.adj[v])
        s.push_back(static_cast<std::int64_t>(colors[w]) * 8 + label);
      std::sort(s.begin() + static_cast<std::ptrdiff_t>(start), s.end());
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return sig[a] < sig[b]; });
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      int v = order[i];
      next[v] = (i > 0 && sig[order[i - 1]] == sig[v]) ? next[order[i - 1]] : i;
    }
    int next_cells = count_cells(next);
    colors.swap(next);
    if (next_cells == cells)
      break;
    cells = next_cells;
  }
}

inline std::vector<int> individualize(std::span<const int> colors, int v) {
  std::vector<int> out(colors.begin(), colors.end());
  const int c = colors[v];
  for (std::size_t w = 0; w < out.size(); ++w) {
    if (static_cast<int>(w) != v && colors[w] == c)
      out[w] = c + 1;
  }
  return out;
}

// First non-singleton cell; -1 when the partition is discrete.
inline int target_cell(std::span<const int> colors) {
  const int n = static_cast<int>(colors.size());
  std::vector<int> size(n, 0);
  for (int c: colors)
    ++size[c];
  for (int c = 0; c < n; ++c) {
    if (size[c] > 1)
      return c;
  }
  return -1;
}

inline std::vector<std::int64_t> certificate(const ColoredGraph &g,
                                             std::span<const int> label) {
  const int n = g.size();
  std::vector<std::int64_t> cert(n, 0);
  for (int v = 0; v < n; ++v)
    cert[label[v]] = g.color[v];
  std::vector<std::tuple<int, int, int>> edges;
  for (int v = 0; v < n; ++v) {
    for (auto [w, l]: g.adj[v]) {
      if (v < w)
        edges.emplace_back(std::min(label[v], label[w]),
                           std::max(label[v], label[w]), l);
    }
  }
  std::sort(edges.begin(), edges.end());
  for (auto [a, b, l]: edges) {
    cert.push_back(a);
    cert.push_back(b);
    cert.push_back(l);
  }
  return cert;
}

class CanonicalSearch {
public:
  explicit CanonicalSearch(const ColoredGraph &g): g_(g) { }

  void run(std::vector<int> colors) {
    std::vector<int> prefix;
    dfs(std::move(colors), prefix);
  }

  const std::vector<int> &best_label() const { return best_label_; }
  const std::vector<std::int64_t> &best_cert() const { return best_cert_; }

private:
  void dfs(std::vector<int> colors, std::vector<int> &prefix) {
    refine(g_, colors);
    const int cell = target_cell(colors);
    if (cell < 0) {
      leaf(colors);
      return;
    }
    std::vector<int> candidates;
    for (int v = 0; v < g_.size(); ++v) {
      if (colors[v] == cell)
        candidates.push_back(v);
    }
    std::vector<int> explored;
    for (int w: candidates) {
      if (!explored.empty() && equivalent_to_explored(w, explored, prefix))
        continue;
      prefix.push_back(w);
      dfs(individualize(colors, w), prefix);
      prefix.pop_back();
      explored.push_back(w);
    }
  }

  bool equivalent_to_explored(int w, std::span<const int> explored,
                              std::span<const int> prefix) const {
    if (automorphisms_.empty())
      return false;
    const int n = g_.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x)
        x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto &gamma: automorphisms_) {
      bool fixes = std::all_of(prefix.begin(), prefix.end(),
                               [&](int p) { return gamma[p] == p; });
      if (!fixes)
        continue;
      for (int v = 0; v < n; ++v)
        parent[find(v)] = find(gamma[v]);
    }
    const int rw = find(w);
    return std::any_of(explored.begin(), explored.end(),
                       [&](int e) { return find(e) == rw; });
  }

  void leaf(std::span<const int> label) {
    auto cert = certificate(g_, label);
    if (first_label_.empty()) {
      first_label_.assign(label.begin(), label.end());
      first_cert_ = cert;
      best_label_ = first_label_;
      best_cert_ = cert;
      return;
    }
    if (cert == first_cert_)
      record_automorphism(first_label_, label);
    if (cert < best_cert_) {
      best_cert_ = std::move(cert);
      best_label_.assign(label.begin(), label.end());
    } else if (cert == best_cert_ && best_label_ != first_label_) {
      record_automorphism(best_label_, label);
    }
  }

  void record_automorphism(std::span<const int> a, std::span<const int> b) {
    const int n = g_.size();
    std::vector<int> by_label(n);
    for (int v = 0; v < n; ++v)
      by_label[b[v]] = v;
    std::vector<int> gamma(n);
    for (int u = 0; u < n; ++u)
      gamma[u] = by_label[a[u]];
    if (automorphisms_.size() < kMaxStoredAutomorphisms)
      automorphisms_.push_back(std::move(gamma));
  }

  static constexpr std::size_t kMaxStoredAutomorphisms = 256;

  const ColoredGraph &g_;
  std::vector<int> first_label_, best_label_;
  std::vector<std::int64_t> first_cert_, best_cert_;
  std::vector<std::vector<int>> automorphisms_;
};

}  // namespace internal

struct CanonicalForm {
  std::vector<int> label;  // label[v]: canonical position of vertex v
  std::vector<std::int64_t> certificate;
};

// Canonical labelling by individualisation-refinement with automorphism
// pruning. Isomorphic coloured graphs yield identical certificates.
inline CanonicalForm canonical_form(const ColoredGraph &g,
                                    std::vector<int> colors) {
  if (g.size() == 0)
    return {};
  internal::CanonicalSearch search(g);
  search.run(std::move(colors));
  return { search.best_label(), search.best_cert() };
}

inline CanonicalForm canonical_form(const ColoredGraph &g) {
  return canonical_form(g, internal::ranks_from_keys(g.color));
}

// |Aut(g)| via the orbit-stabiliser chain. Two vertices of a cell share an
// orbit iff individualising either gives the same canonical certificate.
inline double automorphism_count(const ColoredGraph &g) {
  if (g.size() == 0)
    return 1.0;
  std::vector<int> colors = internal::ranks_from_keys(g.color);
  double count = 1.0;
  for (;;) {
    internal::refine(g, colors);
    const int cell = internal::target_cell(colors);
    if (cell < 0)
      return count;
    std::vector<int> members;
    for (int v = 0; v < g.size(); ++v) {
      if (colors[v] == cell)
        members.push_back(v);
    }
    const int v0 = members.front();
    auto fixed = internal::individualize(colors, v0);
    auto base = canonical_form(g, fixed).certificate;
    int orbit = 1;
    for (std::size_t i = 1; i < members.size(); ++i) {
      if (canonical_form(g, internal::individualize(colors, members[i]))
              .certificate
          == base)
        ++orbit;
    }
    count *= orbit;
    colors = std::move(fixed);
  }
}

inline double automorphism_count(const MolGraph &g,
                                 ColorMode mode = ColorMode::kState) {
  return automorphism_count(to_colored_graph(g, mode));
}

}  // namespace agfn

#endif  // AGFN_CANON_HPP_
