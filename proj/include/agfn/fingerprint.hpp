//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_FINGERPRINT_HPP_
#define AGFN_FINGERPRINT_HPP_

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "agfn/molgraph.hpp"
#include "agfn/resonance.hpp"

namespace agfn {

class FingerprintError: public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class Fingerprint {
public:
  Fingerprint() = default;

  explicit Fingerprint(int width)
      : width_(width), words_((width + 63) / 64, 0) {
    if (width <= 0 || !std::has_single_bit(static_cast<unsigned>(width)))
      throw FingerprintError("fingerprint width must be a power of two");
  }

  int width() const { return width_; }

  void set(int bit) { words_[bit / 64] |= std::uint64_t { 1 } << (bit % 64); }
  bool test(int bit) const { return (words_[bit / 64] >> (bit % 64)) & 1; }

  int count() const {
    int c = 0;
    for (auto w: words_)
      c += std::popcount(w);
    return c;
  }

  const std::vector<std::uint64_t> &words() const { return words_; }

  friend bool operator==(const Fingerprint &, const Fingerprint &) = default;

private:
  int width_ = 0;
  std::vector<std::uint64_t> words_;
};

namespace internal {

class Fnv1a {
public:
  void add(std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (x >> (8 * i)) & 0xff;
      h_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return h_; }

private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace internal

// Circular (Morgan-style) fingerprint. Radius-0 identifiers hash (element,
// degree, implicit H, ring membership, resonance membership); each further
// radius hashes the previous identifier with the sorted (bond label,
// neighbour identifier) pairs. Resonant bonds share one label so Kekule
// structures of a molecule give the same bits.
inline Fingerprint fingerprint(const MolGraph &g, int radius = 2,
                               int width = 2048) {
  if (g.empty())
    throw FingerprintError("fingerprint of an empty graph");
  if (radius < 0)
    throw FingerprintError("negative fingerprint radius");
  Fingerprint fp(width);
  const int n = g.num_atoms();
  const auto resonant = resonant_bond_flags(g);
  const auto ring = ring_atom_flags(g);
  std::vector<char> res_atom(n, 0);
  for (int b = 0; b < g.num_bonds(); ++b) {
    if (resonant[b])
      res_atom[g.bond(b).u] = res_atom[g.bond(b).v] = 1;
  }
  std::vector<std::uint64_t> id(n), next(n);
  for (int v = 0; v < n; ++v) {
    internal::Fnv1a h;
    h.add(element_data(g.atom(v).element).atomic_number);
    h.add(g.degree(v));
    h.add(implicit_hydrogens(g, v));
    h.add(ring[v]);
    h.add(res_atom[v]);
    id[v] = h.value();
    fp.set(static_cast<int>(id[v] % static_cast<std::uint64_t>(width)));
  }
  for (int r = 1; r <= radius; ++r) {
    for (int v = 0; v < n; ++v) {
      std::vector<std::pair<int, std::uint64_t>> env;
      for (int b: g.incident(v)) {
        const int label = resonant[b] ? kResonantBondLabel
                                      : order_value(g.bond(b).order);
        env.emplace_back(label, id[g.bond(b).other(v)]);
      }
      std::sort(env.begin(), env.end());
      internal::Fnv1a h;
      h.add(r);
      h.add(id[v]);
      for (auto [label, nid]: env) {
        h.add(label);
        h.add(nid);
      }
      next[v] = h.value();
      fp.set(static_cast<int>(next[v] % static_cast<std::uint64_t>(width)));
    }
    id.swap(next);
  }
  return fp;
}

// |a & b| / |a | b|.
inline double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  if (a.width() != b.width())
    throw FingerprintError("fingerprint width mismatch");
  int inter = 0, uni = 0;
  for (std::size_t k = 0; k < a.words().size(); ++k) {
    inter += std::popcount(a.words()[k] & b.words()[k]);
    uni += std::popcount(a.words()[k] | b.words()[k]);
  }
  if (uni == 0)
    throw FingerprintError("tanimoto of two empty fingerprints");
  return static_cast<double>(inter) / uni;
}

}  // namespace agfn

#endif  // AGFN_FINGERPRINT_HPP_
