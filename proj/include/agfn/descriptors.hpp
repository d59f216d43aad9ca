//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef AGFN_DESCRIPTORS_HPP_
#define AGFN_DESCRIPTORS_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "agfn/molgraph.hpp"
#include "agfn/rings.hpp"
#include "agfn/smiles.hpp"

namespace agfn {

/* Atom environment used by the contribution tables */

enum class BondKind { single, double_, triple, aromatic };

struct AtomEnv {
  struct Neighbor {
    int atom;
    BondKind kind;
  };

  Element element;
  bool aromatic;
  int hydrogens;
  int degree;
  bool in_ring3;
  std::vector<Neighbor> neighbors;

  int connections() const { return degree + hydrogens; }
  int count(BondKind k) const {
    return static_cast<int>(
        std::count_if(neighbors.begin(), neighbors.end(),
                      [k](const Neighbor &n) { return n.kind == k; }));
  }
};

// Per-atom environments with perceived aromaticity. Unset bonds are read as
// single bonds.
inline std::vector<AtomEnv> atom_environments(const MolGraph &g) {
  const Aromaticity arom = perceive_aromaticity(g);
  const int n = g.num_atoms();
  std::vector<char> ring3(n, 0);
  for (const Ring &r: sssr(g)) {
    if (r.size() == 3) {
      for (int v: r.atoms)
        ring3[v] = 1;
    }
  }
  std::vector<AtomEnv> env(n);
  for (int v = 0; v < n; ++v) {
    AtomEnv &e = env[v];
    e.element = g.atom(v).element;
    e.aromatic = arom.atoms[v];
    e.hydrogens = implicit_hydrogens(g, v);
    e.degree = g.degree(v);
    e.in_ring3 = ring3[v];
    for (int b: g.incident(v)) {
      const Bond &bd = g.bond(b);
      BondKind k = BondKind::single;
      if (arom.bonds[b])
        k = BondKind::aromatic;
      else if (bd.order == BondOrder::double_)
        k = BondKind::double_;
      else if (bd.order == BondOrder::triple)
        k = BondKind::triple;
      e.neighbors.push_back({ bd.other(v), k });
    }
  }
  return env;
}

/* TPSA */

// Polar surface contribution of one atom (N, O, S, P), Ertl fragment values.
inline double tpsa_contribution(const AtomEnv &a) {
  const int h = a.hydrogens;
  const int nb = a.degree;
  const int sing = a.count(BondKind::single);
  const int doub = a.count(BondKind::double_);
  const int trip = a.count(BondKind::triple);
  const int arom = a.count(BondKind::aromatic);
  double c = -1;
  switch (a.element) {
  case Element::N:
    if (nb == 1) {
      if (h == 0 && trip == 1)
        c = 23.79;
      else if (h == 1 && doub == 1)
        c = 23.85;
      else if (h == 2 && sing == 1)
        c = 26.02;
    } else if (nb == 2) {
      if (h == 0 && sing == 1 && doub == 1)
        c = 12.36;
      else if (h == 0 && trip == 1 && doub == 1)
        c = 13.60;
      else if (h == 1 && sing == 2)
        c = a.in_ring3 ? 21.94 : 12.03;
      else if (h == 0 && arom == 2)
        c = 12.89;
      else if (h == 1 && arom == 2)
        c = 15.79;
    } else if (nb == 3) {
      if (h == 0 && sing == 3)
        c = a.in_ring3 ? 3.01 : 3.24;
      else if (h == 0 && sing == 1 && doub == 2)
        c = 11.68;
      else if (h == 0 && arom == 3)
        c = 4.41;
      else if (h == 0 && sing == 1 && arom == 2)
        c = 4.93;
      else if (h == 0 && doub == 1 && arom == 2)
        c = 8.39;
    }
    if (c < 0)
      c = std::max(0.0, 30.5 - nb * 8.2 + h * 1.5);
    return c;
  case Element::O:
    if (nb == 1) {
      if (h == 0 && doub == 1)
        c = 17.07;
      else if (h == 1 && sing == 1)
        c = 20.23;
    } else if (nb == 2) {
      if (h == 0 && sing == 2)
        c = a.in_ring3 ? 12.53 : 9.23;
      else if (h == 0 && arom == 2)
        c = 13.14;
    }
    if (c < 0)
      c = std::max(0.0, 28.5 - nb * 8.6 + h * 1.5);
    return c;
  case Element::S:
    if (nb == 1) {
      if (h == 0 && doub == 1)
        return 32.09;
      if (h == 1 && sing == 1)
        return 38.80;
    } else if (nb == 2) {
      if (h == 0 && sing == 2)
        return 25.30;
      if (h == 0 && arom == 2)
        return 28.24;
    } else if (nb == 3) {
      if (h == 0 && arom == 2 && doub == 1)
        return 21.70;
      if (h == 0 && sing == 2 && doub == 1)
        return 19.21;
    } else if (nb == 4) {
      if (h == 0 && sing == 2 && doub == 2)
        return 8.38;
    }
    return 0.0;
  case Element::P:
    if (nb == 2) {
      if (h == 0 && sing == 1 && doub == 1)
        return 34.14;
    } else if (nb == 3) {
      if (h == 0 && sing == 3)
        return 13.59;
      if (h == 1 && sing == 2 && doub == 1)
        return 23.47;
    } else if (nb == 4) {
      if (h == 0 && sing == 3 && doub == 1)
        return 9.81;
    }
    return 0.0;
  default:
    return 0.0;
  }
}

// Topological polar surface area in square angstrom, N/O/S/P contributions.
inline double tpsa(const MolGraph &g) {
  double total = 0;
  for (const AtomEnv &a: atom_environments(g))
    total += tpsa_contribution(a);
  return total;
}

/* Wildman-Crippen logP */

namespace internal {

// Neighbour pattern: bond predicate plus atom predicate. A rule matches when
// its patterns can be assigned to distinct neighbours.
struct NbrPattern {
  std::function<bool(BondKind)> bond;
  std::function<bool(const AtomEnv &)> atom;
};

inline bool assign_patterns(const std::vector<AtomEnv> &env, const AtomEnv &a,
                            const std::vector<NbrPattern> &pats,
                            std::size_t k, std::vector<char> &used) {
  if (k == pats.size())
    return true;
  for (std::size_t i = 0; i < a.neighbors.size(); ++i) {
    if (used[i])
      continue;
    const auto &nb = a.neighbors[i];
    if (!pats[k].bond(nb.kind) || !pats[k].atom(env[nb.atom]))
      continue;
    used[i] = 1;
    if (assign_patterns(env, a, pats, k + 1, used))
      return true;
    used[i] = 0;
  }
  return false;
}

inline bool match_neighbors(const std::vector<AtomEnv> &env, const AtomEnv &a,
                            const std::vector<NbrPattern> &pats) {
  std::vector<char> used(a.neighbors.size(), 0);
  return assign_patterns(env, a, pats, 0, used);
}

// SMARTS-like shorthands.
inline bool single_or_arom(BondKind k) {
  return k == BondKind::single || k == BondKind::aromatic;
}
inline bool is_single(BondKind k) { return k == BondKind::single; }
inline bool is_double(BondKind k) { return k == BondKind::double_; }
inline bool is_triple(BondKind k) { return k == BondKind::triple; }
inline bool is_arom_bond(BondKind k) { return k == BondKind::aromatic; }

inline bool aliphatic(const AtomEnv &a) { return !a.aromatic; }
inline bool aromatic(const AtomEnv &a) { return a.aromatic; }
inline bool any_atom(const AtomEnv &) { return true; }
inline bool aliphatic_c(const AtomEnv &a) {
  return !a.aromatic && a.element == Element::C;
}
inline bool aromatic_c(const AtomEnv &a) {
  return a.aromatic && a.element == Element::C;
}
inline bool is_el(const AtomEnv &a, Element e) { return a.element == e; }
inline bool aliphatic_of(const AtomEnv &a, std::initializer_list<Element> es) {
  return !a.aromatic && std::find(es.begin(), es.end(), a.element) != es.end();
}
inline bool aliphatic_hetero(const AtomEnv &a) {
  return aliphatic_of(a, { Element::N, Element::O, Element::P, Element::S,
                           Element::F, Element::Cl, Element::Br, Element::I });
}

using Nbr = NbrPattern;

inline double crippen_carbon(const std::vector<AtomEnv> &env,
                             const AtomEnv &a) {
  const int h = a.hydrogens;
  auto m = [&](std::vector<Nbr> p) { return match_neighbors(env, a, p); };
  const Nbr sC { single_or_arom, aliphatic_c };
  const Nbr sA { single_or_arom, aliphatic };
  const Nbr sHet { single_or_arom, aliphatic_hetero };
  const Nbr dC { is_double, aliphatic_c };
  const Nbr sa { single_or_arom, aromatic };
  const Nbr sc { single_or_arom, aromatic_c };
  const Nbr ra { is_arom_bond, aromatic };
  const Nbr sHa { single_or_arom, any_atom };

  if (!a.aromatic) {
    if (h == 4)
      return 0.1441;
    if (h == 3 && m({ sC }))
      return 0.1441;
    if (h == 2 && m({ sC, sC }))
      return 0.1441;
    if (h == 1 && m({ sC, sC, sC }))
      return 0.0;
    if (h == 0 && m({ sC, sC, sC, sC }))
      return 0.0;
    if (h == 3 && m({ sHet }))
      return -0.2035;
    if (h == 2 && a.connections() == 4 && m({ sHet, sA }))
      return -0.2035;
    if (h == 1 && a.connections() == 4 && m({ sHet, sA, sA }))
      return -0.2051;
    if (h == 0 && a.connections() == 4 && m({ sHet, sA, sA, sA }))
      return -0.2051;
    if (m({ { is_double, [](const AtomEnv &x) {
               return !x.aromatic && x.element != Element::C;
             } } }))
      return -0.2783;
    if (h == 2 && m({ dC }))
      return 0.1551;
    if (h == 1 && m({ dC, sA }))
      return 0.1551;
    if (h == 0 && m({ dC, sA, sA }))
      return 0.1551;
    if (m({ dC, dC }))
      return 0.1551;
    if (a.connections() == 2 && m({ { is_triple, aliphatic } }))
      return 0.0017;
    if (h == 3 && m({ sc }))
      return 0.08452;
    if (h == 3 && m({ sa }))
      return -0.1444;
    if (h == 2 && a.connections() == 4 && m({ sa }))
      return -0.0516;
    if (h == 1 && a.connections() == 4 && m({ sa }))
      return 0.1193;
    if (h == 0 && a.connections() == 4 && m({ sa }))
      return -0.0967;
    // C26 before the aromatic block is irrelevant for aliphatic carbons.
    if (m({ dC, sa, sA }) || m({ dC, sc, sa }) || (h == 1 && m({ dC, sa }))
        || m({ { is_double, aromatic_c } }))
      return 0.264;
    return 0.08129;
  }

  // Aromatic carbon.
  if (h == 0 && m({ { is_single, [](const AtomEnv &x) {
                       return !x.aromatic && x.element == Element::P;
                     } } }))
    return -0.5443;
  auto bonded_to = [&](Element e) {
    return m({ { [](BondKind) { return true; },
                 [e](const AtomEnv &x) { return x.element == e; } } });
  };
  if (bonded_to(Element::F))
    return 0.0;
  if (bonded_to(Element::Cl))
    return 0.245;
  if (bonded_to(Element::Br))
    return 0.198;
  if (bonded_to(Element::I))
    return 0.0;
  if (h == 1)
    return 0.1581;
  if (m({ ra, ra, ra }))
    return 0.2955;
  if (m({ ra, ra, { is_single, aromatic } }))
    return 0.2713;
  if (m({ ra, ra, { is_single, aliphatic_c } }))
    return 0.136;
  if (m({ ra, ra, { is_single, [](const AtomEnv &x) {
                      return !x.aromatic && x.element == Element::N;
                    } } }))
    return 0.4619;
  if (m({ ra, ra, { is_single, [](const AtomEnv &x) {
                      return !x.aromatic && x.element == Element::O;
                    } } }))
    return 0.5437;
  if (m({ ra, ra, { is_single, [](const AtomEnv &x) {
                      return !x.aromatic && x.element == Element::S;
                    } } }))
    return 0.1893;
  if (m({ ra, ra, { is_double, [](const AtomEnv &x) {
                      return aliphatic_of(x,
                                          { Element::C, Element::N, Element::O });
                    } } }))
    return -0.8186;
  if (m({ { is_double, aliphatic_c } }))
    return 0.264;
  (void)sHa;
  return 0.08129;
}

inline double crippen_nitrogen(const std::vector<AtomEnv> &env,
                               const AtomEnv &a) {
  const int h = a.hydrogens;
  auto m = [&](std::vector<Nbr> p) { return match_neighbors(env, a, p); };
  const Nbr sA { single_or_arom, aliphatic };
  const Nbr sa { single_or_arom, aromatic };
  const Nbr sX { single_or_arom, any_atom };
  if (a.aromatic)
    return -0.3239;
  if (h == 2 && m({ sA }))
    return -1.019;
  if (h == 1 && m({ sA, sA }))
    return -0.7096;
  if (h == 2 && m({ sa }))
    return -1.027;
  if (h == 1 && m({ sX, sa }))
    return -0.5188;
  if (h == 1 && m({ { is_double, any_atom } }))
    return 0.08387;
  if (m({ { is_double, any_atom }, sX }))
    return 0.1836;
  if (m({ sA, sA, sA }))
    return -0.3187;
  if (m({ sa, sX, sA }) || m({ sa, sa, sa }))
    return -0.4458;
  if (m({ { is_triple, aliphatic } }))
    return 0.01508;
  return -0.4806;
}

inline double crippen_oxygen(const std::vector<AtomEnv> &env,
                             const AtomEnv &a) {
  const int h = a.hydrogens;
  auto m = [&](std::vector<Nbr> p) { return match_neighbors(env, a, p); };
  const Nbr sA { single_or_arom, aliphatic };
  const Nbr sa { single_or_arom, aromatic };
  const Nbr sX { single_or_arom, any_atom };
  if (a.aromatic)
    return 0.1552;
  if (h == 1 || h == 2)
    return -0.2893;
  if (m({ sA, sA }))
    return -0.0684;
  if (m({ sa, sX }))
    return -0.4195;
  if (m({ { is_double, [](const AtomEnv &x) {
             return x.element == Element::N || x.element == Element::O;
           } } }))
    return 0.0335;
  if (m({ { is_double, [](const AtomEnv &x) {
             return x.element == Element::S;
           } } }))
    return -0.3339;
  if (m({ { is_double, aromatic_c } }))
    return 0.1788;

  // Carbonyl oxygens: classify by the carbonyl carbon's other neighbours.
  int carbon = -1;
  for (const auto &nb: a.neighbors) {
    if (nb.kind == BondKind::double_ && aliphatic_c(env[nb.atom]))
      carbon = nb.atom;
  }
  if (carbon >= 0) {
    const AtomEnv &c = env[carbon];
    std::vector<const AtomEnv *> others;
    std::vector<BondKind> kinds;
    bool skipped = false;
    for (const auto &nb: c.neighbors) {
      if (!skipped && &env[nb.atom] == &a) {
        skipped = true;
        continue;
      }
      others.push_back(&env[nb.atom]);
      kinds.push_back(nb.kind);
    }
    auto cm = [&](std::vector<Nbr> p) {
      // Match against the carbon's neighbours excluding this oxygen.
      std::vector<char> used(others.size(), 0);
      std::function<bool(std::size_t)> go = [&](std::size_t k) {
        if (k == p.size())
          return true;
        for (std::size_t i = 0; i < others.size(); ++i) {
          if (used[i] || !p[k].bond(kinds[i]) || !p[k].atom(*others[i]))
            continue;
          used[i] = 1;
          if (go(k + 1))
            return true;
          used[i] = 0;
        }
        return false;
      };
      return go(0);
    };
    const int ch = c.hydrogens;
    const Nbr cC { single_or_arom, aliphatic_c };
    const Nbr cA { single_or_arom, aliphatic };
    const Nbr cNO { single_or_arom, [](const AtomEnv &x) {
                     return aliphatic_of(x, { Element::N, Element::O });
                   } };
    const Nbr cc { single_or_arom, aromatic_c };
    const Nbr cCc { single_or_arom, [](const AtomEnv &x) {
                     return x.element == Element::C;
                   } };
    const Nbr ca { single_or_arom, aromatic };
    const Nbr cHetero { single_or_arom,
                        [](const AtomEnv &x) { return x.element != Element::C; } };
    if ((ch == 1 && cm({ cC })) || cm({ cC, cA }) || (ch == 1 && cm({ cNO }))
        || ch == 2
        || (c.connections() == 2
            && cm({ { is_double, [](const AtomEnv &x) {
                       return !x.aromatic && x.element == Element::O;
                     } } })))
      return -0.1526;
    if ((ch == 1 && cm({ cc })) || cm({ cCc, ca }) || cm({ cc, cA }))
      return 0.1129;
    if (cm({ cHetero, cHetero }))
      return 0.4833;
  }
  return -0.1188;
}

inline double crippen_sulfur(const AtomEnv &a,
                             const std::vector<AtomEnv> &env) {
  if (a.aromatic)
    return 0.6237;
  for (const auto &nb: a.neighbors) {
    if (nb.kind == BondKind::double_
        && aliphatic_of(env[nb.atom],
                        { Element::N, Element::O, Element::P, Element::S }))
      return -0.0024;
  }
  return 0.6482;
}

// Contribution of the hydrogens attached to one heavy atom.
inline double crippen_hydrogen(const std::vector<AtomEnv> &env,
                               const AtomEnv &a) {
  switch (a.element) {
  case Element::C:
    return 0.123;
  case Element::N:
    return 0.2142;
  case Element::O: {
    if (a.aromatic)
      return -0.2677;
    if (a.neighbors.empty())
      return -0.2677;
    const AtomEnv &x = env[a.neighbors[0].atom];
    if ((x.element == Element::C && !x.aromatic && x.connections() == 4)
        || (x.element == Element::C && x.aromatic))
      return -0.2677;
    if (!aliphatic_of(x, { Element::C, Element::N, Element::O, Element::S }))
      return -0.2677;
    if (x.element == Element::N)
      return 0.2142;
    if (x.element == Element::C) {
      for (const auto &nb: x.neighbors) {
        const AtomEnv &y = env[nb.atom];
        if (nb.kind == BondKind::double_ && &y != &a
            && (y.element == Element::C || y.element == Element::N
                || aliphatic_of(y, { Element::O, Element::S })))
          return 0.298;
      }
    }
    if (aliphatic_of(x, { Element::O, Element::S }))
      return 0.298;
    return 0.1125;
  }
  default:
    // H on S, P or any other non C/N/O atom.
    return -0.2677;
  }
}

}  // namespace internal

// Wildman-Crippen atomic contribution logP.
inline double logp(const MolGraph &g) {
  const auto env = atom_environments(g);
  double total = 0;
  for (const AtomEnv &a: env) {
    switch (a.element) {
    case Element::C:
      total += internal::crippen_carbon(env, a);
      break;
    case Element::N:
      total += internal::crippen_nitrogen(env, a);
      break;
    case Element::O:
      total += internal::crippen_oxygen(env, a);
      break;
    case Element::S:
      total += internal::crippen_sulfur(a, env);
      break;
    case Element::P:
      total += 0.8612;
      break;
    case Element::F:
      total += 0.4202;
      break;
    case Element::Cl:
      total += 0.6895;
      break;
    case Element::Br:
      total += 0.8456;
      break;
    case Element::I:
      total += 0.8857;
      break;
    }
    if (a.hydrogens > 0)
      total += a.hydrogens * internal::crippen_hydrogen(env, a);
  }
  return total;
}

/* Simplified drug-likeness and synthetic-accessibility scores */

namespace internal {

// Piecewise-linear desirability: 0 outside (lo0, hi0), 1 on [lo1, hi1].
inline double ramp(double x, double lo0, double lo1, double hi1, double hi0,
                   double floor_lo = 0.0) {
  if (x <= lo0)
    return floor_lo;
  if (x < lo1)
    return floor_lo + (1 - floor_lo) * (x - lo0) / (lo1 - lo0);
  if (x <= hi1)
    return 1.0;
  if (x < hi0)
    return (hi0 - x) / (hi0 - hi1);
  return 0.0;
}

}  // namespace internal

// Geometric mean of desirabilities over molecular weight, logP, TPSA and the
// number of 5/6-membered rings. In [0, 1].
inline double qed_like(const MolGraph &g) {
  if (g.empty())
    return 0.0;
  const double mw = molecular_weight(g);
  const double lp = logp(g);
  const double ps = tpsa(g);
  const int rings = ring_count(g);
  const double d_mw = internal::ramp(mw, 50, 250, 450, 800);
  const double d_logp = internal::ramp(lp, -3, 1, 3.5, 7);
  const double d_tpsa = internal::ramp(ps, 0, 20, 90, 180, 0.3);
  const double d_rings = rings == 0 ? 0.5
                         : rings <= 3
                             ? 1.0
                             : std::max(0.0, 1.0 - 0.25 * (rings - 3));
  return std::pow(d_mw * d_logp * d_tpsa * d_rings, 0.25);
}

// Size and ring-complexity penalty mapped to [1, 10].
inline double sas_like(const MolGraph &g) {
  const int n = g.num_atoms();
  const auto rings = sssr(g);
  std::vector<int> ring_membership(n, 0);
  int macro = 0;
  for (const Ring &r: rings) {
    for (int v: r.atoms)
      ++ring_membership[v];
    if (r.size() > 8)
      ++macro;
  }
  int spiro_or_bridge = 0, stereo = 0;
  for (int v = 0; v < n; ++v) {
    if (ring_membership[v] >= 2 && g.degree(v) >= 3) {
      int ring_nbrs = 0;
      for (int b: g.incident(v))
        ring_nbrs += ring_membership[g.bond(b).other(v)] > 0;
      if (ring_nbrs >= 3 || ring_membership[v] >= 3)
        ++spiro_or_bridge;
    } else if (ring_membership[v] >= 2 && g.degree(v) == 4) {
      ++spiro_or_bridge;
    }
    stereo += g.atom(v).chirality != Chirality::none;
  }
  double raw = 1.0 + 0.1 * n + 0.25 * static_cast<double>(rings.size())
               + 1.0 * spiro_or_bridge + 0.5 * stereo + 1.0 * macro;
  return std::clamp(raw, 1.0, 10.0);
}

/* Property identifiers and external score tables */

enum class PropertyKind { TPSA, QED, SAS, NumRings, MolWt, LogP, External };

struct PropertyId {
  PropertyKind kind = PropertyKind::TPSA;
  std::string name;  // canonical display name; the table name for External

  friend bool operator==(const PropertyId &, const PropertyId &) = default;
};

inline std::string_view property_kind_name(PropertyKind k) {
  switch (k) {
  case PropertyKind::TPSA:
    return "TPSA";
  case PropertyKind::QED:
    return "QED";
  case PropertyKind::SAS:
    return "SAS";
  case PropertyKind::NumRings:
    return "NumRings";
  case PropertyKind::MolWt:
    return "MolWt";
  case PropertyKind::LogP:
    return "LogP";
  case PropertyKind::External:
    return "External";
  }
  return "";
}

// Built-in names map to their kind; anything else names an external table.
inline PropertyId property_from_name(std::string_view name) {
  for (PropertyKind k: { PropertyKind::TPSA, PropertyKind::QED,
                         PropertyKind::SAS, PropertyKind::NumRings,
                         PropertyKind::MolWt, PropertyKind::LogP }) {
    if (property_kind_name(k) == name)
      return { k, std::string(name) };
  }
  if (name.empty())
    throw std::invalid_argument("empty property name");
  return { PropertyKind::External, std::string(name) };
}

class ScoreTableError: public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// canonical key -> value, loaded from "smiles<TAB>value" lines.
class ScoreTable {
public:
  ScoreTable() = default;

  static ScoreTable load(std::istream &in) {
    ScoreTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#')
        continue;
      std::istringstream ls(line);
      std::string smi;
      double value;
      if (!(ls >> smi >> value))
        throw ScoreTableError("score table line " + std::to_string(lineno)
                              + ": expected '<smiles> <value>'");
      try {
        t.values_[canonical_key(parse_smiles(smi)).text] = value;
      } catch (const SmilesError &e) {
        throw ScoreTableError("score table line " + std::to_string(lineno)
                              + ": " + e.what());
      }
    }
    return t;
  }

  static ScoreTable load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
      throw ScoreTableError("cannot open score table " + path);
    return load(in);
  }

  void set(const CanonicalKey &key, double value) { values_[key.text] = value; }

  std::optional<double> find(const CanonicalKey &key) const {
    auto it = values_.find(key.text);
    if (it == values_.end())
      return std::nullopt;
    return it->second;
  }

  double at(const CanonicalKey &key) const {
    auto v = find(key);
    if (!v)
      throw ScoreTableError("no score table entry for " + key.text);
    return *v;
  }

  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }

  // Median over all entries; used for the "better than known actives" cut.
  double median() const {
    if (values_.empty())
      throw ScoreTableError("median of an empty score table");
    std::vector<double> v;
    for (const auto &[k, x]: values_)
      v.push_back(x);
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }

private:
  std::map<std::string, double> values_;
};

// Evaluates properties; a table registered under a built-in name (e.g. QED)
// overrides the built-in calculator.
class PropertyCalculator {
public:
  void add_table(const std::string &name, ScoreTable table) {
    tables_[name] = std::make_shared<const ScoreTable>(std::move(table));
  }

  bool has_table(const std::string &name) const {
    return tables_.count(name) > 0;
  }

  double operator()(const PropertyId &p, const MolGraph &g) const {
    auto it = tables_.find(p.name);
    if (it != tables_.end())
      return it->second->at(canonical_key(g));
    switch (p.kind) {
    case PropertyKind::TPSA:
      return tpsa(g);
    case PropertyKind::QED:
      return qed_like(g);
    case PropertyKind::SAS:
      return sas_like(g);
    case PropertyKind::NumRings:
      return ring_count(g, all_ring_sizes_);
    case PropertyKind::MolWt:
      return molecular_weight(g);
    case PropertyKind::LogP:
      return logp(g);
    case PropertyKind::External:
      throw ScoreTableError("no score table loaded for property " + p.name);
    }
    return 0.0;
  }

  void set_all_ring_sizes(bool v) { all_ring_sizes_ = v; }

private:
  std::map<std::string, std::shared_ptr<const ScoreTable>> tables_;
  bool all_ring_sizes_ = false;
};

}  // namespace agfn

#endif  // AGFN_DESCRIPTORS_HPP_
