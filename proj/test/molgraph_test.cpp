//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "agfn/molgraph.hpp"

#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "agfn/canon.hpp"

namespace agfn {
namespace {

MolGraph chain(int n, Element e = Element::C) {
  MolGraph g;
  for (int i = 0; i < n; ++i) {
    g.add_atom(e);
    if (i > 0)
      g.add_bond(i - 1, i, BondOrder::single);
  }
  return g;
}

MolGraph kekule_benzene() {
  MolGraph g;
  for (int i = 0; i < 6; ++i)
    g.add_atom(Element::C);
  for (int i = 0; i < 6; ++i)
    g.add_bond(i, (i + 1) % 6,
               i % 2 == 0 ? BondOrder::double_ : BondOrder::single);
  return g;
}

TEST(ElementTest, Vocabulary) {
  EXPECT_EQ(kNumElements, 9);
  for (int i = 0; i < kNumElements; ++i) {
    const auto &d = element_data(element_from_index(i));
    EXPECT_GT(d.mass, 0);
    EXPECT_GE(d.num_valences, 1);
    EXPECT_EQ(*element_from_symbol(d.symbol), element_from_index(i));
  }
  EXPECT_FALSE(element_from_symbol("B").has_value());
  EXPECT_FALSE(element_from_symbol("Si").has_value());
}

TEST(MolGraphTest, ExplicitValence) {
  EXPECT_EQ(explicit_valence(chain(2), 0), 1);
  EXPECT_EQ(explicit_valence(chain(1), 0), 0);

  // Acetone CC(=O)C, carbonyl carbon is atom 1.
  MolGraph acetone;
  for (Element e: { Element::C, Element::C, Element::O, Element::C })
    acetone.add_atom(e);
  acetone.add_bond(0, 1, BondOrder::single);
  acetone.add_bond(1, 2, BondOrder::double_);
  acetone.add_bond(1, 3, BondOrder::single);
  EXPECT_EQ(explicit_valence(acetone, 1), 1 + 2 + 1);

  EXPECT_THROW(explicit_valence(acetone, 4), GraphError);
  EXPECT_THROW(explicit_valence(acetone, -1), GraphError);
}

TEST(MolGraphTest, UnsetBondsCountZeroValence) {
  MolGraph g = chain(2);
  g.set_bond_order(0, BondOrder::unset);
  EXPECT_EQ(explicit_valence(g, 0), 0);
  EXPECT_EQ(occupied_valence(g, 0), 1);
  EXPECT_EQ(implicit_hydrogens(g, 0), 4);
  EXPECT_EQ(spare_valence(g, 0), 3);
}

TEST(MolGraphTest, ImplicitHydrogens) {
  MolGraph c;
  c.add_atom(Element::C);
  EXPECT_EQ(implicit_hydrogens(c, 0), 4);

  MolGraph o;
  o.add_atom(Element::O);
  EXPECT_EQ(implicit_hydrogens(o, 0), 2);

  // Secondary amine nitrogen: min allowed valence 3 minus 2 bonds.
  MolGraph cnc;
  for (Element e: { Element::C, Element::N, Element::C })
    cnc.add_atom(e);
  cnc.add_bond(0, 1, BondOrder::single);
  cnc.add_bond(1, 2, BondOrder::single);
  EXPECT_EQ(implicit_hydrogens(cnc, 1), 3 - 2);

  // Sulfur steps up to the next allowed valence: DMSO sulfur has valence 4.
  MolGraph dmso;
  for (Element e: { Element::C, Element::S, Element::O, Element::C })
    dmso.add_atom(e);
  dmso.add_bond(0, 1, BondOrder::single);
  dmso.add_bond(1, 2, BondOrder::double_);
  dmso.add_bond(1, 3, BondOrder::single);
  EXPECT_EQ(implicit_hydrogens(dmso, 1), 0);
}

TEST(MolGraphTest, ImplicitHydrogenOverflowThrows) {
  MolGraph g;
  g.add_atom(Element::F);
  g.add_atom(Element::C);
  g.add_bond(0, 1, BondOrder::double_);
  EXPECT_THROW(implicit_hydrogens(g, 0), GraphError);
  EXPECT_FALSE(is_valid(g));
}

TEST(MolGraphTest, MolecularWeight) {
  EXPECT_DOUBLE_EQ(molecular_weight(MolGraph {}), 0.0);

  MolGraph methane;
  methane.add_atom(Element::C);
  EXPECT_NEAR(molecular_weight(methane), 12.011 + 4 * 1.008, 1e-9);
  EXPECT_NEAR(molecular_weight(methane), 16.043, 1e-9);

  MolGraph ethanol = chain(2);
  ethanol.add_atom(Element::O);
  ethanol.add_bond(1, 2, BondOrder::single);
  EXPECT_NEAR(molecular_weight(ethanol), 2 * 12.011 + 15.999 + 6 * 1.008,
              1e-9);
  EXPECT_NEAR(molecular_weight(ethanol), 46.069, 1e-9);
}

TEST(MolGraphTest, StructuralErrors) {
  MolGraph g = chain(2);
  EXPECT_THROW(g.add_bond(0, 0, BondOrder::single), GraphError);
  EXPECT_THROW(g.add_bond(1, 0, BondOrder::single), GraphError);
  EXPECT_THROW(g.add_bond(0, 5, BondOrder::single), GraphError);
}

TEST(MolGraphTest, RemoveAtomCompactsIndices) {
  MolGraph g = chain(3);
  g.remove_atom(0);
  ASSERT_EQ(g.num_atoms(), 2);
  ASSERT_EQ(g.num_bonds(), 1);
  EXPECT_EQ(g.bond(0).u, 0);
  EXPECT_EQ(g.bond(0).v, 1);
  EXPECT_TRUE(g.is_connected());
}

TEST(MolGraphTest, Connectivity) {
  MolGraph g = chain(3);
  EXPECT_TRUE(g.is_connected());
  g.remove_bond(g.find_bond(1, 2));
  EXPECT_FALSE(g.is_connected());
  EXPECT_EQ(*validation_error(g), "graph is disconnected");
}

TEST(MolGraphTest, Limits) {
  GraphLimits limits;
  EXPECT_EQ(limits.max_nodes, 45);
  EXPECT_EQ(limits.max_edges, 50);
  EXPECT_TRUE(is_valid(chain(45)));
  EXPECT_FALSE(is_valid(chain(46)));
}

TEST(MolGraphTest, RingFlags) {
  MolGraph toluene = kekule_benzene();
  toluene.add_atom(Element::C);
  toluene.add_bond(0, 6, BondOrder::single);
  auto atoms = ring_atom_flags(toluene);
  for (int i = 0; i < 6; ++i)
    EXPECT_TRUE(atoms[i]);
  EXPECT_FALSE(atoms[6]);
  auto bonds = ring_bond_flags(toluene);
  EXPECT_FALSE(bonds[toluene.find_bond(0, 6)]);
  EXPECT_TRUE(bonds[toluene.find_bond(0, 1)]);
}

TEST(ScaffoldTest, Benzene) {
  MolGraph b = kekule_benzene();
  EXPECT_EQ(bemis_murcko_scaffold(b), b);
}

TEST(ScaffoldTest, TolueneToBenzene) {
  MolGraph toluene = kekule_benzene();
  toluene.add_atom(Element::C);
  toluene.add_bond(0, 6, BondOrder::single);
  MolGraph s = bemis_murcko_scaffold(toluene);
  EXPECT_EQ(s.num_atoms(), 6);
  EXPECT_EQ(s.num_bonds(), 6);
  EXPECT_EQ(canonical_form(to_colored_graph(s)).certificate,
            canonical_form(to_colored_graph(kekule_benzene())).certificate);
}

TEST(ScaffoldTest, AcyclicIsEmpty) {
  EXPECT_TRUE(bemis_murcko_scaffold(chain(6)).empty());
}

TEST(ScaffoldTest, KeepsExocyclicDoubleBondAndLinker) {
  // Cyclohexanone: the carbonyl oxygen stays.
  MolGraph g;
  for (int i = 0; i < 6; ++i)
    g.add_atom(Element::C);
  for (int i = 0; i < 6; ++i)
    g.add_bond(i, (i + 1) % 6, BondOrder::single);
  g.add_atom(Element::O);
  g.add_bond(0, 6, BondOrder::double_);
  g.add_atom(Element::C);  // methyl, pruned
  g.add_bond(3, 7, BondOrder::single);
  MolGraph s = bemis_murcko_scaffold(g);
  EXPECT_EQ(s.num_atoms(), 7);

  // Diphenylmethane keeps the CH2 linker.
  MolGraph d = kekule_benzene();
  d.add_atom(Element::C);
  for (int i = 0; i < 6; ++i)
    d.add_atom(Element::C);
  for (int i = 0; i < 6; ++i)
    d.add_bond(7 + i, 7 + (i + 1) % 6,
               i % 2 == 0 ? BondOrder::double_ : BondOrder::single);
  d.add_bond(0, 6, BondOrder::single);
  d.add_bond(6, 7, BondOrder::single);
  EXPECT_EQ(bemis_murcko_scaffold(d).num_atoms(), 13);
}

TEST(ScaffoldTest, Idempotent) {
  MolGraph g = kekule_benzene();
  g.add_atom(Element::N);
  g.add_bond(2, 6, BondOrder::single);
  g.add_atom(Element::C);
  g.add_bond(6, 7, BondOrder::single);
  MolGraph s = bemis_murcko_scaffold(g);
  EXPECT_EQ(bemis_murcko_scaffold(s), s);
}

TEST(MolGraphTest, MolecularWeightAdditive) {
  MolGraph a = chain(3);
  MolGraph b = chain(2, Element::O);
  b.set_bond_order(0, BondOrder::single);
  MolGraph ab = a;
  ab.add_atom(Element::O);
  ab.add_atom(Element::O);
  ab.add_bond(3, 4, BondOrder::single);
  // Disjoint union evaluated atom-wise equals the sum of the parts.
  EXPECT_NEAR(molecular_weight(ab), molecular_weight(a) + molecular_weight(b),
              1e-9);
}

TEST(CanonTest, PermutationInvariantCertificate) {
  MolGraph g = kekule_benzene();
  g.add_atom(Element::O);
  g.add_bond(1, 6, BondOrder::single);
  g.add_atom(Element::N);
  g.add_bond(4, 7, BondOrder::single);
  const auto base = canonical_form(to_colored_graph(g)).certificate;
  std::mt19937_64 rng(7);
  std::vector<int> perm(g.num_atoms());
  std::iota(perm.begin(), perm.end(), 0);
  for (int t = 0; t < 50; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_EQ(canonical_form(to_colored_graph(g.permuted(perm))).certificate,
              base);
  }
}

// Brute force over all n! relabelings.
double brute_force_automorphisms(const MolGraph &g) {
  std::vector<int> perm(g.num_atoms());
  std::iota(perm.begin(), perm.end(), 0);
  double count = 0;
  do {
    if (g.permuted(perm) == g)
      ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

TEST(CanonTest, AutomorphismCountMatchesBruteForce) {
  MolGraph benzene_sigma;  // all bonds unset: full dihedral group
  for (int i = 0; i < 6; ++i)
    benzene_sigma.add_atom(Element::C);
  for (int i = 0; i < 6; ++i)
    benzene_sigma.add_bond(i, (i + 1) % 6, BondOrder::unset);

  MolGraph neopentane;
  for (int i = 0; i < 5; ++i)
    neopentane.add_atom(Element::C);
  for (int i = 1; i < 5; ++i)
    neopentane.add_bond(0, i, BondOrder::single);

  MolGraph ethanol = chain(2);
  ethanol.add_atom(Element::O);
  ethanol.add_bond(1, 2, BondOrder::single);

  MolGraph cubane_like;  // 3-cube, 48 automorphisms
  for (int i = 0; i < 8; ++i)
    cubane_like.add_atom(Element::C);
  for (int i = 0; i < 8; ++i) {
    for (int bit = 0; bit < 3; ++bit) {
      int j = i ^ (1 << bit);
      if (i < j)
        cubane_like.add_bond(i, j, BondOrder::single);
    }
  }

  for (const MolGraph *g: { &benzene_sigma, &neopentane, &ethanol,
                            &cubane_like }) {
    EXPECT_DOUBLE_EQ(automorphism_count(*g), brute_force_automorphisms(*g));
  }
  EXPECT_DOUBLE_EQ(automorphism_count(kekule_benzene()), 6.0);
  EXPECT_DOUBLE_EQ(automorphism_count(benzene_sigma), 12.0);
  EXPECT_DOUBLE_EQ(automorphism_count(neopentane), 24.0);
  EXPECT_DOUBLE_EQ(automorphism_count(cubane_like), 48.0);
}

TEST(CanonTest, ChiralityDistinguishesStates) {
  MolGraph a = chain(3);
  MolGraph b = a;
  b.set_chirality(1, Chirality::r);
  EXPECT_NE(canonical_form(to_colored_graph(a, ColorMode::kState)).certificate,
            canonical_form(to_colored_graph(b, ColorMode::kState)).certificate);
  EXPECT_EQ(canonical_form(to_colored_graph(a)).certificate,
            canonical_form(to_colored_graph(b)).certificate);
}

}  // namespace
}  // namespace agfn
