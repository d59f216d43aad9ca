//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "agfn/descriptors.hpp"

#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "agfn/fingerprint.hpp"
#include "agfn/rings.hpp"
#include "agfn/smiles.hpp"

namespace agfn {
namespace {

MolGraph chain(int n) {
  MolGraph g;
  for (int i = 0; i < n; ++i) {
    g.add_atom(Element::C);
    if (i > 0)
      g.add_bond(i - 1, i, BondOrder::single);
  }
  return g;
}

TEST(RingTest, RingCount) {
  EXPECT_EQ(ring_count(parse_smiles("c1ccccc1")), 1);
  EXPECT_EQ(ring_count(parse_smiles("CCCCCC")), 0);
  // Cycle-space dimension E - V + 1 = 11 - 10 + 1, both six-membered.
  MolGraph naph = parse_smiles("c1ccc2ccccc2c1");
  EXPECT_EQ(naph.num_bonds() - naph.num_atoms() + 1, 2);
  EXPECT_EQ(ring_count(naph), 2);
  for (const Ring &r: sssr(naph))
    EXPECT_EQ(r.size(), 6);
}

TEST(RingTest, SizeFilterAndSwitch) {
  MolGraph g = parse_smiles("C1CC1CC1CCCCCCC1");  // 3-ring and 8-ring
  EXPECT_EQ(ring_count(g), 0);
  EXPECT_EQ(ring_count(g, true), 2);
  MolGraph spiro = parse_smiles("C1CCC2(C1)CCCCC2");
  EXPECT_EQ(ring_count(spiro), 2);
}

TEST(RingTest, SssrRingsAreSmallest) {
  // Cubane: 6 four-membered faces, cycle space dimension 12 - 8 + 1 = 5.
  MolGraph cubane = parse_smiles("C12C3C4C1C5C2C3C45");
  auto rings = sssr(cubane);
  ASSERT_EQ(rings.size(), 5U);
  for (const Ring &r: rings)
    EXPECT_EQ(r.size(), 4);
}

TEST(AromaticityTest, CommonRings) {
  auto all = [](std::string_view smi) {
    auto a = perceive_aromaticity(parse_smiles(smi));
    return std::all_of(a.atoms.begin(), a.atoms.end(),
                       [](char c) { return c != 0; });
  };
  auto none = [](std::string_view smi) {
    auto a = perceive_aromaticity(parse_smiles(smi));
    return std::none_of(a.atoms.begin(), a.atoms.end(),
                        [](char c) { return c != 0; });
  };
  EXPECT_TRUE(all("c1ccccc1"));
  EXPECT_TRUE(all("c1cc[nH]c1"));
  EXPECT_TRUE(all("c1ccoc1"));
  EXPECT_TRUE(all("c1ccsc1"));
  EXPECT_TRUE(all("c1ccc2ccccc2c1"));
  EXPECT_TRUE(none("C1=CCC=C1"));
  EXPECT_TRUE(none("C1=CC=CC=CC=C1"));  // 8 electrons
  EXPECT_TRUE(none("C1CCCCC1"));
}

TEST(TpsaTest, Values) {
  EXPECT_DOUBLE_EQ(tpsa(parse_smiles("CC")), 0.0);
  EXPECT_DOUBLE_EQ(tpsa(parse_smiles("CCO")), 20.23);
  EXPECT_DOUBLE_EQ(tpsa(parse_smiles("CCOCC")), 9.23);
  // Acetamide: carbonyl O 17.07 + NH2 26.02.
  EXPECT_NEAR(tpsa(parse_smiles("CC(N)=O")), 17.07 + 26.02, 1e-12);
  // Pyridine aromatic N.
  EXPECT_NEAR(tpsa(parse_smiles("c1ccncc1")), 12.89, 1e-12);
  EXPECT_GE(tpsa(parse_smiles("CS(=O)(=O)N")), 0.0);
}

TEST(LogpTest, Values) {
  // Methane: C1 type plus four H1 hydrogens.
  EXPECT_NEAR(logp(parse_smiles("C")), 0.1441 + 4 * 0.123, 1e-12);
  EXPECT_LT(logp(parse_smiles("CCO")), logp(parse_smiles("CC")));
  // Benzene: six aromatic CH carbons (0.1581) and six H1 hydrogens.
  EXPECT_NEAR(logp(parse_smiles("c1ccccc1")), 6 * 0.1581 + 6 * 0.123, 1e-12);
  // Kekule input is perceived as aromatic too.
  EXPECT_NEAR(logp(parse_smiles("C1=CC=CC=C1")), 6 * 0.1581 + 6 * 0.123,
              1e-12);
}

TEST(StandInTest, QedAndSas) {
  double q = qed_like(parse_smiles("c1ccccc1"));
  EXPECT_GT(q, 0.0);
  EXPECT_LT(q, 1.0);
  EXPECT_GT(sas_like(chain(60)), 5.0);
  for (const char *s: { "C", "CCO", "c1ccc2ccccc2c1", "CC(=O)Nc1ccc(O)cc1" }) {
    MolGraph g = parse_smiles(s);
    EXPECT_GE(qed_like(g), 0.0);
    EXPECT_LE(qed_like(g), 1.0);
    EXPECT_GE(sas_like(g), 1.0);
    EXPECT_LE(sas_like(g), 10.0);
  }
  // Size penalty is monotone.
  EXPECT_LT(sas_like(chain(10)), sas_like(chain(20)));
}

TEST(PropertyTest, ExternalTablePassthrough) {
  std::istringstream in("OCC\t0.42\nc1ccccc1\t-7.5\n");
  ScoreTable t = ScoreTable::load(in);
  PropertyCalculator calc;
  calc.add_table("QED", t);
  calc.add_table("docking", t);
  EXPECT_DOUBLE_EQ(calc(property_from_name("QED"), parse_smiles("CCO")), 0.42);
  EXPECT_DOUBLE_EQ(
      calc(property_from_name("docking"), parse_smiles("C1=CC=CC=C1")), -7.5);
  EXPECT_THROW(calc(property_from_name("docking"), parse_smiles("CC")),
               ScoreTableError);
  EXPECT_THROW(calc(property_from_name("other"), parse_smiles("CC")),
               ScoreTableError);
  EXPECT_DOUBLE_EQ(calc(property_from_name("TPSA"), parse_smiles("CCO")),
                   20.23);
  EXPECT_EQ(property_from_name("MolWt").kind, PropertyKind::MolWt);
  EXPECT_EQ(property_from_name("docking").kind, PropertyKind::External);
  EXPECT_DOUBLE_EQ(t.median(), 0.5 * (0.42 - 7.5));
}

TEST(PropertyTest, PermutationInvariance) {
  MolGraph g = parse_smiles("CC(=O)Nc1ccc(O)cc1CS(=O)(=O)N");
  std::mt19937_64 rng(11);
  std::vector<int> perm(g.num_atoms());
  std::iota(perm.begin(), perm.end(), 0);
  const double t0 = tpsa(g), l0 = logp(g), q0 = qed_like(g), s0 = sas_like(g);
  const int r0 = ring_count(g);
  for (int t = 0; t < 20; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    MolGraph p = g.permuted(perm);
    EXPECT_NEAR(tpsa(p), t0, 1e-9);
    EXPECT_NEAR(logp(p), l0, 1e-9);
    EXPECT_NEAR(qed_like(p), q0, 1e-9);
    EXPECT_NEAR(sas_like(p), s0, 1e-9);
    EXPECT_EQ(ring_count(p), r0);
  }
}

TEST(FingerprintTest, Basics) {
  MolGraph g = parse_smiles("CC(=O)Nc1ccc(O)cc1");
  EXPECT_EQ(fingerprint(g), fingerprint(g));
  EXPECT_GT(fingerprint(g).count(), 0);
  std::mt19937_64 rng(5);
  std::vector<int> perm(g.num_atoms());
  std::iota(perm.begin(), perm.end(), 0);
  for (int t = 0; t < 20; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_EQ(fingerprint(g.permuted(perm)), fingerprint(g));
  }
  EXPECT_NE(fingerprint(parse_smiles("C")), fingerprint(parse_smiles("CI")));
  EXPECT_EQ(fingerprint(parse_smiles("C1=CC=CC=C1C")),
            fingerprint(parse_smiles("C=1C=CC=CC=1C")));
  EXPECT_THROW(fingerprint(MolGraph {}), FingerprintError);
  EXPECT_THROW(Fingerprint(1000), FingerprintError);
}

TEST(FingerprintTest, Tanimoto) {
  Fingerprint a(64), b(64);
  for (int i = 0; i <= 6; ++i)
    a.set(i);
  for (int i = 4; i <= 11; ++i)
    b.set(i);
  // |a & b| = 3 (bits 4..6), |a | b| = 12 (bits 0..11).
  EXPECT_DOUBLE_EQ(tanimoto(a, b), 3.0 / 12.0);
  EXPECT_DOUBLE_EQ(tanimoto(a, a), 1.0);
  EXPECT_DOUBLE_EQ(tanimoto(a, b), tanimoto(b, a));

  Fingerprint c(64), d(64);
  c.set(1);
  d.set(2);
  EXPECT_DOUBLE_EQ(tanimoto(c, d), 0.0);
  EXPECT_THROW(tanimoto(Fingerprint(64), Fingerprint(64)), FingerprintError);
  EXPECT_THROW(tanimoto(Fingerprint(64), Fingerprint(128)), FingerprintError);
}

}  // namespace
}  // namespace agfn
