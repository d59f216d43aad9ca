//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "agfn/smiles.hpp"

#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace agfn {
namespace {

// Exhaustive oracle: every assignment of single/double to the ring bonds
// that gives each carbon exactly one double bond.
int count_benzene_kekule_structures() {
  int count = 0;
  for (int mask = 0; mask < 64; ++mask) {
    bool ok = true;
    for (int atom = 0; atom < 6 && ok; ++atom) {
      int left = (atom + 5) % 6;  // bond index left of atom
      int right = atom;
      int doubles = ((mask >> left) & 1) + ((mask >> right) & 1);
      ok = doubles == 1;
    }
    count += ok;
  }
  return count;
}

TEST(SmilesParseTest, Simple) {
  MolGraph g = parse_smiles("CC");
  ASSERT_EQ(g.num_atoms(), 2);
  ASSERT_EQ(g.num_bonds(), 1);
  EXPECT_EQ(g.bond(0).order, BondOrder::single);

  MolGraph cp = parse_smiles("C1CC1");
  EXPECT_EQ(cp.num_atoms(), 3);
  EXPECT_EQ(cp.num_bonds(), 3);
  for (const Bond &b: cp.bonds())
    EXPECT_EQ(b.order, BondOrder::single);
}

TEST(SmilesParseTest, BenzeneKekulized) {
  EXPECT_EQ(count_benzene_kekule_structures(), 2);
  MolGraph g = parse_smiles("c1ccccc1");
  ASSERT_EQ(g.num_atoms(), 6);
  ASSERT_EQ(g.num_bonds(), 6);
  for (int v = 0; v < 6; ++v) {
    int doubles = 0, singles = 0;
    for (int b: g.incident(v)) {
      doubles += g.bond(b).order == BondOrder::double_;
      singles += g.bond(b).order == BondOrder::single;
    }
    EXPECT_EQ(doubles, 1);
    EXPECT_EQ(singles, 1);
    EXPECT_EQ(implicit_hydrogens(g, v), 1);
  }
}

TEST(SmilesParseTest, AromaticHeterocycles) {
  MolGraph pyrrole = parse_smiles("c1cc[nH]c1");
  EXPECT_EQ(implicit_hydrogens(pyrrole, 3), 1);
  MolGraph pyridine = parse_smiles("c1ccncc1");
  EXPECT_EQ(implicit_hydrogens(pyridine, 3), 0);
  MolGraph furan = parse_smiles("c1ccoc1");
  EXPECT_EQ(furan.num_atoms(), 5);
  MolGraph thiophene = parse_smiles("c1ccsc1");
  EXPECT_EQ(implicit_hydrogens(thiophene, 3), 0);
  MolGraph naphthalene = parse_smiles("c1ccc2ccccc2c1");
  EXPECT_EQ(naphthalene.num_atoms(), 10);
  EXPECT_EQ(total_implicit_hydrogens(naphthalene), 8);
  MolGraph pyridone = parse_smiles("O=c1cccc[nH]1");
  EXPECT_EQ(pyridone.bond(0).order, BondOrder::double_);
}

TEST(SmilesParseTest, BranchesRingClosuresAndBrackets) {
  MolGraph g = parse_smiles("CC(C)(C)C");
  EXPECT_EQ(g.degree(1), 4);
  MolGraph big = parse_smiles("C%10CCCCC%10");
  EXPECT_EQ(big.num_bonds(), 6);
  MolGraph ch = parse_smiles("C[C@H](N)O");
  EXPECT_EQ(ch.atom(1).chirality, Chirality::s);
  MolGraph ch2 = parse_smiles("C[C@@H](N)O");
  EXPECT_EQ(ch2.atom(1).chirality, Chirality::r);
  MolGraph sulfone = parse_smiles("CS(=O)(=O)C");
  EXPECT_EQ(explicit_valence(sulfone, 1), 6);
  MolGraph ring_bond_symbol = parse_smiles("C=1CCC1");
  EXPECT_EQ(ring_bond_symbol.bond(ring_bond_symbol.find_bond(0, 3)).order,
            BondOrder::double_);
}

TEST(SmilesParseTest, Errors) {
  auto expect_error = [](std::string_view s, std::size_t pos) {
    try {
      parse_smiles(s);
      ADD_FAILURE() << "no error for " << s;
    } catch (const SmilesError &e) {
      EXPECT_EQ(e.position(), pos) << s << ": " << e.what();
    }
  };
  expect_error("", 0);
  expect_error("CC(", 3);
  expect_error("CC)", 2);
  expect_error("C1CC", 1);
  expect_error("C.C", 1);
  expect_error("C/C=C/C", 1);
  expect_error("[NH4+]", 0);
  expect_error("[13CH4]", 0);
  expect_error("*C", 0);
  expect_error("B", 0);
  expect_error("[Si]", 0);
  expect_error("CC=", 2);
  EXPECT_THROW(parse_smiles("c1cccc1"), SmilesError);   // no kekule form
  EXPECT_THROW(parse_smiles("FC(F)(F)(F)F"), SmilesError);  // valence
  EXPECT_THROW(parse_smiles("C=C=C=C#C"), SmilesError);
}

TEST(SmilesWriteTest, Basic) {
  MolGraph c;
  c.add_atom(Element::C);
  EXPECT_EQ(write_smiles(c), "C");
  EXPECT_THROW(write_smiles(MolGraph {}), GraphError);

  MolGraph benzene = parse_smiles("c1ccccc1");
  std::string s = write_smiles(benzene);
  EXPECT_EQ(s.find('c'), std::string::npos);
  MolGraph back = parse_smiles(s);
  EXPECT_EQ(canonical_key(back), canonical_key(benzene));

  MolGraph ethanol = parse_smiles("CCO");
  EXPECT_NEAR(molecular_weight(parse_smiles(write_smiles(ethanol))), 46.069,
              1e-9);

  MolGraph unset = parse_smiles("CC");
  unset.set_bond_order(0, BondOrder::unset);
  EXPECT_THROW(write_smiles(unset), GraphError);
}

TEST(SmilesWriteTest, StereoRoundTrip) {
  MolGraph g = parse_smiles("C[C@@H](N)O");
  MolGraph back = parse_smiles(write_smiles(g));
  EXPECT_EQ(back.atom(1).chirality, Chirality::r);
}

TEST(CanonicalKeyTest, Basic) {
  EXPECT_EQ(canonical_key(parse_smiles("CCO")),
            canonical_key(parse_smiles("OCC")));
  EXPECT_NE(canonical_key(parse_smiles("CC")),
            canonical_key(parse_smiles("C=C")));
  EXPECT_EQ(canonical_key(parse_smiles("C1=CC=CC=C1")),
            canonical_key(parse_smiles("c1ccccc1")));
  EXPECT_EQ(canonical_key(parse_smiles("C[C@H](N)O")),
            canonical_key(parse_smiles("CC(N)O")));
  EXPECT_NE(canonical_key(parse_smiles("CCCO")),
            canonical_key(parse_smiles("CC(C)O")));
}

TEST(CanonicalKeyTest, KekuleFormsAgree) {
  // Two Kekule structures of naphthalene-like systems must share a key only
  // when isomorphic; for benzene both assignments are equivalent.
  EXPECT_EQ(canonical_key(parse_smiles("C1=CC=CC=C1")),
            canonical_key(parse_smiles("C=1C=CC=CC=1")));
}

TEST(CanonicalKeyTest, PermutationFuzz) {
  // 12 heavy atoms.
  MolGraph g = parse_smiles("CC(=O)Nc1ccc(O)cc1C");
  ASSERT_EQ(g.num_atoms(), 12);
  const CanonicalKey key = canonical_key(g);
  std::mt19937_64 rng(2024);
  std::vector<int> perm(g.num_atoms());
  std::iota(perm.begin(), perm.end(), 0);
  std::set<std::string> keys;
  for (int t = 0; t < 50; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    keys.insert(canonical_key(g.permuted(perm)).text);
  }
  ASSERT_EQ(keys.size(), 1U);
  EXPECT_EQ(*keys.begin(), key.text);
}

TEST(CanonicalKeyTest, UnsetBondsMarked) {
  MolGraph g = parse_smiles("CC");
  g.set_bond_order(0, BondOrder::unset);
  EXPECT_EQ(canonical_key(g).text, "C~C");
  EXPECT_TRUE(canonical_key(MolGraph {}).text.empty());
}

TEST(DatasetTest, SkipsAndCounts) {
  std::istringstream in("# header\n"
                        "CCO ethanol 1.0\n"
                        "\n"
                        "C[N+](C)(C)C\n"
                        "c1ccccc1\tbenzene\n"
                        "C.C\n");
  DatasetReport r = read_smiles_stream(in);
  ASSERT_EQ(r.molecules.size(), 2U);
  EXPECT_EQ(r.malformed, 2U);
  EXPECT_EQ(r.molecules[1].line, 5U);
  EXPECT_EQ(r.molecules[0].smiles, "CCO");

  std::istringstream strict_in("CCO\nC.C\n");
  EXPECT_THROW(read_smiles_stream(strict_in, true), DataError);

  std::istringstream big("CCCCCCCCCC\n");
  DatasetReport limited = read_smiles_stream(big, false, GraphLimits { 5, 5 });
  EXPECT_EQ(limited.out_of_limits, 1U);
  EXPECT_TRUE(limited.molecules.empty());
}

TEST(DatasetTest, BundledCorpusParses) {
  DatasetReport r =
      read_smiles_file(std::string(AGFN_SOURCE_DIR) + "/data/corpus.smi", true);
  EXPECT_EQ(r.molecules.size(), 1000U);
}

}  // namespace
}  // namespace agfn
