//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "agfn/mdp.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "agfn/smiles.hpp"

namespace agfn {
namespace {

int count_type(const std::vector<Action> &xs, ActionType t) {
  return static_cast<int>(
      std::count_if(xs.begin(), xs.end(), [t](const Action &x) {
        return x.type == t;
      }));
}

State single(Element e) {
  return apply(empty_state(),
               Action { ActionType::add_node, -1, -1, element_index(e) });
}

TEST(ForwardActionsTest, EmptyState) {
  auto xs = forward_actions(empty_state());
  ASSERT_EQ(xs.size(), 9U);
  for (int e = 0; e < 9; ++e) {
    EXPECT_EQ(xs[e].type, ActionType::add_node);
    EXPECT_EQ(xs[e].a, -1);
    EXPECT_EQ(xs[e].value, e);
  }
}

TEST(ForwardActionsTest, SingleFluorine) {
  // Nine AddNode(0, e) plus Stop; no edge or chirality moves.
  auto xs = forward_actions(single(Element::F));
  EXPECT_EQ(xs.size(), 10U);
  EXPECT_EQ(count_type(xs, ActionType::add_node), 9);
  EXPECT_EQ(count_type(xs, ActionType::stop), 1);
  MdpConfig no_chiral;
  no_chiral.allow_chirality = false;
  EXPECT_EQ(forward_actions(single(Element::C), no_chiral).size(), 10U);
  EXPECT_EQ(forward_actions(single(Element::C)).size(), 12U);
}

TEST(ForwardActionsTest, UnsetBondBlocksStop) {
  State s = apply(single(Element::C), { ActionType::add_node, 0, -1,
                                        element_index(Element::O) });
  auto xs = forward_actions(s);
  EXPECT_EQ(count_type(xs, ActionType::stop), 0);
  // C has spare 3, O spare 1 with the unset bond holding one unit: single or
  // double.
  EXPECT_EQ(count_type(xs, ActionType::set_edge_attr), 2);
  EXPECT_TRUE(forward_legal(s, { ActionType::set_edge_attr, 0, -1, 2 }));
  EXPECT_FALSE(forward_legal(s, { ActionType::set_edge_attr, 0, -1, 3 }));
}

TEST(ForwardActionsTest, NodeCap) {
  MolGraph g;
  for (int i = 0; i < 45; ++i) {
    g.add_atom(Element::C);
    if (i > 0)
      g.add_bond(i - 1, i, BondOrder::single);
  }
  State s { g };
  MdpConfig cfg;
  cfg.max_traj_len = 1000;
  auto xs = forward_actions(s, cfg);
  EXPECT_EQ(count_type(xs, ActionType::add_node), 0);
  EXPECT_GT(count_type(xs, ActionType::add_edge), 0);
}

TEST(ForwardActionsTest, TerminalThrows) {
  State s = apply(single(Element::C), Action { ActionType::stop });
  EXPECT_TRUE(s.terminal);
  EXPECT_THROW(forward_actions(s), MdpError);
}

TEST(BackwardActionsTest, TwoCarbonsUnsetEdge) {
  State s = apply(single(Element::C), { ActionType::add_node, 0, -1, 0 });
  auto xs = backward_actions(s);
  // The edge is a bridge; either leaf may go.
  EXPECT_EQ(count_type(xs, ActionType::delete_edge), 0);
  EXPECT_EQ(count_type(xs, ActionType::delete_node), 2);
  EXPECT_EQ(xs.size(), 2U);
}

TEST(BackwardActionsTest, Triangle) {
  State s { parse_smiles("C1CC1") };
  auto xs = backward_actions(s);
  ASSERT_EQ(xs.size(), 3U);
  for (const Action &x: xs)
    EXPECT_EQ(x.type, ActionType::unset_edge_attr);
}

TEST(BackwardActionsTest, TriangleUnset) {
  MolGraph g;
  for (int i = 0; i < 3; ++i)
    g.add_atom(Element::C);
  g.add_bond(0, 1, BondOrder::unset);
  g.add_bond(1, 2, BondOrder::unset);
  g.add_bond(0, 2, BondOrder::unset);
  auto xs = backward_actions(State { g });
  EXPECT_EQ(count_type(xs, ActionType::delete_edge), 3);
  EXPECT_EQ(count_type(xs, ActionType::delete_node), 0);
}

TEST(BackwardActionsTest, SingleNodeAndEmpty) {
  auto xs = backward_actions(single(Element::O));
  ASSERT_EQ(xs.size(), 1U);
  EXPECT_EQ(xs[0].type, ActionType::delete_node);
  EXPECT_TRUE(apply(single(Element::O), xs[0]).graph.empty());
  EXPECT_THROW(backward_actions(empty_state()), MdpError);
}

TEST(BackwardActionsTest, SeedHasNoMoves) {
  State s = seed_state(parse_smiles("c1ccccc1"));
  EXPECT_THROW(backward_actions(s), MdpError);
  // Forward: no edge between frozen atoms, no chirality on them.
  auto xs = forward_actions(s);
  EXPECT_EQ(count_type(xs, ActionType::add_edge), 0);
  EXPECT_EQ(count_type(xs, ActionType::set_node_attr), 0);
  EXPECT_EQ(count_type(xs, ActionType::add_node), 6 * 9);
}

TEST(ApplyTest, Examples) {
  State c = single(Element::C);
  EXPECT_EQ(c.graph.num_atoms(), 1);
  State co = apply(c, { ActionType::add_node, 0, -1,
                        element_index(Element::O) });
  ASSERT_EQ(co.graph.num_bonds(), 1);
  EXPECT_EQ(co.graph.bond(0).order, BondOrder::unset);
  EXPECT_EQ(co.graph.atom(1).element, Element::O);
  State done = apply(c, Action { ActionType::stop });
  EXPECT_TRUE(done.terminal);
  EXPECT_EQ(done.graph, c.graph);
  EXPECT_THROW(apply(co, Action { ActionType::stop }), MdpError);
}

TEST(BudgetTest, TrajectoryLengthCapped) {
  std::mt19937_64 rng(3);
  auto choose = uniform_chooser(rng);
  MdpConfig cfg;
  cfg.max_traj_len = 12;
  for (int i = 0; i < 300; ++i) {
    Trajectory t = rollout(empty_state(), choose, cfg);
    EXPECT_LE(t.length(), 12);
    EXPECT_EQ(t.length(), construction_steps(t.last().graph) + 1);
  }
  EXPECT_THROW(deconstruct(parse_smiles("CCCCCCCCCC"), choose, cfg), MdpError);
}

// Random rollouts with the bijection property checked at every step.
TEST(MdpPropertyTest, RolloutsValidAndBijective) {
  std::mt19937_64 rng(1428570);
  MdpConfig cfg;
  for (int r = 0; r < 300; ++r) {
    State s = empty_state();
    while (!s.terminal) {
      auto xs = forward_actions(s, cfg);
      ASSERT_FALSE(xs.empty());
      std::uniform_int_distribution<int> pick(0, (int)xs.size() - 1);
      const Action x = xs[pick(rng)];
      State next = apply(s, x, cfg);
      ASSERT_FALSE(validation_error(next.graph, cfg.limits).has_value());
      for (int v = 0; v < next.graph.num_atoms(); ++v)
        ASSERT_GE(implicit_hydrogens(next.graph, v), 0);
      if (!next.terminal) {
        const Action inv = backward_inverse(s, x);
        auto bs = backward_actions(next);
        ASSERT_NE(std::find(bs.begin(), bs.end(), inv), bs.end())
            << to_string(x);
        EXPECT_EQ(apply(next, inv, cfg), s);
        // Vice versa: every backward move has a legal forward inverse.
        for (const Action &b: bs) {
          State parent = apply(next, b, cfg);
          ASSERT_TRUE(forward_legal(parent, forward_inverse(next, b), cfg))
              << to_string(b);
        }
      }
      s = std::move(next);
    }
    EXPECT_TRUE(all_bonds_set(s.graph));
    EXPECT_NO_THROW(write_smiles(s.graph));
  }
}

TEST(DeconstructTest, SingleCarbon) {
  std::mt19937_64 rng(1);
  Trajectory t = deconstruct(parse_smiles("C"), uniform_chooser(rng));
  ASSERT_EQ(t.length(), 2);
  EXPECT_EQ(t.actions[0], (Action { ActionType::add_node, -1, -1, 0 }));
  EXPECT_EQ(t.actions[1].type, ActionType::stop);
  EXPECT_TRUE(replays(t));
}

// Every backward path of ethane, enumerated by always trying each choice.
TEST(DeconstructTest, EthaneAllPaths) {
  const MolGraph ethane = parse_smiles("CC");
  const std::string key = canonical_key(ethane).text;
  std::set<std::vector<std::string>> seen;
  // Choice scripts over at most two binary decisions.
  for (int script = 0; script < 4; ++script) {
    int call = 0;
    ActionChooser choose = [&](const State &, std::span<const Action> xs) {
      const int bit = (script >> call++) & 1;
      return std::min<int>(bit, static_cast<int>(xs.size()) - 1);
    };
    Trajectory t = deconstruct(ethane, choose);
    ASSERT_TRUE(replays(t));
    EXPECT_EQ(canonical_key(t.last().graph).text, key);
    std::vector<std::string> names;
    for (const Action &x: t.actions)
      names.push_back(to_string(x));
    seen.insert(names);
  }
  ASSERT_EQ(seen.size(), 1U);
  EXPECT_EQ(*seen.begin(),
            (std::vector<std::string> { "AddNode(-,C)", "AddNode(0,C)",
                                        "SetEdgeAttr(0,1)", "Stop" }));
}

TEST(DeconstructTest, BenzeneReplay) {
  std::mt19937_64 rng(7);
  auto choose = uniform_chooser(rng);
  const MolGraph benzene = parse_smiles("c1ccccc1");
  const auto key = canonical_key(benzene);
  for (int i = 0; i < 100; ++i) {
    Trajectory t = deconstruct(benzene, choose);
    ASSERT_TRUE(replays(t));
    EXPECT_EQ(canonical_key(t.last().graph), key);
    EXPECT_EQ(t.length(), construction_steps(benzene) + 1);
  }
}

TEST(DeconstructTest, CorpusReplay) {
  auto records = read_smiles_file(std::string(AGFN_SOURCE_DIR)
                                  + "/data/corpus.smi")
                     .molecules;
  std::mt19937_64 rng(9);
  auto choose = uniform_chooser(rng);
  MdpConfig cfg;
  cfg.max_traj_len = 200;
  for (std::size_t i = 0; i < records.size(); i += 10) {
    Trajectory t = deconstruct(records[i].graph, choose, cfg);
    ASSERT_TRUE(replays(t, cfg));
    EXPECT_EQ(canonical_key(t.last().graph), canonical_key(records[i].graph))
        << records[i].smiles;
  }
}

TEST(FrozenCoreTest, SeededRolloutsKeepScaffold) {
  const MolGraph benzene = parse_smiles("c1ccccc1");
  State s0 = seed_state(benzene);
  std::mt19937_64 rng(5);
  auto choose = uniform_chooser(rng);
  for (int i = 0; i < 200; ++i) {
    Trajectory t = rollout(s0, choose);
    const MolGraph &g = t.last().graph;
    ASSERT_GE(g.num_atoms(), 6);
    for (int v = 0; v < 6; ++v)
      EXPECT_EQ(g.atom(v), benzene.atom(v));
    for (const Bond &b: benzene.bonds()) {
      int k = g.find_bond(b.u, b.v);
      ASSERT_GE(k, 0);
      EXPECT_EQ(g.bond(k).order, b.order);
    }
    EXPECT_LE(t.length(), 40);
  }
}

TEST(FrozenCoreTest, DeconstructToSeed) {
  // Toluene with the ring as a frozen prefix.
  const MolGraph tol = parse_smiles("c1ccccc1C");
  std::mt19937_64 rng(2);
  Trajectory t = deconstruct(tol, uniform_chooser(rng), {}, 6);
  EXPECT_EQ(t.states.front().frozen, 6);
  EXPECT_TRUE(replays(t));
  ASSERT_EQ(t.length(), 3);  // AddNode, SetEdgeAttr, Stop
  EXPECT_EQ(canonical_key(t.last().graph), canonical_key(tol));
}

}  // namespace
}  // namespace agfn
