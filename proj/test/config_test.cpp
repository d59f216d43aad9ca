//
// Project agfn - Copyright 2026 The agfn Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "agfn/config.hpp"

#include <string>

#include <gtest/gtest.h>

namespace agfn {
namespace {

const std::string kSource = AGFN_SOURCE_DIR;

TEST(ConfigTest, DefaultsMatchPublishedHyperparameters) {
  RunConfig c = default_config();
  EXPECT_EQ(c.training.random_seed, 1428570u);
  EXPECT_EQ(c.training.beta, 96);
  EXPECT_EQ(c.training.gfn_loss_coeff, 0.04);
  EXPECT_EQ(c.training.mle_coeff, 20);
  EXPECT_EQ(c.training.learning_rate, 1e-4);
  EXPECT_EQ(c.training.z_learning_rate, 1e-3);
  EXPECT_EQ(c.training.lr_decay, 20000);
  EXPECT_EQ(c.training.clip_grad_param, 10);
  EXPECT_EQ(c.training.illegal_action_logreward, -512);
  EXPECT_EQ(c.mdp.max_traj_len, 40);
  EXPECT_EQ(c.mdp.limits.max_nodes, 45);
  EXPECT_EQ(c.mdp.limits.max_edges, 50);
  EXPECT_EQ(c.num_back_steps_max, 25);
  EXPECT_EQ(c.num_thermometer_dim, 16);
  ASSERT_EQ(c.conditionals.slots.size(), 4u);
  EXPECT_EQ(c.encoding_width(), 140);
}

TEST(ConfigTest, RoundTrip) {
  RunConfig c = default_config();
  c.model.num_layers = 5;
  c.training.learning_rate = 0.1 + 0.2;  // not exactly representable
  c.mdp.element_mask = 0b10011;
  c.data.score_tables = { { "dock", "/tmp/dock.tsv" }, { "tox", "t.tsv" } };
  c.task.slots = internal::parse_property_list("MolWt,dock");
  c.task.score_table = "dock";
  c.conditionals.slots[2].cond.c_high = 2.5;
  const std::string text = write_config(c);
  RunConfig back = parse_config_string(text);
  EXPECT_EQ(write_config(back), text);
  EXPECT_EQ(back.training.learning_rate, 0.1 + 0.2);
  EXPECT_EQ(back.model.num_layers, 5);
  EXPECT_EQ(back.mdp.element_mask, 0b10011u);
  EXPECT_EQ(back.data.score_tables[1].second, "t.tsv");
  EXPECT_EQ(back.task.slots[1].cond.property.kind, PropertyKind::External);
  EXPECT_EQ(back.conditionals.slots[2].cond.c_high, 2.5);
}

TEST(ConfigTest, PropertyKeysBeforeTheirList) {
  RunConfig c = parse_config_string("conditionals.MolWt.c_low = 55\n"
                                    "conditionals.properties = MolWt\n"
                                    "conditionals.MolWt.c_high = 65  # x\n");
  ASSERT_EQ(c.conditionals.slots.size(), 1u);
  EXPECT_EQ(c.conditionals.slots[0].cond.c_low, 55);
  EXPECT_EQ(c.conditionals.slots[0].cond.c_high, 65);
  EXPECT_EQ(c.conditionals.slots[0].cond.d, -1);
}

TEST(ConfigTest, Rejections) {
  EXPECT_THROW(parse_config_string("model.bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_config_string("model.num_layers 3\n"), ConfigError);
  EXPECT_THROW(parse_config_string("model.num_layers = x\n"), ConfigError);
  EXPECT_THROW(parse_config_string("model.num_layers = 1\n"
                                   "model.num_layers = 2\n"),
               ConfigError);
  EXPECT_THROW(parse_config_string("training.online_offline_mix_ratio = 2\n"),
               ConfigError);
  EXPECT_THROW(parse_config_string("training.beta = 0\n"), ConfigError);
  EXPECT_THROW(parse_config_string("conditionals.reward_aggregation = sum\n"),
               ConfigError);
  EXPECT_THROW(parse_config_string("training.bootstrap_own_reward = true\n"),
               ConfigError);
  EXPECT_THROW(parse_config_string("mdp.elements = C,Xe\n"), ConfigError);
  EXPECT_THROW(parse_config_string("conditionals.TPSA.c_low = 200\n"),
               ConfigError);
  EXPECT_THROW(parse_config_string("conditionals.properties = QED,QED\n"),
               ConfigError);
  EXPECT_THROW(parse_config_string("task.score_table = dock\n"), ConfigError);
  EXPECT_THROW(parse_config_string("model.num_emb = 30\n"
                                   "model.num_heads = 4\n"),
               ConfigError);
  EXPECT_THROW(load_config("/nonexistent.cfg"), ConfigError);
}

TEST(ConfigTest, HashCoversShapesOnly) {
  RunConfig a = default_config();
  RunConfig b = a;
  b.training.learning_rate = 1;
  b.io.log_path = "elsewhere";
  b.conditionals.slots[0].cond.c_low = 0.1;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.model.num_emb = 64;
  EXPECT_NE(config_hash(a), config_hash(b));
  RunConfig c = a;
  c.conditionals.slots.pop_back();
  EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(ConfigTest, BundledConfigsLoad) {
  RunConfig desk = load_config(kSource + "/configs/desk.cfg");
  EXPECT_EQ(desk.model.num_emb, 32);
  RunConfig toy = load_config(kSource + "/configs/toy.cfg");
  EXPECT_EQ(toy.mdp.limits.max_nodes, 3);
  EXPECT_FALSE(toy.mdp.element_allowed(element_index(Element::N)));
  EXPECT_TRUE(toy.mdp.element_allowed(element_index(Element::O)));
  EXPECT_FALSE(toy.conditionals.sample);
}

}  // namespace
}  // namespace agfn
