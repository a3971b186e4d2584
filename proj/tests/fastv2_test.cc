/*
 * Copyright 2026 The FastTreeSHAP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fasttreeshap/fastv2.hpp"

#include <vector>

#include "fasttreeshap/counters.hpp"
#include "fasttreeshap/fastv1.hpp"
#include "fasttreeshap/oracle.hpp"
#include "fasttreeshap/random_tree.hpp"
#include "gtest/gtest.h"
#include "test_trees.hpp"

namespace fasttreeshap::fastv2 {
namespace {

using testing::DuplicateTree;
using testing::Leaf;
using testing::T1;
using testing::T2;

std::vector<double> Shap(const TreeModel& tree, std::vector<double> x) {
  std::vector<double> phi(x.size(), 0.0);
  Score(x, tree, Prep(tree), phi);
  return phi;
}

// Relabels an oracle mask (bits over first-occurrence order) into a table
// column (bits over `columns`).
std::size_t ToColumn(std::uint32_t mask, const oracle::PathDescriptor& path,
                     const std::vector<int>& columns) {
  std::size_t out = 0;
  for (std::size_t u = 0; u < path.unique_features.size(); ++u) {
    if (!((mask >> u) & 1u)) continue;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (columns[c] == path.unique_features[u]) out |= std::size_t{1} << c;
    }
  }
  return out;
}

// Every table row equals the oracle's subset weights for the same path.
void ExpectTableMatchesOracle(const TreeModel& tree) {
  const PrepTable table = Prep(tree);
  const auto paths = oracle::EnumeratePaths(tree);
  const auto columns = ColumnFeatures(tree);
  ASSERT_EQ(paths.size(), static_cast<std::size_t>(table.leaves));
  for (std::size_t c = 0; c < paths.size(); ++c) {
    const auto u = oracle::SubsetWeights(paths[c]);
    const std::size_t full = (std::size_t{1} << columns[c].size()) - 1;
    for (std::uint32_t mask = 0; mask < u.u.size(); ++mask) {
      EXPECT_NEAR(table.at(c, ToColumn(mask, paths[c], columns[c])), u.at(mask),
                  1e-12)
          << "leaf row " << c << " mask " << mask;
    }
    EXPECT_EQ(table.at(c, full), 0.0);
  }
}

TEST(PrepTest, StumpRows) {
  const PrepTable t = Prep(T1());
  EXPECT_EQ(t.depth, 1);
  EXPECT_EQ(t.leaves, 2);
  EXPECT_EQ(t.s, (std::vector<double>{1.0, 0.0, 1.0, 0.0}));
}

TEST(PrepTest, TwoLevelLeafRow) {
  const PrepTable t = Prep(T2());
  const auto row = t.row(1);  // leaf 4
  ASSERT_EQ(row.size(), 4u);
  EXPECT_NEAR(row[0], 0.5, 1e-15);
  EXPECT_NEAR(row[1], 0.75, 1e-15);
  EXPECT_NEAR(row[2], 0.75, 1e-15);
  EXPECT_EQ(row[3], 0.0);
}

TEST(PrepTest, SingleLeafTree) {
  const PrepTable t = Prep(Leaf(5.0));
  EXPECT_EQ(t.depth, 0);
  EXPECT_EQ(t.s, (std::vector<double>{0.0}));
  std::vector<double> phi{0.0};
  Score(std::vector<double>{1.0}, Leaf(5.0), t, phi);
  EXPECT_EQ(phi[0], 0.0);
}

TEST(PrepTest, DuplicateFeatureRowsMatchOracle) {
  ExpectTableMatchesOracle(DuplicateTree());
  const PrepTable t = Prep(DuplicateTree());
  EXPECT_EQ(t.duplicate_position[3], 1);
  EXPECT_EQ(t.duplicate_position[0], -1);
  EXPECT_EQ(t.duplicate_position[1], -1);
}

TEST(PrepTest, RandomTreesMatchOracle) {
  random::Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    random::TreeOptions opt;
    opt.num_features = 1 + trial % 6;
    opt.max_depth = 1 + trial % 6;
    ExpectTableMatchesOracle(random::RandomTree(rng, opt));
  }
}

TEST(PrepTest, RowsStartAtInverseFeatureCount) {
  random::Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const TreeModel tree = random::RandomTree(rng, {.num_features = 6});
    const PrepTable t = Prep(tree);
    const auto columns = ColumnFeatures(tree);
    for (int c = 0; c < t.leaves; ++c) {
      if (columns[c].empty()) continue;
      EXPECT_NEAR(t.at(c, 0), 1.0 / columns[c].size(), 1e-12);
    }
    for (double v : t.s) EXPECT_GE(v, 0.0);
  }
}

TEST(PrepTest, Deterministic) {
  random::Rng rng(45);
  const TreeModel tree = random::RandomTree(rng, {.max_depth = 5});
  EXPECT_EQ(Prep(tree), Prep(tree));
}

TEST(PrepTest, BudgetExceeded) {
  try {
    Prep(T2(), 16);
    FAIL() << "expected BudgetError";
  } catch (const BudgetError& err) {
    EXPECT_NE(std::string(err.what()).find("v1"), std::string::npos);
  }
  EXPECT_NO_THROW(Prep(T2(), TableBytes(T2())));
}

TEST(ScoreTest, Fixtures) {
  EXPECT_NEAR(Shap(T1(), {0.2})[0], -0.8, 1e-12);
  EXPECT_NEAR(Shap(T1(), {0.9})[0], 1.2, 1e-12);
  const auto phi = Shap(T2(), {0.3, 0.7});
  EXPECT_NEAR(phi[0], -3.5, 1e-12);
  EXPECT_NEAR(phi[1], 1.5, 1e-12);
}

TEST(ScoreTest, ZeroLeavesLeavePhiUnchanged) {
  TreeModel tree = T2();
  for (auto& v : tree.values) v = 0.0;
  std::vector<double> phi{0.25, -1.0};
  Score(std::vector<double>{0.3, 0.7}, tree, Prep(tree), phi);
  EXPECT_EQ(phi, (std::vector<double>{0.25, -1.0}));
}

TEST(ScoreTest, MismatchedTableRejected) {
  std::vector<double> phi(2, 0.0);
  EXPECT_THROW(Score(std::vector<double>{0.3, 0.7}, T2(), Prep(T1()), phi),
               CacheError);
}

TEST(ScoreTest, RandomTreesMatchV1AndBruteForce) {
  random::Rng rng(47);
  ScoreWorkspace ws;
  WorkCounters counters;
  for (int trial = 0; trial < 200; ++trial) {
    random::TreeOptions opt;
    opt.num_features = 1 + trial % 10;
    opt.max_depth = 1 + trial % 5;
    const TreeModel tree = random::RandomTree(rng, opt);
    const PrepTable table = Prep(tree);
    const SampleBatch batch = random::RandomSamples(rng, 5, opt.num_features);
    for (std::size_t i = 0; i < batch.rows(); ++i) {
      std::vector<double> phi(opt.num_features, 0.0);
      std::vector<double> v1(opt.num_features, 0.0);
      Score(batch.row(i), tree, table, phi, ws, counters);
      fastv1::ShapV1(batch.row(i), tree, v1);
      const auto expected =
          oracle::ShapBruteForce(batch.row(i), tree, opt.num_features);
      for (int f = 0; f < opt.num_features; ++f) {
        EXPECT_NEAR(phi[f], v1[f], 1e-12);
        EXPECT_NEAR(phi[f], expected.phi[f], 1e-10);
      }
    }
  }
  EXPECT_EQ(counters.full_subset_reads, 0u);
}

TEST(ScoreTest, OneLookupPerPathFeature) {
  WorkCounters counters;
  ScoreWorkspace ws;
  std::vector<double> phi(2, 0.0);
  Score(std::vector<double>{0.3, 0.7}, T2(), Prep(T2()), phi, ws, counters);
  EXPECT_EQ(counters.table_lookups, 5u);
  EXPECT_EQ(counters.extend_iterations + counters.unwind_iterations, 0u);
}

TEST(ColumnFeaturesTest, DuplicateMovesToEnd) {
  const auto columns = ColumnFeatures(DuplicateTree());
  ASSERT_EQ(columns.size(), 4u);
  EXPECT_EQ(columns[0], (std::vector<int>{1, 0}));
  EXPECT_EQ(columns[2], (std::vector<int>{0, 1}));
  EXPECT_EQ(columns[3], (std::vector<int>{0}));
}

}  // namespace
}  // namespace fasttreeshap::fastv2
