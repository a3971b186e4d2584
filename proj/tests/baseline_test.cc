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

#include "fasttreeshap/baseline.hpp"

#include <vector>

#include "fasttreeshap/counters.hpp"
#include "fasttreeshap/oracle.hpp"
#include "fasttreeshap/random_tree.hpp"
#include "gtest/gtest.h"
#include "test_trees.hpp"

namespace fasttreeshap::baseline {
namespace {

using testing::DuplicateTree;
using testing::T1;
using testing::T2;

std::vector<double> Shap(const TreeModel& tree, std::vector<double> x) {
  std::vector<double> phi(x.size(), 0.0);
  ShapOriginal(x, tree, phi);
  return phi;
}

TEST(ShapOriginalTest, Fixtures) {
  EXPECT_NEAR(Shap(T1(), {0.2})[0], -0.8, 1e-12);
  EXPECT_NEAR(Shap(T1(), {0.9})[0], 1.2, 1e-12);
  const auto phi = Shap(T2(), {0.3, 0.7});
  EXPECT_NEAR(phi[0], -3.5, 1e-12);
  EXPECT_NEAR(phi[1], 1.5, 1e-12);
}

TEST(ShapOriginalTest, DuplicateFeatureMatchesBruteForce) {
  for (auto x : {std::vector<double>{0.1, 0.3}, {0.3, 0.3}, {0.3, 0.9},
                 {0.9, 0.1}, {0.2, 0.5}, {0.5, 0.5}}) {
    const auto expected = oracle::ShapBruteForce(x, DuplicateTree(), 2);
    const auto phi = Shap(DuplicateTree(), x);
    EXPECT_NEAR(phi[0], expected.phi[0], 1e-12);
    EXPECT_NEAR(phi[1], expected.phi[1], 1e-12);
  }
}

TEST(ShapOriginalTest, AccumulatesIntoPhi) {
  std::vector<double> phi{1.0};
  const std::vector<double> x{0.2};
  ShapOriginal(x, T1(), phi);
  EXPECT_NEAR(phi[0], 0.2, 1e-12);
}

TEST(ShapOriginalTest, RandomTreesMatchBruteForce) {
  random::Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    random::TreeOptions opt;
    opt.num_features = 1 + trial % 10;
    opt.max_depth = 1 + trial % 5;
    const TreeModel tree = random::RandomTree(rng, opt);
    const SampleBatch batch = random::RandomSamples(rng, 5, opt.num_features);
    std::vector<PathElement> buffer;
    NoCounters counters;
    for (std::size_t i = 0; i < batch.rows(); ++i) {
      std::vector<double> phi(opt.num_features, 0.0);
      ShapOriginal(batch.row(i), tree, phi, buffer, counters);
      const auto expected = oracle::ShapBruteForce(batch.row(i), tree,
                                                   opt.num_features);
      for (int f = 0; f < opt.num_features; ++f) {
        EXPECT_NEAR(phi[f], expected.phi[f], 1e-10);
      }
    }
  }
}

TEST(ShapOriginalTest, OneLeafUnwindPerPathFeature) {
  WorkCounters counters;
  std::vector<double> phi(2, 0.0);
  std::vector<PathElement> buffer;
  ShapOriginal(std::vector<double>{0.3, 0.7}, T2(), phi, buffer, counters);
  // Leaf 3 and leaf 4 have two path features, leaf 2 has one.
  EXPECT_EQ(counters.leaf_unwinds, 5u);
}

TEST(PathBufferSizeTest, HoldsAllLevels) {
  EXPECT_EQ(PathBufferSize(0), 3u);
  EXPECT_EQ(PathBufferSize(3), 15u);
}

}  // namespace
}  // namespace fasttreeshap::baseline
