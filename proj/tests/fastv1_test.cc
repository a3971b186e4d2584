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

#include "fasttreeshap/fastv1.hpp"

#include <vector>

#include "fasttreeshap/baseline.hpp"
#include "fasttreeshap/counters.hpp"
#include "fasttreeshap/oracle.hpp"
#include "fasttreeshap/random_tree.hpp"
#include "gtest/gtest.h"
#include "test_trees.hpp"

namespace fasttreeshap::fastv1 {
namespace {

using testing::DuplicateTree;
using testing::T1;
using testing::T2;

double Sum(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v;
  return s;
}

V1PathState Root() { return V1Extend({}, 1.0, true, -1); }

TEST(V1ExtendTest, FirstRecordSeedsWeights) {
  const V1PathState s = Root();
  ASSERT_EQ(s.m.size(), 1u);
  ASSERT_EQ(s.w.size(), 1u);
  EXPECT_EQ(s.w[0], 1.0);
  EXPECT_EQ(s.q, 1.0);
}

TEST(V1ExtendTest, FailedFeatureOnlyScalesQ) {
  const V1PathState s = V1Extend(Root(), 0.5, false, 0);
  EXPECT_EQ(s.q, 0.5);
  EXPECT_EQ(s.w.size(), 1u);
  EXPECT_EQ(s.m.size(), 2u);
}

TEST(V1UnwindTest, ReweightedSumAtFailedLeaf) {
  // T2 leaf 2: feature 0 fails with ratio 0.5.
  const V1PathState s = V1Extend(Root(), 0.5, false, 0);
  EXPECT_EQ(s.q, 0.5);
  EXPECT_NEAR(Sum(V1UnwindReweighted(s)), 1.0, 1e-15);
}

TEST(V1UnwindTest, UnwoundSumAtSatisfiedLeaf) {
  // T2 leaf 4: both features satisfied, ratios 0.5 and 0.5.
  const V1PathState s =
      V1Extend(V1Extend(Root(), 0.5, true, 0), 0.5, true, 1);
  EXPECT_NEAR(Sum(V1Unwind(s, 1).w), 0.75, 1e-15);
  EXPECT_NEAR(Sum(V1Unwind(s, 2).w), 0.75, 1e-15);
}

TEST(V1UnwindTest, InversePairOnRandomStates) {
  random::Rng rng(99);
  std::uniform_real_distribution<double> ratio(0.05, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> length(0, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    V1PathState s = Root();
    const int n = length(rng);
    for (int k = 0; k < n; ++k) s = V1Extend(s, ratio(rng), coin(rng), k);
    const V1PathState extended = V1Extend(s, ratio(rng), coin(rng), n);
    const V1PathState back =
        V1Unwind(extended, static_cast<int>(extended.m.size()) - 1);
    ASSERT_EQ(back.m, s.m);
    ASSERT_EQ(back.w.size(), s.w.size());
    for (std::size_t j = 0; j < s.w.size(); ++j) {
      EXPECT_NEAR(back.w[j], s.w[j], 1e-12);
    }
    EXPECT_NEAR(back.q, s.q, 1e-12);
  }
}

TEST(V1UnwindTest, MiddleRecordUnwindMatchesFreshBuild) {
  // Removing a record from the middle equals never having added it.
  random::Rng rng(7);
  std::uniform_real_distribution<double> ratio(0.05, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<PathRecord> records;
    for (int k = 0; k < 6; ++k) records.push_back({k, ratio(rng), coin(rng)});
    const int drop = 1 + trial % 6;
    V1PathState full = Root();
    V1PathState without = Root();
    for (int k = 0; k < 6; ++k) {
      const auto& r = records[k];
      full = V1Extend(full, r.zero_fraction, r.one, r.feature);
      if (k + 1 != drop) {
        without = V1Extend(without, r.zero_fraction, r.one, r.feature);
      }
    }
    const V1PathState back = V1Unwind(full, drop);
    ASSERT_EQ(back.m, without.m);
    ASSERT_EQ(back.w.size(), without.w.size());
    for (std::size_t j = 0; j < back.w.size(); ++j) {
      EXPECT_NEAR(back.w[j], without.w[j], 1e-12);
    }
    EXPECT_NEAR(back.q, without.q, 1e-12);
  }
}

std::vector<double> Shap(const TreeModel& tree, std::vector<double> x) {
  std::vector<double> phi(x.size(), 0.0);
  ShapV1(x, tree, phi);
  return phi;
}

TEST(ShapV1Test, Fixtures) {
  EXPECT_NEAR(Shap(T1(), {0.2})[0], -0.8, 1e-12);
  EXPECT_NEAR(Shap(T1(), {0.9})[0], 1.2, 1e-12);
  const auto phi = Shap(T2(), {0.3, 0.7});
  EXPECT_NEAR(phi[0], -3.5, 1e-12);
  EXPECT_NEAR(phi[1], 1.5, 1e-12);
}

TEST(ShapV1Test, DuplicateFeatureMatchesBruteForce) {
  for (auto x : {std::vector<double>{0.1, 0.3}, {0.3, 0.3}, {0.3, 0.9},
                 {0.9, 0.1}, {0.2, 0.5}, {0.5, 0.5}}) {
    const auto expected = oracle::ShapBruteForce(x, DuplicateTree(), 2);
    const auto phi = Shap(DuplicateTree(), x);
    EXPECT_NEAR(phi[0], expected.phi[0], 1e-12);
    EXPECT_NEAR(phi[1], expected.phi[1], 1e-12);
  }
}

TEST(ShapV1Test, RandomTreesMatchOriginalAndBruteForce) {
  random::Rng rng(23);
  Workspace ws;
  NoCounters counters;
  for (int trial = 0; trial < 200; ++trial) {
    random::TreeOptions opt;
    opt.num_features = 1 + trial % 10;
    opt.max_depth = 1 + trial % 5;
    const TreeModel tree = random::RandomTree(rng, opt);
    const SampleBatch batch = random::RandomSamples(rng, 5, opt.num_features);
    for (std::size_t i = 0; i < batch.rows(); ++i) {
      std::vector<double> phi(opt.num_features, 0.0);
      std::vector<double> base(opt.num_features, 0.0);
      ShapV1(batch.row(i), tree, phi, ws, counters);
      baseline::ShapOriginal(batch.row(i), tree, base);
      const auto expected =
          oracle::ShapBruteForce(batch.row(i), tree, opt.num_features);
      for (int f = 0; f < opt.num_features; ++f) {
        EXPECT_NEAR(phi[f], base[f], 1e-12);
        EXPECT_NEAR(phi[f], expected.phi[f], 1e-10);
      }
    }
  }
}

TEST(ShapV1Test, AllSatisfyingSampleMatchesOriginalExactly) {
  // A stump chain where x satisfies every threshold on its own path.
  const TreeModel tree = T2();
  const std::vector<double> x{0.3, 0.3};
  std::vector<double> fast(2, 0.0), slow(2, 0.0);
  ShapV1(x, tree, fast);
  baseline::ShapOriginal(x, tree, slow);
  EXPECT_NEAR(fast[0], slow[0], 1e-12);
  EXPECT_NEAR(fast[1], slow[1], 1e-12);
}

TEST(ShapV1Test, DoesLessPathWorkThanOriginal) {
  random::Rng rng(31);
  WorkCounters v1_counts, base_counts;
  Workspace ws;
  std::vector<baseline::PathElement> buffer;
  for (int trial = 0; trial < 20; ++trial) {
    const TreeModel tree = random::RandomTree(
        rng, {.num_features = 10, .max_depth = 8, .balanced = true});
    const SampleBatch batch = random::RandomSamples(rng, 10, 10, false);
    std::vector<double> phi(10, 0.0);
    for (std::size_t i = 0; i < batch.rows(); ++i) {
      ShapV1(batch.row(i), tree, phi, ws, v1_counts);
      baseline::ShapOriginal(batch.row(i), tree, phi, buffer, base_counts);
    }
  }
  EXPECT_LT(v1_counts.path_iterations(), base_counts.path_iterations());
}

}  // namespace
}  // namespace fasttreeshap::fastv1
