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

#include "fasttreeshap/bench.hpp"

#include <string>
#include <vector>

#include "fasttreeshap/random_tree.hpp"
#include "gtest/gtest.h"
#include "test_trees.hpp"

namespace fasttreeshap::bench {
namespace {

using testing::MakeEnsemble;
using testing::T2;

TEST(SummarizeTest, MeanAndSampleSd) {
  const TimingStats s = Summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.sd, 1.2909944487358056, 1e-15);
  EXPECT_EQ(Summarize({3.0}).sd, 0.0);
  EXPECT_EQ(Summarize({}).mean, 0.0);
}

TEST(RunBenchTest, ReportStructure) {
  random::Rng rng(5);
  const Ensemble e =
      random::RandomEnsemble(rng, 4, {.num_features = 6, .max_depth = 5});
  const SampleBatch batch = random::RandomSamples(rng, 30, 6);
  const BenchReport r = RunBench(e, batch, {.repeats = 5});
  ASSERT_TRUE(r.original && r.v1 && r.v2_prep && r.v2_score && r.v2_total);
  EXPECT_EQ(r.original->runs.size(), 5u);
  EXPECT_EQ(r.v2_score->runs.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_DOUBLE_EQ(r.v2_total->runs[k],
                     r.v2_prep->runs[k] + r.v2_score->runs[k]);
  }
  EXPECT_LE(r.max_deviation, 1e-10);
  EXPECT_EQ(r.samples, 30u);
  EXPECT_EQ(r.trees, 4u);
  EXPECT_TRUE(r.Speedup(r.v1).has_value());
  EXPECT_NE(FormatReport(r).find("v2 score"), std::string::npos);
}

TEST(RunBenchTest, SubsetOfAlgorithms) {
  const Ensemble e = MakeEnsemble({T2()}, 2);
  const BenchReport r = RunBench(e, SampleBatch(2, 2, {0.3, 0.7, 0.9, 0.1}),
                                 {.original = false, .v2 = false, .repeats = 2});
  EXPECT_FALSE(r.original.has_value());
  EXPECT_TRUE(r.v1.has_value());
  EXPECT_FALSE(r.v2_score.has_value());
  EXPECT_FALSE(r.Speedup(r.v1).has_value());
}

TEST(BenchReportJsonTest, RoundTrip) {
  BenchReport r;
  r.samples = 10;
  r.trees = 3;
  r.max_depth = 4;
  r.repeats = 2;
  r.original = Summarize({0.5, 0.25});
  r.v1 = Summarize({0.125, 0.0625});
  r.max_deviation = 1e-14;
  r.machine_note = "test";
  const nlohmann::json j = r;
  EXPECT_EQ(j.at("speedup").at("v1").get<double>(), r.Speedup(r.v1).value());
  const BenchReport back = nlohmann::json::parse(j.dump()).get<BenchReport>();
  EXPECT_EQ(back, r);
}

TEST(IterationCountersTest, CountsMatchPathStructure) {
  const Ensemble e = MakeEnsemble({T2()}, 2);
  const SampleBatch batch(3, 2, {0.3, 0.7, 0.9, 0.1, 0.2, 0.2});
  const IterationReport r = IterationCounters(e, batch);
  EXPECT_EQ(r.path_feature_visits, 15u);
  EXPECT_EQ(r.original.leaf_unwinds, r.path_feature_visits);
  EXPECT_EQ(r.v2_score.table_lookups, r.path_feature_visits);
  EXPECT_EQ(r.v2_score.full_subset_reads, 0u);
  EXPECT_LE(r.v1.path_iterations(), r.original.path_iterations());
}

TEST(IterationCountersTest, BalancedRatioInRange) {
  random::Rng rng(9);
  const Ensemble e = random::RandomEnsemble(
      rng, 10, {.num_features = 20, .max_depth = 8, .balanced = true});
  const SampleBatch batch = random::RandomSamples(rng, 20, 20, false);
  const IterationReport r = IterationCounters(e, batch);
  EXPECT_GE(r.v1_ratio(), 0.2);
  EXPECT_LE(r.v1_ratio(), 0.6);
}

}  // namespace
}  // namespace fasttreeshap::bench
