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

// Seeded cross-check of every evaluator against the brute-force Shapley
// sum on small random trees.

#ifndef FASTTREESHAP_SELFTEST_HPP_
#define FASTTREESHAP_SELFTEST_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fasttreeshap/baseline.hpp"
#include "fasttreeshap/counters.hpp"
#include "fasttreeshap/fastv1.hpp"
#include "fasttreeshap/fastv2.hpp"
#include "fasttreeshap/oracle.hpp"
#include "fasttreeshap/random_tree.hpp"

namespace fasttreeshap::selftest {

inline constexpr double kGate = 1e-10;

struct Options {
  std::uint64_t seed = 7;
  int trees = 500;
  int samples_per_tree = 20;
  int max_features = 10;
  int max_depth = 5;
};

enum Evaluator { kPathSubsets, kThresholdSubsets, kOriginal, kV1, kV2, kCount };

inline constexpr std::array<const char*, kCount> kEvaluatorNames = {
    "path-subsets", "threshold-subsets", "original", "v1", "v2"};

struct Report {
  int trees = 0;
  std::uint64_t cases = 0;  // (tree, sample) pairs
  int trees_with_repeated_features = 0;
  // Largest |phi - brute force| per evaluator.
  std::array<double, kCount> max_deviation{};
  // Largest |sum(phi) + base - prediction| over all evaluators, brute force
  // included.
  double max_local_accuracy_error = 0.0;
  std::uint64_t full_subset_reads = 0;

  double worst() const {
    return *std::max_element(max_deviation.begin(), max_deviation.end());
  }
  bool passed(double gate = kGate) const {
    return worst() <= gate && max_local_accuracy_error <= gate &&
           full_subset_reads == 0;
  }
};

inline bool HasRepeatedFeature(const TreeModel& tree) {
  for (const auto& p : oracle::EnumeratePaths(tree)) {
    if (p.unique_features.size() < p.node_features.size()) return true;
  }
  return false;
}

inline Report Run(const Options& opt = {}) {
  random::Rng rng(opt.seed);
  Report report;
  std::vector<baseline::PathElement> buffer;
  fastv1::Workspace v1_ws;
  fastv2::ScoreWorkspace v2_ws;
  NoCounters none;
  WorkCounters counters;
  for (int t = 0; t < opt.trees; ++t) {
    random::TreeOptions tree_opt;
    tree_opt.num_features = 1 + t % opt.max_features;
    tree_opt.max_depth = 1 + (t / opt.max_features) % opt.max_depth;
    const int n = tree_opt.num_features;
    const TreeModel tree = random::RandomTree(rng, tree_opt);
    if (HasRepeatedFeature(tree)) ++report.trees_with_repeated_features;
    const fastv2::PrepTable table = fastv2::Prep(tree);
    const SampleBatch batch =
        random::RandomSamples(rng, opt.samples_per_tree, n, t % 2 == 0);
    for (std::size_t i = 0; i < batch.rows(); ++i) {
      const auto x = batch.row(i);
      const oracle::ShapResult brute = oracle::ShapBruteForce(x, tree, n);
      std::array<std::vector<double>, kCount> phi;
      phi[kPathSubsets] = oracle::ShapPathSubsets(x, tree, n).phi;
      phi[kThresholdSubsets] = oracle::ShapThresholdSubsets(x, tree, n).phi;
      for (int k : {kOriginal, kV1, kV2}) phi[k].assign(n, 0.0);
      baseline::ShapOriginal(x, tree, phi[kOriginal], buffer, none);
      fastv1::ShapV1(x, tree, phi[kV1], v1_ws, none);
      fastv2::Score(x, tree, table, phi[kV2], v2_ws, counters);
      const double prediction = PredictTree(tree, x);
      double brute_total = brute.base;
      for (double v : brute.phi) brute_total += v;
      report.max_local_accuracy_error = std::max(
          report.max_local_accuracy_error, std::abs(brute_total - prediction));
      for (int k = 0; k < kCount; ++k) {
        double total = brute.base;
        for (int f = 0; f < n; ++f) {
          report.max_deviation[k] = std::max(
              report.max_deviation[k], std::abs(phi[k][f] - brute.phi[f]));
          total += phi[k][f];
        }
        report.max_local_accuracy_error =
            std::max(report.max_local_accuracy_error,
                     std::abs(total - prediction));
      }
      ++report.cases;
    }
    ++report.trees;
  }
  report.full_subset_reads = counters.full_subset_reads;
  return report;
}

}  // namespace fasttreeshap::selftest

#endif  // FASTTREESHAP_SELFTEST_HPP_
