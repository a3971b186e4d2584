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

// Small hand-built trees shared by the test suites.

#ifndef FASTTREESHAP_TESTS_TEST_TREES_HPP_
#define FASTTREESHAP_TESTS_TEST_TREES_HPP_

#include <string>
#include <vector>

#include "fasttreeshap/model.hpp"

namespace fasttreeshap::testing {

inline TreeModel MakeTree(std::vector<int> left, std::vector<int> right,
                          std::vector<int> features,
                          std::vector<double> thresholds,
                          std::vector<double> covers,
                          std::vector<double> values) {
  TreeModel t{std::move(values), std::move(left),     std::move(right),
              std::move(thresholds), std::move(covers), std::move(features)};
  const auto shape = detail::MeasureTree(t);
  t.max_depth = shape.max_depth;
  t.num_leaves = shape.num_leaves;
  return t;
}

inline Ensemble MakeEnsemble(std::vector<TreeModel> trees, int num_features,
                             double base_offset = 0.0) {
  Ensemble e;
  e.trees = std::move(trees);
  e.num_features = num_features;
  e.base_offset = base_offset;
  RefreshStats(e);
  return e;
}

// Stump on feature 0 at 0.5: left leaf 1.0 (cover 6), right leaf 3.0
// (cover 4).
inline TreeModel T1() {
  return MakeTree({1, -1, -1}, {2, -1, -1}, {0, -1, -1}, {0.5, 0, 0},
                  {10, 6, 4}, {0, 1.0, 3.0});
}

// Root on feature 0 at 0.5 (cover 8). Left child node 1 splits feature 1 at
// 0.5 (cover 4) into leaf 3 (0, cover 2) and leaf 4 (4, cover 2). Right
// child is leaf 2 (10, cover 4).
inline TreeModel T2() {
  return MakeTree({1, 3, -1, -1, -1}, {2, 4, -1, -1, -1}, {0, 1, -1, -1, -1},
                  {0.5, 0.5, 0, 0, 0}, {8, 4, 4, 2, 2}, {0, 0, 10, 0, 4});
}

// Feature 0 is split at the root and again two levels down.
//   0: f0 <= 0.5 (10) -> 1, 2
//   1: f1 <= 0.5 (6)  -> 3, 4
//   2: leaf 4.0 (4)
//   3: f0 <= 0.2 (4)  -> 5, 6
//   4: leaf 3.0 (2)
//   5: leaf 1.0 (1)
//   6: leaf 2.0 (3)
inline TreeModel DuplicateTree() {
  return MakeTree({1, 3, -1, 5, -1, -1, -1}, {2, 4, -1, 6, -1, -1, -1},
                  {0, 1, -1, 0, -1, -1, -1}, {0.5, 0.5, 0, 0.2, 0, 0, 0},
                  {10, 6, 4, 4, 2, 1, 3}, {0, 0, 4.0, 0, 3.0, 1.0, 2.0});
}

inline TreeModel Leaf(double value) {
  return MakeTree({-1}, {-1}, {-1}, {0}, {1}, {value});
}

inline std::string DataPath(const std::string& name) {
  return std::string(FTS_TEST_DATA_DIR) + "/" + name;
}

}  // namespace fasttreeshap::testing

#endif  // FASTTREESHAP_TESTS_TEST_TREES_HPP_
