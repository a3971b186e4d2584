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

// Seeded generators for trees, ensembles and sample batches, used by the
// self-test and the property suites.
//
// Thresholds and sample values share a 0.1 grid so that samples regularly
// land exactly on a threshold and exercise the tie rule.

#ifndef FASTTREESHAP_RANDOM_TREE_HPP_
#define FASTTREESHAP_RANDOM_TREE_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "fasttreeshap/model.hpp"

namespace fasttreeshap::random {

using Rng = std::mt19937_64;

struct TreeOptions {
  int num_features = 5;
  int max_depth = 4;
  // Chance that a non-root node above max_depth becomes a leaf.
  double leaf_probability = 0.3;
  // Complete tree of depth max_depth with every threshold 0.5.
  bool balanced = false;
};

namespace detail {

inline double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline int AddNode(TreeModel& tree, double cover) {
  tree.values.push_back(0.0);
  tree.left.push_back(kNoChild);
  tree.right.push_back(kNoChild);
  tree.thresholds.push_back(0.0);
  tree.covers.push_back(cover);
  tree.features.push_back(kNoChild);
  return static_cast<int>(tree.values.size()) - 1;
}

inline void Grow(Rng& rng, const TreeOptions& opt, TreeModel& tree, int node,
                 int depth) {
  const bool leaf =
      depth == opt.max_depth ||
      (!opt.balanced && depth > 0 && Uniform(rng, 0.0, 1.0) < opt.leaf_probability);
  if (leaf) {
    tree.values[node] = Uniform(rng, -5.0, 5.0);
    return;
  }
  tree.features[node] = UniformInt(rng, 0, opt.num_features - 1);
  tree.thresholds[node] = opt.balanced ? 0.5 : UniformInt(rng, 1, 9) / 10.0;
  const double cover = tree.covers[node];
  const double split = Uniform(rng, 0.05, 0.95);
  const double left_cover = cover * split;
  const int a = AddNode(tree, left_cover);
  const int b = AddNode(tree, cover - left_cover);
  tree.left[node] = a;
  tree.right[node] = b;
  Grow(rng, opt, tree, a, depth + 1);
  Grow(rng, opt, tree, b, depth + 1);
}

}  // namespace detail

// A random tree. Features are drawn with replacement at every split, so
// paths often repeat a feature.
inline TreeModel RandomTree(Rng& rng, const TreeOptions& opt) {
  TreeModel tree;
  detail::AddNode(tree, detail::Uniform(rng, 10.0, 1000.0));
  detail::Grow(rng, opt, tree, 0, 0);
  const auto shape = fasttreeshap::detail::MeasureTree(tree);
  tree.max_depth = shape.max_depth;
  tree.num_leaves = shape.num_leaves;
  return tree;
}

inline Ensemble RandomEnsemble(Rng& rng, int num_trees, const TreeOptions& opt) {
  Ensemble e;
  e.num_features = opt.num_features;
  for (int t = 0; t < num_trees; ++t) e.trees.push_back(RandomTree(rng, opt));
  RefreshStats(e);
  return e;
}

// Rows of values on the 0.0..1.0 grid in steps of 0.1, or uniform in [0, 1)
// when `grid` is false.
inline SampleBatch RandomSamples(Rng& rng, std::size_t rows, int cols,
                                 bool grid = true) {
  std::vector<double> data(rows * static_cast<std::size_t>(cols));
  for (auto& v : data) {
    v = grid ? detail::UniformInt(rng, 0, 10) / 10.0
             : detail::Uniform(rng, 0.0, 1.0);
  }
  return SampleBatch(rows, static_cast<std::size_t>(cols), std::move(data));
}

}  // namespace fasttreeshap::random

#endif  // FASTTREESHAP_RANDOM_TREE_HPP_
