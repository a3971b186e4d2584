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

// The original polynomial-time TreeSHAP recursion. Every split feature on
// the path is EXTENDed into the subset-size weight sequence whether or not
// the sample satisfies its threshold, and every path feature is UNWOUND at
// each leaf.

#ifndef FASTTREESHAP_BASELINE_HPP_
#define FASTTREESHAP_BASELINE_HPP_

#include <algorithm>
#include <span>
#include <vector>

#include "fasttreeshap/counters.hpp"
#include "fasttreeshap/model.hpp"

namespace fasttreeshap::baseline {

// One entry of the unique-feature path. Position 0 is a dummy entry.
struct PathElement {
  int feature = -1;
  double zero_fraction = 1.0;  // covering ratio
  double one_fraction = 1.0;   // threshold indicator
  double weight = 0.0;         // weight of subset size == position
};

namespace detail {

// Appends (feature, z, o) to the `length`-element path and updates weights.
template <class Counters>
void Extend(PathElement* path, int length, double zero_fraction,
            double one_fraction, int feature, Counters& counters) {
  path[length] = {feature, zero_fraction, one_fraction,
                  length == 0 ? 1.0 : 0.0};
  for (int i = length - 1; i >= 0; --i) {
    path[i + 1].weight += one_fraction * path[i].weight * (i + 1) / (length + 1);
    path[i].weight = zero_fraction * path[i].weight * (length - i) / (length + 1);
    counters.extend_step();
  }
}

// Removes element `index` from a path whose last index is `last`.
template <class Counters>
void Unwind(PathElement* path, int last, int index, Counters& counters) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  double next_one_portion = path[last].weight;
  for (int j = last - 1; j >= 0; --j) {
    if (one_fraction != 0) {
      const double tmp = path[j].weight;
      path[j].weight = next_one_portion * (last + 1) / ((j + 1) * one_fraction);
      next_one_portion =
          tmp - path[j].weight * zero_fraction * (last - j) / (last + 1);
    } else {
      path[j].weight = path[j].weight * (last + 1) / (zero_fraction * (last - j));
    }
    counters.unwind_step();
  }
  for (int j = index; j < last; ++j) {
    path[j].feature = path[j + 1].feature;
    path[j].zero_fraction = path[j + 1].zero_fraction;
    path[j].one_fraction = path[j + 1].one_fraction;
  }
}

// Sum of the weights that Unwind(index) would leave, without mutating.
template <class Counters>
double UnwoundSum(const PathElement* path, int last, int index,
                  Counters& counters) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  double next_one_portion = path[last].weight;
  double total = 0.0;
  for (int j = last - 1; j >= 0; --j) {
    if (one_fraction != 0) {
      const double tmp = next_one_portion * (last + 1) / ((j + 1) * one_fraction);
      total += tmp;
      next_one_portion =
          path[j].weight - tmp * zero_fraction * (last - j) / (last + 1);
    } else {
      total += path[j].weight * (last + 1) / (zero_fraction * (last - j));
    }
    counters.unwind_step();
  }
  return total;
}

template <class Counters>
struct Recursion {
  const TreeModel& tree;
  std::span<const double> x;
  std::span<double> phi;
  Counters& counters;

  // `parent` holds `parent_length` elements; this call's path starts right
  // after it in the same buffer.
  void Run(int node, PathElement* parent, int parent_length,
           double zero_fraction, double one_fraction, int feature) {
    PathElement* path = parent + parent_length;
    std::copy(parent, parent + parent_length, path);
    Extend(path, parent_length, zero_fraction, one_fraction, feature, counters);
    int last = parent_length;  // index of the element just added

    if (tree.is_leaf(node)) {
      const double value = tree.values[node];
      for (int i = 1; i <= last; ++i) {
        counters.leaf_unwind();
        const double w = UnwoundSum(path, last, i, counters);
        const PathElement& el = path[i];
        phi[el.feature] += w * (el.one_fraction - el.zero_fraction) * value;
      }
      return;
    }

    const int split = tree.features[node];
    const int hot = tree.next(node, x);
    const int cold = hot == tree.left[node] ? tree.right[node] : tree.left[node];
    double incoming_zero = 1.0;
    double incoming_one = 1.0;
    int k = 1;
    while (k <= last && path[k].feature != split) ++k;
    if (k <= last) {
      incoming_zero = path[k].zero_fraction;
      incoming_one = path[k].one_fraction;
      Unwind(path, last, k, counters);
      --last;
    }
    const double cover = tree.covers[node];
    Run(hot, path, last + 1, incoming_zero * tree.covers[hot] / cover,
        incoming_one, split);
    Run(cold, path, last + 1, incoming_zero * tree.covers[cold] / cover, 0.0,
        split);
  }
};

}  // namespace detail

// Path buffer large enough for a tree of the given depth: level l uses at
// most l + 1 elements, stacked contiguously.
inline std::size_t PathBufferSize(int max_depth) {
  const std::size_t levels = static_cast<std::size_t>(max_depth) + 2;
  return levels * (levels + 1) / 2;
}

// Adds this tree's SHAP contributions for `x` into `phi`.
template <class Counters = NoCounters>
void ShapOriginal(std::span<const double> x, const TreeModel& tree,
                  std::span<double> phi, std::vector<PathElement>& buffer,
                  Counters& counters) {
  buffer.resize(std::max(buffer.size(), PathBufferSize(tree.max_depth)));
  detail::Recursion<Counters> rec{tree, x, phi, counters};
  rec.Run(0, buffer.data(), 0, 1.0, 1.0, -1);
}

inline void ShapOriginal(std::span<const double> x, const TreeModel& tree,
                         std::span<double> phi) {
  std::vector<PathElement> buffer;
  NoCounters counters;
  ShapOriginal(x, tree, phi, buffer, counters);
}

}  // namespace fasttreeshap::baseline

#endif  // FASTTREESHAP_BASELINE_HPP_
