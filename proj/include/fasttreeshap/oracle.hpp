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

// Slow reference evaluators. Each one computes SHAP values by a different
// closed form so that the fast kernels can be checked against several
// independent routes:
//
//   ShapBruteForce        Shapley sum over all 2^n feature subsets, with the
//                         conditional expectation evaluated by ExpValue.
//   ShapPathSubsets       per-path sum over subsets of the path's features,
//                         weighted by indicator/ratio products.
//   ShapThresholdSubsets  per-path sum driven by the set of features whose
//                         thresholds the sample fails, using SubsetWeights.
//
// All three are exponential and guarded by kMaxOracleFeatures.

#ifndef FASTTREESHAP_ORACLE_HPP_
#define FASTTREESHAP_ORACLE_HPP_

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fasttreeshap/error.hpp"
#include "fasttreeshap/model.hpp"

namespace fasttreeshap::oracle {

inline constexpr int kMaxOracleFeatures = 20;

struct ShapResult {
  std::vector<double> phi;
  // Expectation with no feature fixed.
  double base = 0.0;
};

// Conditional expectation of the tree output with the features flagged in
// `fixed` following x and all others marginalized by cover.
inline double ExpValue(std::span<const double> x, const std::vector<bool>& fixed,
                       const TreeModel& tree, int node = 0) {
  if (tree.is_leaf(node)) return tree.values[node];
  const int feature = tree.features[node];
  if (fixed[feature]) return ExpValue(x, fixed, tree, tree.next(node, x));
  const int a = tree.left[node];
  const int b = tree.right[node];
  return ExpValue(x, fixed, tree, a) * tree.covers[a] / tree.covers[node] +
         ExpValue(x, fixed, tree, b) * tree.covers[b] / tree.covers[node];
}

inline void CheckGuard(int n, const char* what) {
  if (n > kMaxOracleFeatures) {
    throw GuardError(std::string(what) + ": " + std::to_string(n) +
                     " features exceeds the oracle limit of " +
                     std::to_string(kMaxOracleFeatures));
  }
}

inline ShapResult ShapBruteForce(std::span<const double> x,
                                 const TreeModel& tree, int n) {
  CheckGuard(n, "brute-force SHAP");
  if (x.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("feature vector width does not match n");
  }
  const std::uint32_t subsets = 1u << n;
  std::vector<double> f(subsets);
  std::vector<bool> fixed(n);
  for (std::uint32_t s = 0; s < subsets; ++s) {
    for (int i = 0; i < n; ++i) fixed[i] = (s >> i) & 1u;
    f[s] = ExpValue(x, fixed, tree);
  }
  // weight(|S|) = |S|! (n - |S| - 1)! / n! = 1 / (n * C(n-1, |S|)).
  std::vector<double> weight(n > 0 ? n : 1);
  double binom = 1.0;
  for (int k = 0; k < n; ++k) {
    weight[k] = 1.0 / (n * binom);
    binom = binom * (n - 1 - k) / (k + 1);
  }
  ShapResult result{std::vector<double>(n, 0.0), f[0]};
  for (int i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    for (std::uint32_t s = 0; s < subsets; ++s) {
      if (s & bit) continue;
      result.phi[i] += weight[std::popcount(s)] * (f[s | bit] - f[s]);
    }
  }
  return result;
}

enum class Branch { kLeft, kRight };

// One root-to-leaf path with its split features, covering ratios and the
// side of each threshold the path takes.
struct PathDescriptor {
  double leaf_value = 0.0;
  int leaf_index = -1;
  std::vector<int> node_features;
  std::vector<double> ratios;
  std::vector<Branch> directions;
  std::vector<double> thresholds;
  // Distinct features in order of first occurrence from the root.
  std::vector<int> unique_features;

  std::size_t length() const { return node_features.size(); }

  // Position of `feature` in unique_features, or -1.
  int position(int feature) const {
    for (std::size_t u = 0; u < unique_features.size(); ++u) {
      if (unique_features[u] == feature) return static_cast<int>(u);
    }
    return -1;
  }

  bool satisfied(std::size_t j, std::span<const double> x) const {
    const bool left = GoesLeft(x[node_features[j]], thresholds[j]);
    return left == (directions[j] == Branch::kLeft);
  }
};

// Paths in left-first depth-first leaf order.
inline std::vector<PathDescriptor> EnumeratePaths(const TreeModel& tree) {
  std::vector<PathDescriptor> paths;
  PathDescriptor current;
  auto recurse = [&](auto&& self, int node) -> void {
    if (tree.is_leaf(node)) {
      PathDescriptor p = current;
      p.leaf_value = tree.values[node];
      p.leaf_index = node;
      for (int f : p.node_features) {
        if (p.position(f) < 0) p.unique_features.push_back(f);
      }
      paths.push_back(std::move(p));
      return;
    }
    for (Branch side : {Branch::kLeft, Branch::kRight}) {
      const int child =
          side == Branch::kLeft ? tree.left[node] : tree.right[node];
      current.node_features.push_back(tree.features[node]);
      current.ratios.push_back(tree.covers[child] / tree.covers[node]);
      current.directions.push_back(side);
      current.thresholds.push_back(tree.thresholds[node]);
      self(self, child);
      current.node_features.pop_back();
      current.ratios.pop_back();
      current.directions.pop_back();
      current.thresholds.pop_back();
    }
  };
  recurse(recurse, 0);
  return paths;
}

// Weights for one path, keyed by bitmask over the path's unique features
// (bit u <=> unique_features[u] in C).
struct SubsetWeightTable {
  int num_unique = 0;
  // u[C] for every proper subset C; the full subset is omitted because its
  // defining sum divides by zero and no formula consumes it.
  std::vector<double> u;
  // u_m[C][m] for m = 0..|C|, the Shapley-weighted ratio sums.
  std::vector<std::vector<double>> u_m;

  std::uint32_t full_mask() const { return (1u << num_unique) - 1u; }
  double at(std::uint32_t mask) const {
    if (mask >= u.size()) {
      throw std::out_of_range("subset weight for the full subset is undefined");
    }
    return u[mask];
  }
};

namespace detail {

// Product of the ratios of all path nodes whose feature is in `mask`.
inline double RatioProduct(const PathDescriptor& path, std::uint32_t mask) {
  double product = 1.0;
  for (std::size_t j = 0; j < path.length(); ++j) {
    const int u = path.position(path.node_features[j]);
    if ((mask >> u) & 1u) product *= path.ratios[j];
  }
  return product;
}

inline double Factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace detail

inline SubsetWeightTable SubsetWeights(const PathDescriptor& path) {
  const int k = static_cast<int>(path.unique_features.size());
  CheckGuard(k, "subset weights");
  SubsetWeightTable table;
  table.num_unique = k;
  const std::uint32_t full = (1u << k) - 1u;
  table.u.assign(full, 0.0);
  table.u_m.assign(full, {});
  for (std::uint32_t c = 0; c < full; ++c) {
    const int size = std::popcount(c);
    std::vector<double> sums(size + 1, 0.0);
    // Every S subset of C, via submask enumeration.
    for (std::uint32_t s = c;; s = (s - 1) & c) {
      sums[std::popcount(s)] += detail::RatioProduct(path, c & ~s);
      if (s == 0) break;
    }
    auto& um = table.u_m[c];
    um.resize(size + 1);
    double total = 0.0;
    for (int m = 0; m <= size; ++m) {
      um[m] = detail::Factorial(m) * detail::Factorial(k - m) /
              detail::Factorial(k + 1) * sums[m];
      total += static_cast<double>(k + 1) / (k - m) * um[m];
    }
    table.u[c] = total;
  }
  return table;
}

inline ShapResult ShapPathSubsets(std::span<const double> x,
                                  const TreeModel& tree, int n) {
  if (x.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("feature vector width does not match n");
  }
  ShapResult result{std::vector<double>(n, 0.0),
                    ExpValue(x, std::vector<bool>(n, false), tree)};
  for (const auto& path : EnumeratePaths(tree)) {
    const int k = static_cast<int>(path.unique_features.size());
    CheckGuard(k, "path-subset SHAP");
    for (int ui = 0; ui < k; ++ui) {
      const int feature = path.unique_features[ui];
      const std::uint32_t others = ((1u << k) - 1u) & ~(1u << ui);
      double bracket = 0.0;
      for (std::uint32_t s = others;; s = (s - 1) & others) {
        const int m = std::popcount(s);
        double term = detail::Factorial(m) * detail::Factorial(k - m - 1) /
                      detail::Factorial(k);
        for (std::size_t j = 0; j < path.length(); ++j) {
          const int u = path.position(path.node_features[j]);
          if (u == ui) continue;
          if ((s >> u) & 1u) {
            term *= path.satisfied(j, x) ? 1.0 : 0.0;
          } else {
            term *= path.ratios[j];
          }
        }
        bracket += term;
        if (s == 0) break;
      }
      double indicator = 1.0;
      double ratio = 1.0;
      for (std::size_t j = 0; j < path.length(); ++j) {
        if (path.node_features[j] != feature) continue;
        indicator *= path.satisfied(j, x) ? 1.0 : 0.0;
        ratio *= path.ratios[j];
      }
      result.phi[feature] += bracket * (indicator - ratio) * path.leaf_value;
    }
  }
  return result;
}

inline ShapResult ShapThresholdSubsets(std::span<const double> x,
                                       const TreeModel& tree, int n) {
  if (x.size() != static_cast<std::size_t>(n)) {
    throw DimensionError("feature vector width does not match n");
  }
  ShapResult result{std::vector<double>(n, 0.0),
                    ExpValue(x, std::vector<bool>(n, false), tree)};
  for (const auto& path : EnumeratePaths(tree)) {
    const int k = static_cast<int>(path.unique_features.size());
    CheckGuard(k, "threshold-subset SHAP");
    if (k == 0) continue;
    // Features failing at least one of their thresholds on this path.
    std::uint32_t failing = 0;
    for (std::size_t j = 0; j < path.length(); ++j) {
      if (!path.satisfied(j, x)) {
        failing |= 1u << path.position(path.node_features[j]);
      }
    }
    const double q = detail::RatioProduct(path, failing);
    const auto weights = SubsetWeights(path);
    const std::uint32_t full = weights.full_mask();
    for (int ui = 0; ui < k; ++ui) {
      const int feature = path.unique_features[ui];
      const std::uint32_t bit = 1u << ui;
      if (failing & bit) {
        result.phi[feature] -= weights.at(full & ~failing) * q * path.leaf_value;
      } else {
        const double own = detail::RatioProduct(path, bit);
        result.phi[feature] += weights.at(full & ~(failing | bit)) * q *
                               (1.0 - own) * path.leaf_value;
      }
    }
  }
  return result;
}

}  // namespace fasttreeshap::oracle

#endif  // FASTTREESHAP_ORACLE_HPP_
