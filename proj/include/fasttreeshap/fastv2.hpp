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

// Fast TreeSHAP v2: a sample-independent Prep pass that tabulates, for every
// leaf and every subset C of the leaf's path features, the aggregated
// subset weight U(C); and a per-sample Score pass that reads those tables
// instead of unwinding weight sequences.
//
// Table layout: one row per leaf in left-first depth-first order, 2^depth
// columns. Column bit (i - 1) refers to the i-th record of the path at the
// leaf (record 0 is a dummy). When a feature reappears lower on a path its
// record is moved to the end, so the column order is the order of last
// occurrence; Prep and Score apply the same moves, driven by the
// `duplicate_position` array recorded during Prep. The full-subset column is
// stored as zero and never read.

#ifndef FASTTREESHAP_FASTV2_HPP_
#define FASTTREESHAP_FASTV2_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fasttreeshap/counters.hpp"
#include "fasttreeshap/error.hpp"
#include "fasttreeshap/model.hpp"

namespace fasttreeshap::fastv2 {

inline constexpr int kMaxTableDepth = 30;

struct PrepTable {
  int depth = 0;
  int leaves = 0;
  // Per node: position in the path of an earlier split on the same feature,
  // or -1.
  std::vector<std::int32_t> duplicate_position;
  // leaves x 2^depth, row-major.
  std::vector<double> s;

  std::size_t row_width() const { return std::size_t{1} << depth; }
  double at(std::size_t leaf, std::size_t subset) const {
    return s[leaf * row_width() + subset];
  }
  std::span<const double> row(std::size_t leaf) const {
    return {s.data() + leaf * row_width(), row_width()};
  }
  std::size_t bytes() const { return s.size() * sizeof(double); }

  bool operator==(const PrepTable&) const = default;
};

// Size in bytes of the table Prep would build for `tree`.
inline std::size_t TableBytes(const TreeModel& tree) {
  if (tree.max_depth > kMaxTableDepth) {
    return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(tree.num_leaves) *
         (std::size_t{1} << tree.max_depth) * sizeof(double);
}

namespace detail {

struct PathRecord {
  int feature = -1;
  double zero_fraction = 1.0;
};

// Scratch for Prep. Level k (node depth k) owns 2^k weight rows of stride
// depth + 1, with the row lengths alongside.
struct PrepWorkspace {
  int depth = 0;
  std::vector<std::size_t> level_offset;
  std::vector<double> weights;
  std::vector<int> lengths;  // index of the last nonzero entry per row (|C|)
  std::vector<PathRecord> records;

  explicit PrepWorkspace(int max_depth) : depth(max_depth) {
    const std::size_t stride = static_cast<std::size_t>(depth) + 1;
    std::size_t rows = 0;
    for (int k = 0; k <= depth; ++k) {
      level_offset.push_back(rows);
      rows += std::size_t{1} << k;
    }
    weights.assign(rows * stride, 0.0);
    lengths.assign(rows, 0);
    records.assign(static_cast<std::size_t>(depth + 1) * (depth + 2), {});
  }

  std::size_t stride() const { return static_cast<std::size_t>(depth) + 1; }
  double* row(int level, std::size_t t) {
    return weights.data() + (level_offset[level] + t) * stride();
  }
  int* length(int level) { return lengths.data() + level_offset[level]; }
  PathRecord* path(int level) {
    return records.data() + static_cast<std::size_t>(level) * (depth + 2);
  }
};

template <class Counters>
struct PrepRecursion {
  const TreeModel& tree;
  PrepTable& table;
  PrepWorkspace& ws;
  Counters& counters;
  std::size_t leaf = 0;

  void Run(int node, int level, int parent_lm, double zero_fraction,
           int feature) {
    PathRecord* m = ws.path(level);
    int* len = ws.length(level);
    if (level > 0) std::copy(ws.path(level - 1), ws.path(level - 1) + parent_lm, m);
    int lm = parent_lm;

    // Extend: subsets without the new feature keep their weights up to the
    // Shapley rescale; subsets with it get the ratio-weighted extension.
    const int l = lm;
    m[lm++] = {feature, zero_fraction};
    if (l == 0) {
      ws.row(level, 0)[0] = 1.0;
      len[0] = 0;
    } else {
      const std::size_t half = std::size_t{1} << (l - 1);
      const int* parent_len = ws.length(level - 1);
      for (std::size_t t = 0; t < half; ++t) {
        const double* src = ws.row(level - 1, t);
        const int size = parent_len[t];
        double* lo = ws.row(level, t);
        double* hi = ws.row(level, t + half);
        hi[size + 1] = 0.0;
        for (int i = size; i >= 0; --i) {
          lo[i] = src[i] * (l - i) / (l + 1);
          hi[i + 1] += src[i] * (i + 1) / (l + 1);
          hi[i] = zero_fraction * src[i] * (l - i) / (l + 1);
          counters.prep_step();
        }
        len[t] = size;
        len[t + half] = size + 1;
      }
    }

    if (tree.is_leaf(node)) {
      const int features = lm - 1;
      const std::size_t subsets = std::size_t{1} << features;
      double* out = table.s.data() + leaf * table.row_width();
      for (std::size_t t = 0; t + 1 < subsets; ++t) {
        const double* w = ws.row(level, t);
        double total = 0.0;
        for (int i = len[t]; i >= 0; --i) {
          total += w[i] * (features + 1) / (features - i);
          counters.prep_step();
        }
        out[t] = total;
      }
      ++leaf;
      return;
    }

    const int split = tree.features[node];
    double incoming_zero = 1.0;
    int k = 1;
    while (k < lm && m[k].feature != split) ++k;
    if (k < lm) {
      table.duplicate_position[node] = k;
      incoming_zero = m[k].zero_fraction;
      Unwind(level, m, lm, k);
    }
    const double cover = tree.covers[node];
    const int a = tree.left[node];
    const int b = tree.right[node];
    Run(a, level + 1, lm, incoming_zero * tree.covers[a] / cover, split);
    Run(b, level + 1, lm, incoming_zero * tree.covers[b] / cover, split);
  }

  // Drops record `index` in place: keeps the rows whose subset excludes it
  // (compacting the bitmask) and undoes its Shapley rescale.
  void Unwind(int level, PathRecord* m, int& lm, int index) {
    const int l = lm - 1;
    const std::size_t rows = std::size_t{1} << (l - 1);
    const std::size_t low_mask = (std::size_t{1} << (index - 1)) - 1;
    int* len = ws.length(level);
    for (std::size_t t = 0; t < rows; ++t) {
      const std::size_t src = (t & low_mask) | ((t & ~low_mask) << 1);
      double* dst_row = ws.row(level, t);
      const double* src_row = ws.row(level, src);
      const int size = len[src];
      for (int i = size; i >= 0; --i) {
        dst_row[i] = src_row[i] * (l + 1) / (l - i);
        counters.prep_step();
      }
      len[t] = size;
    }
    std::copy(m + index + 1, m + lm, m + index);
    --lm;
  }
};

struct ScoreRecord {
  int feature = -1;
  double zero_fraction = 1.0;
  bool one = true;
};

template <class Counters>
struct ScoreRecursion {
  const TreeModel& tree;
  const PrepTable& table;
  std::span<const double> x;
  std::span<double> phi;
  Counters& counters;
  ScoreRecord* buffer;
  int stride;
  std::size_t leaf = 0;

  void Run(int node, int level, int parent_lm, double q, double zero_fraction,
           bool one, int feature) {
    ScoreRecord* m = buffer + static_cast<std::size_t>(level) * stride;
    if (level > 0) {
      const ScoreRecord* parent = m - stride;
      std::copy(parent, parent + parent_lm, m);
    }
    int lm = parent_lm;
    m[lm++] = {feature, zero_fraction, one};
    if (!one) q *= zero_fraction;

    if (tree.is_leaf(node)) {
      const double value = tree.values[node];
      std::size_t satisfied = 0;
      for (int i = 1; i < lm; ++i) {
        if (m[i].one) satisfied |= std::size_t{1} << (i - 1);
      }
      const std::size_t full = (std::size_t{1} << (lm - 1)) - 1;
      const double* row = table.s.data() + leaf * table.row_width();
      for (int i = 1; i < lm; ++i) {
        counters.table_lookup();
        if (!m[i].one) {
          if (satisfied == full) counters.full_subset_read();
          phi[m[i].feature] -= row[satisfied] * q * value;
        } else {
          const std::size_t c = satisfied & ~(std::size_t{1} << (i - 1));
          if (c == full) counters.full_subset_read();
          phi[m[i].feature] += row[c] * q * (1.0 - m[i].zero_fraction) * value;
        }
      }
      ++leaf;
      return;
    }

    double incoming_zero = 1.0;
    bool incoming_one = true;
    const int k = table.duplicate_position[node];
    if (k >= 0) {
      incoming_zero = m[k].zero_fraction;
      incoming_one = m[k].one;
      std::copy(m + k + 1, m + lm, m + k);
      --lm;
      if (!incoming_one) q /= incoming_zero;
    }
    const bool goes_left =
        GoesLeft(x[tree.features[node]], tree.thresholds[node]);
    const double cover = tree.covers[node];
    const int a = tree.left[node];
    const int b = tree.right[node];
    Run(a, level + 1, lm, q, incoming_zero * tree.covers[a] / cover,
        incoming_one && goes_left, tree.features[node]);
    Run(b, level + 1, lm, q, incoming_zero * tree.covers[b] / cover,
        incoming_one && !goes_left, tree.features[node]);
  }
};

}  // namespace detail

// Builds the subset-weight table for `tree`. Throws BudgetError when the
// table would exceed `max_bytes`.
template <class Counters = NoCounters>
PrepTable Prep(const TreeModel& tree, Counters& counters,
               std::size_t max_bytes = std::numeric_limits<std::size_t>::max()) {
  const std::size_t bytes = TableBytes(tree);
  if (bytes > max_bytes) {
    throw BudgetError("subset-weight table for a depth-" +
                      std::to_string(tree.max_depth) + " tree with " +
                      std::to_string(tree.num_leaves) + " leaves needs " +
                      std::to_string(bytes) + " bytes, over the budget of " +
                      std::to_string(max_bytes) + "; use the v1 algorithm");
  }
  PrepTable table;
  table.depth = tree.max_depth;
  table.leaves = tree.num_leaves;
  table.duplicate_position.assign(tree.num_nodes(), -1);
  table.s.assign(static_cast<std::size_t>(tree.num_leaves) << tree.max_depth,
                 0.0);
  detail::PrepWorkspace ws(tree.max_depth);
  detail::PrepRecursion<Counters> rec{tree, table, ws, counters};
  rec.Run(0, 0, 0, 1.0, -1);
  return table;
}

inline PrepTable Prep(const TreeModel& tree,
                      std::size_t max_bytes = std::numeric_limits<std::size_t>::max()) {
  NoCounters counters;
  return Prep(tree, counters, max_bytes);
}

inline void CheckTableMatches(const TreeModel& tree, const PrepTable& table) {
  if (table.depth != tree.max_depth || table.leaves != tree.num_leaves ||
      table.duplicate_position.size() != tree.num_nodes() ||
      table.s.size() != static_cast<std::size_t>(table.leaves) * table.row_width()) {
    throw CacheError(CacheError::Kind::kModelMismatch,
                     "subset-weight table was not built for this tree");
  }
}

// Reusable scratch for Score.
struct ScoreWorkspace {
  std::vector<detail::ScoreRecord> records;
};

// Adds this tree's SHAP contributions for `x` into `phi` using `table`.
template <class Counters = NoCounters>
void Score(std::span<const double> x, const TreeModel& tree,
           const PrepTable& table, std::span<double> phi,
           ScoreWorkspace& workspace, Counters& counters) {
  CheckTableMatches(tree, table);
  const int stride = tree.max_depth + 2;
  const std::size_t size =
      static_cast<std::size_t>(stride) * (tree.max_depth + 1);
  if (workspace.records.size() < size) workspace.records.resize(size);
  detail::ScoreRecursion<Counters> rec{tree,    table,
                                       x,       phi,
                                       counters, workspace.records.data(),
                                       stride};
  rec.Run(0, 0, 0, 1.0, 1.0, true, -1);
}

inline void Score(std::span<const double> x, const TreeModel& tree,
                  const PrepTable& table, std::span<double> phi) {
  ScoreWorkspace workspace;
  NoCounters counters;
  Score(x, tree, table, phi, workspace, counters);
}

// Features of each leaf's path in the order that indexes table columns
// (bit i <=> element i), leaves in table-row order.
inline std::vector<std::vector<int>> ColumnFeatures(const TreeModel& tree) {
  std::vector<std::vector<int>> out;
  std::vector<int> path;
  auto recurse = [&](auto&& self, int node) -> void {
    if (tree.is_leaf(node)) {
      out.push_back(path);
      return;
    }
    const std::vector<int> saved = path;
    const int split = tree.features[node];
    std::erase(path, split);
    path.push_back(split);
    self(self, tree.left[node]);
    self(self, tree.right[node]);
    path = saved;
  };
  recurse(recurse, 0);
  return out;
}

}  // namespace fasttreeshap::fastv2

#endif  // FASTTREESHAP_FASTV2_HPP_
