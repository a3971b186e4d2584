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

// Tree ensembles in parallel-array form, plus their JSON and CSV codecs.
//
// A tree is six equal-length node arrays. Node 0 is the root. Leaves carry
// -1 in `left`, `right` and `feature`; `values` is only meaningful at leaves
// and `thresholds` only at internal nodes. A sample descends left when
// x[feature] <= threshold and right otherwise; every algorithm in the
// library routes through `GoesLeft` so ties are treated identically.

#ifndef FASTTREESHAP_MODEL_HPP_
#define FASTTREESHAP_MODEL_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fasttreeshap/error.hpp"
#include "json.hpp"

namespace fasttreeshap {

inline constexpr int kNoChild = -1;

inline bool GoesLeft(double value, double threshold) {
  return value <= threshold;
}

struct TreeModel {
  std::vector<double> values;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> thresholds;
  std::vector<double> covers;
  std::vector<int> features;
  // Number of internal nodes on the longest root-to-leaf path.
  int max_depth = 0;
  int num_leaves = 0;

  std::size_t num_nodes() const { return values.size(); }
  bool is_leaf(int node) const { return left[node] == kNoChild; }

  // Child followed by `x` at internal node `node`.
  int next(int node, std::span<const double> x) const {
    return GoesLeft(x[features[node]], thresholds[node]) ? left[node]
                                                         : right[node];
  }

  bool operator==(const TreeModel&) const = default;
};

struct Ensemble {
  std::vector<TreeModel> trees;
  int num_features = 0;
  double base_offset = 0.0;
  int max_depth = 0;
  int max_leaves = 0;

  bool operator==(const Ensemble&) const = default;
};

// Row-major M x num_features matrix of finite feature values.
class SampleBatch {
 public:
  SampleBatch() = default;
  SampleBatch(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("sample batch data size does not match " +
                           std::to_string(rows_) + " x " +
                           std::to_string(cols_));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }

  // Copy of rows [begin, end).
  SampleBatch slice(std::size_t begin, std::size_t end) const {
    return SampleBatch(end - begin, cols_,
                       std::vector<double>(data_.begin() + begin * cols_,
                                           data_.begin() + end * cols_));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Violation {
  std::string invariant;
  int tree = -1;
  int node = -1;
  std::string detail;

  std::string ToString() const {
    std::string out = invariant;
    if (tree >= 0) out += " (tree " + std::to_string(tree);
    if (node >= 0) out += ", node " + std::to_string(node);
    if (tree >= 0) out += ")";
    if (!detail.empty()) out += ": " + detail;
    return out;
  }
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  bool Has(std::string_view invariant) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.invariant == invariant; });
  }

  std::string ToString() const {
    if (ok()) return "ok";
    std::string out;
    for (const auto& v : violations) out += v.ToString() + "\n";
    return out;
  }
};

namespace invariant {
inline constexpr std::string_view kArrayLength = "array-length";
inline constexpr std::string_view kEmptyTree = "empty-tree";
inline constexpr std::string_view kLeafMarker = "leaf-marker";
inline constexpr std::string_view kChildRange = "child-range";
inline constexpr std::string_view kCycle = "cycle";
inline constexpr std::string_view kMultipleParents = "multiple-parents";
inline constexpr std::string_view kUnreachable = "unreachable";
inline constexpr std::string_view kCoverPositive = "cover-positive";
inline constexpr std::string_view kCoverConservation = "cover-conservation";
inline constexpr std::string_view kFeatureRange = "feature-range";
inline constexpr std::string_view kNonFinite = "non-finite";
inline constexpr std::string_view kTreeStats = "tree-stats";
inline constexpr std::string_view kEnsembleStats = "ensemble-stats";
inline constexpr std::string_view kNumFeatures = "num-features";
}  // namespace invariant

inline constexpr double kCoverTolerance = 1e-6;

namespace detail {

struct TreeShape {
  int max_depth = 0;
  int num_leaves = 0;
};

// Assumes the child graph is a proper binary tree rooted at node 0.
inline TreeShape MeasureTree(const TreeModel& tree) {
  TreeShape shape;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    if (tree.is_leaf(node)) {
      ++shape.num_leaves;
      shape.max_depth = std::max(shape.max_depth, depth);
    } else {
      stack.emplace_back(tree.right[node], depth + 1);
      stack.emplace_back(tree.left[node], depth + 1);
    }
  }
  return shape;
}

// Appends structural violations; returns true when the graph is a proper
// binary tree so traversal-based checks are safe.
inline bool CheckStructure(const TreeModel& tree, int t,
                           std::vector<Violation>& out) {
  const std::size_t n = tree.values.size();
  const auto add = [&](std::string_view inv, int node, std::string detail) {
    out.push_back({std::string(inv), t, node, std::move(detail)});
  };
  if (tree.left.size() != n || tree.right.size() != n ||
      tree.thresholds.size() != n || tree.covers.size() != n ||
      tree.features.size() != n) {
    add(invariant::kArrayLength, -1, "node arrays differ in length");
    return false;
  }
  if (n == 0) {
    add(invariant::kEmptyTree, -1, "tree has no nodes");
    return false;
  }
  bool sound = true;
  for (std::size_t j = 0; j < n; ++j) {
    const bool l = tree.left[j] == kNoChild;
    const bool r = tree.right[j] == kNoChild;
    const bool f = tree.features[j] == kNoChild;
    if (l != r || l != f) {
      add(invariant::kLeafMarker, static_cast<int>(j),
          "left/right/feature must all be -1 at leaves and all set otherwise");
      sound = false;
      continue;
    }
    if (l) continue;
    for (int child : {tree.left[j], tree.right[j]}) {
      if (child < 0 || static_cast<std::size_t>(child) >= n) {
        add(invariant::kChildRange, static_cast<int>(j),
            "child index " + std::to_string(child) + " out of range");
        sound = false;
      }
    }
  }
  if (!sound) return false;

  // Depth-first walk from the root; revisiting a node means either a cycle
  // (edge back into the current root path) or a second parent.
  std::vector<char> state(n, 0);  // 0 unseen, 1 on stack, 2 done
  std::vector<std::pair<int, int>> stack{{0, 0}};
  state[0] = 1;
  while (!stack.empty()) {
    auto& [node, next_child] = stack.back();
    if (tree.is_leaf(node) || next_child == 2) {
      state[node] = 2;
      stack.pop_back();
      continue;
    }
    const int child =
        next_child == 0 ? tree.left[node] : tree.right[node];
    ++next_child;
    if (state[child] == 1 || child == 0) {
      add(invariant::kCycle, node,
          "child " + std::to_string(child) + " is an ancestor");
      sound = false;
    } else if (state[child] == 2) {
      add(invariant::kMultipleParents, child, "node has more than one parent");
      sound = false;
    } else {
      state[child] = 1;
      stack.emplace_back(child, 0);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (state[j] == 0) {
      add(invariant::kUnreachable, static_cast<int>(j),
          "node not reachable from the root");
      sound = false;
    }
  }
  return sound;
}

}  // namespace detail

// Every violated invariant with tree/node coordinates; never throws.
inline ValidationReport Validate(const Ensemble& e) {
  ValidationReport report;
  auto& out = report.violations;
  if (e.num_features < 0) {
    out.push_back({std::string(invariant::kNumFeatures), -1, -1,
                   "num_features must be non-negative"});
  }
  int max_depth = 0;
  int max_leaves = 0;
  bool all_sound = true;
  for (std::size_t ti = 0; ti < e.trees.size(); ++ti) {
    const TreeModel& tree = e.trees[ti];
    const int t = static_cast<int>(ti);
    const auto add = [&](std::string_view inv, int node, std::string detail) {
      out.push_back({std::string(inv), t, node, std::move(detail)});
    };
    if (!detail::CheckStructure(tree, t, out)) {
      all_sound = false;
      continue;
    }
    for (std::size_t jj = 0; jj < tree.num_nodes(); ++jj) {
      const int j = static_cast<int>(jj);
      const double cover = tree.covers[j];
      if (!std::isfinite(cover) || !(cover > 0.0)) {
        add(invariant::kCoverPositive, j, "cover must be finite and > 0");
      }
      if (tree.is_leaf(j)) {
        if (!std::isfinite(tree.values[j])) {
          add(invariant::kNonFinite, j, "leaf value is not finite");
        }
        continue;
      }
      if (!std::isfinite(tree.thresholds[j])) {
        add(invariant::kNonFinite, j, "threshold is not finite");
      }
      if (tree.features[j] < 0 || tree.features[j] >= e.num_features) {
        add(invariant::kFeatureRange, j,
            "feature " + std::to_string(tree.features[j]) +
                " outside [0, " + std::to_string(e.num_features) + ")");
      }
      const double sum = tree.covers[tree.left[j]] + tree.covers[tree.right[j]];
      if (!(std::abs(sum - cover) <= kCoverTolerance * cover)) {
        std::ostringstream msg;
        msg << "children covers sum to " << sum << " but node cover is "
            << cover;
        add(invariant::kCoverConservation, j, msg.str());
      }
    }
    const auto shape = detail::MeasureTree(tree);
    if (shape.max_depth != tree.max_depth ||
        shape.num_leaves != tree.num_leaves) {
      add(invariant::kTreeStats, -1,
          "stored depth/leaves " + std::to_string(tree.max_depth) + "/" +
              std::to_string(tree.num_leaves) + " but traversal gives " +
              std::to_string(shape.max_depth) + "/" +
              std::to_string(shape.num_leaves));
    }
    max_depth = std::max(max_depth, shape.max_depth);
    max_leaves = std::max(max_leaves, shape.num_leaves);
  }
  if (all_sound && (max_depth != e.max_depth || max_leaves != e.max_leaves)) {
    out.push_back({std::string(invariant::kEnsembleStats), -1, -1,
                   "ensemble depth/leaves do not match member trees"});
  }
  return report;
}

// Recomputes per-tree and ensemble depth/leaf aggregates in place. Trees
// that are not proper binary trees are left untouched.
inline void RefreshStats(Ensemble& e) {
  e.max_depth = 0;
  e.max_leaves = 0;
  for (std::size_t t = 0; t < e.trees.size(); ++t) {
    std::vector<Violation> scratch;
    auto& tree = e.trees[t];
    if (!detail::CheckStructure(tree, static_cast<int>(t), scratch)) continue;
    const auto shape = detail::MeasureTree(tree);
    tree.max_depth = shape.max_depth;
    tree.num_leaves = shape.num_leaves;
    e.max_depth = std::max(e.max_depth, shape.max_depth);
    e.max_leaves = std::max(e.max_leaves, shape.num_leaves);
  }
}

inline void CheckWidth(const Ensemble& e, std::size_t width) {
  if (width != static_cast<std::size_t>(e.num_features)) {
    throw DimensionError("expected " + std::to_string(e.num_features) +
                         " features, got " + std::to_string(width));
  }
}

inline double PredictTree(const TreeModel& tree, std::span<const double> x) {
  int node = 0;
  while (!tree.is_leaf(node)) node = tree.next(node, x);
  return tree.values[node];
}

inline double Predict(const Ensemble& e, std::span<const double> x) {
  CheckWidth(e, x.size());
  double total = 0.0;
  for (const auto& tree : e.trees) total += PredictTree(tree, x);
  return total + e.base_offset;
}

// ---------------------------------------------------------------------------
// JSON model codec.

inline nlohmann::json ToJson(const Ensemble& e) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : e.trees) {
    trees.push_back({{"children_left", tree.left},
                     {"children_right", tree.right},
                     {"feature", tree.features},
                     {"threshold", tree.thresholds},
                     {"cover", tree.covers},
                     {"value", tree.values}});
  }
  return {{"num_features", e.num_features},
          {"base_offset", e.base_offset},
          {"trees", std::move(trees)}};
}

// Compact, key-sorted serialization; the cache digest is taken over it.
inline std::string CanonicalJson(const Ensemble& e) { return ToJson(e).dump(); }

// Parses without validating. Structural problems are left for Validate.
inline Ensemble ParseModel(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(std::string("model JSON: ") + err.what());
  }
  try {
    Ensemble e;
    e.num_features = doc.at("num_features").get<int>();
    e.base_offset = doc.value("base_offset", 0.0);
    for (const auto& jt : doc.at("trees")) {
      TreeModel tree;
      jt.at("children_left").get_to(tree.left);
      jt.at("children_right").get_to(tree.right);
      jt.at("feature").get_to(tree.features);
      jt.at("threshold").get_to(tree.thresholds);
      jt.at("cover").get_to(tree.covers);
      jt.at("value").get_to(tree.values);
      e.trees.push_back(std::move(tree));
    }
    RefreshStats(e);
    return e;
  } catch (const nlohmann::json::exception& err) {
    throw ParseError(std::string("model JSON schema: ") + err.what());
  }
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Parse + validate. Throws ValidationError naming the first violation.
inline Ensemble LoadModelFromString(std::string_view text) {
  Ensemble e = ParseModel(text);
  const auto report = Validate(e);
  if (!report.ok()) {
    throw ValidationError("invalid model: " +
                          report.violations.front().ToString());
  }
  return e;
}

inline Ensemble LoadModel(const std::filesystem::path& path) {
  return LoadModelFromString(ReadFile(path));
}

inline void SaveModel(const Ensemble& e, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << ToJson(e).dump(1) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Headerless CSV of decimal reals.

inline SampleBatch ParseSamples(std::string_view text,
                                std::size_t expected_cols) {
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    std::size_t cols = 0;
    while (true) {
      const auto comma = line.find(',');
      std::string_view field = line.substr(0, comma);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
        field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t'))
        field.remove_suffix(1);
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() ||
          ptr != field.data() + field.size()) {
        throw ParseError("CSV line " + std::to_string(line_no) +
                         ": cannot parse '" + std::string(field) + "'");
      }
      if (!std::isfinite(value)) {
        throw ParseError("CSV line " + std::to_string(line_no) +
                         ": non-finite value");
      }
      data.push_back(value);
      ++cols;
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (cols != expected_cols) {
      throw DimensionError("CSV line " + std::to_string(line_no) + ": " +
                           std::to_string(cols) + " columns, expected " +
                           std::to_string(expected_cols));
    }
    ++rows;
  }
  return SampleBatch(rows, expected_cols, std::move(data));
}

inline SampleBatch LoadSamples(const std::filesystem::path& path,
                               std::size_t expected_cols) {
  return ParseSamples(ReadFile(path), expected_cols);
}

}  // namespace fasttreeshap

#endif  // FASTTREESHAP_MODEL_HPP_
