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

// Batch explanation of an ensemble: algorithm selection, per-sample fan-out
// across worker threads, and table-memory estimates.
//
// Every sample accumulates its trees in index order, and workers split the
// batch into disjoint row ranges, so the output does not depend on the
// worker count.

#ifndef FASTTREESHAP_EXPLAINER_HPP_
#define FASTTREESHAP_EXPLAINER_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fasttreeshap/baseline.hpp"
#include "fasttreeshap/cache.hpp"
#include "fasttreeshap/error.hpp"
#include "fasttreeshap/fastv1.hpp"
#include "fasttreeshap/fastv2.hpp"
#include "fasttreeshap/model.hpp"

namespace fasttreeshap {

enum class Algorithm { kOriginal, kV1, kV2, kAuto };

inline std::string_view AlgorithmName(Algorithm a) {
  switch (a) {
    case Algorithm::kOriginal:
      return "original";
    case Algorithm::kV1:
      return "v1";
    case Algorithm::kV2:
      return "v2";
    case Algorithm::kAuto:
      return "auto";
  }
  return "unknown";
}

inline std::optional<Algorithm> ParseAlgorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kOriginal, Algorithm::kV1, Algorithm::kV2,
                      Algorithm::kAuto}) {
    if (AlgorithmName(a) == name) return a;
  }
  return std::nullopt;
}

struct AlgorithmChoice {
  Algorithm algorithm = Algorithm::kAuto;
  // v2 only: load tables from this cache instead of running Prep.
  std::optional<std::filesystem::path> cache_path;
};

inline constexpr std::size_t kDefaultBudgetBytes = std::size_t{1} << 30;

struct ExplainOptions {
  AlgorithmChoice choice;
  int workers = 1;
  std::size_t budget_bytes = kDefaultBudgetBytes;
};

struct Attribution {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> phi;  // rows x cols, row-major
  std::vector<double> base_values;
  // The concrete algorithm that produced `phi`.
  Algorithm algorithm = Algorithm::kV1;

  std::span<const double> row(std::size_t i) const {
    return {phi.data() + i * cols, cols};
  }
};

struct MemoryEstimate {
  // Sum over trees of leaves * 2^depth * 8.
  std::size_t per_tree_bytes = 0;
  // max_leaves * 2^max_depth * 8 over the whole ensemble.
  std::size_t global_bound_bytes = 0;
  // Largest single table; the floor for streaming v2.
  std::size_t largest_table_bytes = 0;
};

namespace detail {

inline std::size_t SaturatingAdd(std::size_t a, std::size_t b) {
  return a > std::numeric_limits<std::size_t>::max() - b
             ? std::numeric_limits<std::size_t>::max()
             : a + b;
}

inline std::size_t TableBytesFor(int leaves, int depth) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  if (depth >= 60) return kMax;
  const std::size_t width = std::size_t{1} << depth;
  const std::size_t cells_limit = kMax / sizeof(double) / width;
  if (static_cast<std::size_t>(leaves) > cells_limit) return kMax;
  return static_cast<std::size_t>(leaves) * width * sizeof(double);
}

// Runs fn(begin, end) over `workers` contiguous slices of [0, n) and
// rethrows the first worker failure.
template <class Fn>
void ParallelFor(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w =
      std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
  if (w <= 1) {
    if (n > 0) fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (std::size_t k = 0; k < w; ++k) {
    const std::size_t begin = n * k / w;
    const std::size_t end = n * (k + 1) / w;
    threads.emplace_back([&, k, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

inline MemoryEstimate Estimate(const Ensemble& e) {
  MemoryEstimate out;
  for (const auto& tree : e.trees) {
    const std::size_t bytes = detail::TableBytesFor(tree.num_leaves, tree.max_depth);
    out.per_tree_bytes = detail::SaturatingAdd(out.per_tree_bytes, bytes);
    out.largest_table_bytes = std::max(out.largest_table_bytes, bytes);
  }
  out.global_bound_bytes = detail::TableBytesFor(e.max_leaves, e.max_depth);
  return out;
}

// Smallest sample count for which v2 is expected to beat v1 at depth D:
// the least integer M with M > 2^(D+1) / D. Depth 0 has no threshold.
inline std::size_t V2SampleThreshold(int depth) {
  if (depth <= 0 || depth >= 62) return std::numeric_limits<std::size_t>::max();
  const std::uint64_t numerator = std::uint64_t{1} << (depth + 1);
  return static_cast<std::size_t>(numerator / depth + 1);
}

// Picks v2 when the batch is large enough for the ensemble depth and all
// tables fit in the budget; v1 otherwise. Never picks the original.
inline Algorithm AutoSelect(const Ensemble& e, std::size_t samples,
                            std::size_t budget_bytes) {
  if (samples >= V2SampleThreshold(e.max_depth) &&
      Estimate(e).per_tree_bytes <= budget_bytes) {
    return Algorithm::kV2;
  }
  return Algorithm::kV1;
}

// Cover-weighted mean output with no feature known, plus the offset.
inline double ExpectedValue(const Ensemble& e) {
  double total = 0.0;
  for (const auto& tree : e.trees) {
    auto mean = [&](auto&& self, int node) -> double {
      if (tree.is_leaf(node)) return tree.values[node];
      const int a = tree.left[node];
      const int b = tree.right[node];
      return self(self, a) * tree.covers[a] / tree.covers[node] +
             self(self, b) * tree.covers[b] / tree.covers[node];
    };
    total += mean(mean, 0);
  }
  return total + e.base_offset;
}

// Builds every tree's table, spreading trees over `workers`.
inline std::vector<fastv2::PrepTable> PrepAll(
    const Ensemble& e, int workers = 1,
    std::size_t budget_bytes = std::numeric_limits<std::size_t>::max()) {
  std::vector<fastv2::PrepTable> tables(e.trees.size());
  detail::ParallelFor(e.trees.size(), workers,
                      [&](std::size_t begin, std::size_t end) {
                        for (std::size_t t = begin; t < end; ++t) {
                          tables[t] = fastv2::Prep(e.trees[t], budget_bytes);
                        }
                      });
  return tables;
}

namespace detail {

inline Attribution EmptyAttribution(const Ensemble& e, const SampleBatch& batch,
                                    Algorithm algorithm) {
  if (batch.cols() != static_cast<std::size_t>(e.num_features)) {
    throw DimensionError("sample batch has " + std::to_string(batch.cols()) +
                         " columns, model expects " +
                         std::to_string(e.num_features));
  }
  Attribution out;
  out.rows = batch.rows();
  out.cols = batch.cols();
  out.phi.assign(out.rows * out.cols, 0.0);
  out.base_values.assign(out.rows, ExpectedValue(e));
  out.algorithm = algorithm;
  return out;
}

// Adds the contributions of trees [tree_begin, tree_end) for every sample.
inline void ScoreRange(const Ensemble& e, const SampleBatch& batch,
                       std::span<const fastv2::PrepTable> tables,
                       std::size_t tree_begin, std::size_t tree_end,
                       int workers, Attribution& out) {
  ParallelFor(batch.rows(), workers, [&](std::size_t begin, std::size_t end) {
    fastv2::ScoreWorkspace ws;
    NoCounters counters;
    for (std::size_t i = begin; i < end; ++i) {
      std::span<double> phi(out.phi.data() + i * out.cols, out.cols);
      for (std::size_t t = tree_begin; t < tree_end; ++t) {
        fastv2::Score(batch.row(i), e.trees[t], tables[t - tree_begin], phi, ws,
                      counters);
      }
    }
  });
}

}  // namespace detail

// v2 Score over the whole batch with tables already built.
inline Attribution ExplainWithTables(const Ensemble& e, const SampleBatch& batch,
                                     std::span<const fastv2::PrepTable> tables,
                                     int workers = 1) {
  if (tables.size() != e.trees.size()) {
    throw CacheError(CacheError::Kind::kModelMismatch,
                     "table count does not match tree count");
  }
  Attribution out = detail::EmptyAttribution(e, batch, Algorithm::kV2);
  detail::ScoreRange(e, batch, tables, 0, e.trees.size(), workers, out);
  return out;
}

inline Attribution Explain(const Ensemble& e, const SampleBatch& batch,
                           const ExplainOptions& options = {}) {
  if (options.workers < 1) throw Error("workers must be at least 1");
  Algorithm algorithm = options.choice.algorithm;
  if (algorithm == Algorithm::kAuto) {
    algorithm = options.choice.cache_path
                    ? Algorithm::kV2
                    : AutoSelect(e, batch.rows(), options.budget_bytes);
  }
  Attribution out = detail::EmptyAttribution(e, batch, algorithm);

  switch (algorithm) {
    case Algorithm::kOriginal:
      detail::ParallelFor(batch.rows(), options.workers,
                          [&](std::size_t begin, std::size_t end) {
                            std::vector<baseline::PathElement> buffer;
                            NoCounters counters;
                            for (std::size_t i = begin; i < end; ++i) {
                              std::span<double> phi(out.phi.data() + i * out.cols,
                                                    out.cols);
                              for (const auto& tree : e.trees) {
                                baseline::ShapOriginal(batch.row(i), tree, phi,
                                                       buffer, counters);
                              }
                            }
                          });
      break;
    case Algorithm::kV1:
      detail::ParallelFor(batch.rows(), options.workers,
                          [&](std::size_t begin, std::size_t end) {
                            fastv1::Workspace ws;
                            NoCounters counters;
                            for (std::size_t i = begin; i < end; ++i) {
                              std::span<double> phi(out.phi.data() + i * out.cols,
                                                    out.cols);
                              for (const auto& tree : e.trees) {
                                fastv1::ShapV1(batch.row(i), tree, phi, ws,
                                               counters);
                              }
                            }
                          });
      break;
    case Algorithm::kV2: {
      if (options.choice.cache_path) {
        const auto tables = cache::LoadCacheFor(e, *options.choice.cache_path);
        detail::ScoreRange(e, batch, tables, 0, e.trees.size(), options.workers,
                           out);
      } else if (Estimate(e).per_tree_bytes <= options.budget_bytes) {
        const auto tables = PrepAll(e, options.workers);
        detail::ScoreRange(e, batch, tables, 0, e.trees.size(), options.workers,
                           out);
      } else {
        // Stream: one table alive at a time.
        for (std::size_t t = 0; t < e.trees.size(); ++t) {
          const fastv2::PrepTable table =
              fastv2::Prep(e.trees[t], options.budget_bytes);
          detail::ScoreRange(e, batch, std::span(&table, 1), t, t + 1,
                             options.workers, out);
        }
      }
      break;
    }
    case Algorithm::kAuto:
      break;
  }
  return out;
}

inline void WriteAttributionCsv(std::ostream& os, const Attribution& a) {
  for (std::size_t j = 0; j < a.cols; ++j) os << "phi_" << j << ',';
  os << "base\n";
  char buf[32];
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,", a.phi[i * a.cols + j]);
      os << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g\n", a.base_values[i]);
    os << buf;
  }
}

}  // namespace fasttreeshap

#endif  // FASTTREESHAP_EXPLAINER_HPP_
