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

// Timing and work-count harness comparing the three algorithms on one
// model and batch.
//
// Each algorithm runs once unmeasured, then `repeats` measured times on a
// monotonic clock. v2 is timed as two phases: Prep (table construction
// only) and Score (all samples against prebuilt tables). Speedups are
// ratios of means.

#ifndef FASTTREESHAP_BENCH_HPP_
#define FASTTREESHAP_BENCH_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "fasttreeshap/baseline.hpp"
#include "fasttreeshap/counters.hpp"
#include "fasttreeshap/explainer.hpp"
#include "fasttreeshap/fastv1.hpp"
#include "fasttreeshap/fastv2.hpp"
#include "fasttreeshap/model.hpp"
#include "json.hpp"

namespace fasttreeshap::bench {

struct TimingStats {
  std::vector<double> runs;  // seconds
  double mean = 0.0;
  // Sample standard deviation; zero with fewer than two runs.
  double sd = 0.0;

  bool operator==(const TimingStats&) const = default;
};

inline TimingStats Summarize(std::vector<double> runs) {
  TimingStats s;
  s.runs = std::move(runs);
  if (s.runs.empty()) return s;
  double total = 0.0;
  for (double r : s.runs) total += r;
  s.mean = total / s.runs.size();
  if (s.runs.size() >= 2) {
    double sq = 0.0;
    for (double r : s.runs) sq += (r - s.mean) * (r - s.mean);
    s.sd = std::sqrt(sq / (s.runs.size() - 1));
  }
  return s;
}

struct BenchOptions {
  bool original = true;
  bool v1 = true;
  bool v2 = true;
  int repeats = 5;
  int workers = 1;
  bool warmup = true;
};

struct BenchReport {
  std::size_t samples = 0;
  std::size_t trees = 0;
  int max_depth = 0;
  int repeats = 0;
  int workers = 1;
  std::optional<TimingStats> original;
  std::optional<TimingStats> v1;
  std::optional<TimingStats> v2_prep;
  std::optional<TimingStats> v2_score;
  // Per-run prep + score.
  std::optional<TimingStats> v2_total;
  std::size_t estimate_per_tree_bytes = 0;
  std::size_t estimate_global_bytes = 0;
  // Largest element-wise |phi_a - phi_b| over every pair of algorithms run.
  double max_deviation = 0.0;
  std::string machine_note;

  // mean(original) / mean(other); nullopt unless both were run.
  std::optional<double> Speedup(const std::optional<TimingStats>& other) const {
    if (!original || !other || other->mean <= 0.0) return std::nullopt;
    return original->mean / other->mean;
  }

  bool operator==(const BenchReport&) const = default;
};

namespace detail {

using Clock = std::chrono::steady_clock;

template <class Fn>
TimingStats Time(int repeats, bool warmup, Fn&& fn) {
  if (warmup) fn();
  std::vector<double> runs;
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    fn();
    runs.push_back(std::chrono::duration<double>(Clock::now() - start).count());
  }
  return Summarize(std::move(runs));
}

inline double MaxDeviation(const Attribution& a, const Attribution& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.phi.size(); ++i) {
    worst = std::max(worst, std::abs(a.phi[i] - b.phi[i]));
  }
  return worst;
}

inline std::string MachineNote() {
  return "hardware_concurrency=" +
         std::to_string(std::thread::hardware_concurrency());
}

}  // namespace detail

inline BenchReport RunBench(const Ensemble& e, const SampleBatch& batch,
                            const BenchOptions& opt = {}) {
  BenchReport report;
  report.samples = batch.rows();
  report.trees = e.trees.size();
  report.max_depth = e.max_depth;
  report.repeats = opt.repeats;
  report.workers = opt.workers;
  const MemoryEstimate estimate = Estimate(e);
  report.estimate_per_tree_bytes = estimate.per_tree_bytes;
  report.estimate_global_bytes = estimate.global_bound_bytes;
  report.machine_note = detail::MachineNote();

  std::vector<Attribution> outputs;
  auto run = [&](Algorithm a) {
    ExplainOptions eo;
    eo.choice.algorithm = a;
    eo.workers = opt.workers;
    Attribution out;
    auto stats = detail::Time(opt.repeats, opt.warmup,
                              [&] { out = Explain(e, batch, eo); });
    outputs.push_back(std::move(out));
    return stats;
  };
  if (opt.original) report.original = run(Algorithm::kOriginal);
  if (opt.v1) report.v1 = run(Algorithm::kV1);
  if (opt.v2) {
    std::vector<fastv2::PrepTable> tables;
    report.v2_prep = detail::Time(opt.repeats, opt.warmup,
                                  [&] { tables = PrepAll(e, opt.workers); });
    Attribution out;
    report.v2_score = detail::Time(opt.repeats, opt.warmup, [&] {
      out = ExplainWithTables(e, batch, tables, opt.workers);
    });
    std::vector<double> totals;
    for (std::size_t r = 0; r < report.v2_prep->runs.size(); ++r) {
      totals.push_back(report.v2_prep->runs[r] + report.v2_score->runs[r]);
    }
    report.v2_total = Summarize(std::move(totals));
    outputs.push_back(std::move(out));
  }
  for (std::size_t a = 0; a < outputs.size(); ++a) {
    for (std::size_t b = a + 1; b < outputs.size(); ++b) {
      report.max_deviation = std::max(
          report.max_deviation, detail::MaxDeviation(outputs[a], outputs[b]));
    }
  }
  return report;
}

inline void to_json(nlohmann::json& j, const TimingStats& s) {
  j = {{"runs", s.runs}, {"mean", s.mean}, {"sd", s.sd}};
}

inline void from_json(const nlohmann::json& j, TimingStats& s) {
  j.at("runs").get_to(s.runs);
  j.at("mean").get_to(s.mean);
  j.at("sd").get_to(s.sd);
}

inline void to_json(nlohmann::json& j, const BenchReport& r) {
  j = {{"samples", r.samples},
       {"trees", r.trees},
       {"max_depth", r.max_depth},
       {"repeats", r.repeats},
       {"workers", r.workers},
       {"estimate_per_tree_bytes", r.estimate_per_tree_bytes},
       {"estimate_global_bytes", r.estimate_global_bytes},
       {"max_deviation", r.max_deviation},
       {"machine_note", r.machine_note}};
  auto put = [&](const char* key, const std::optional<TimingStats>& s) {
    if (s) j[key] = *s;
  };
  put("original", r.original);
  put("v1", r.v1);
  put("v2_prep", r.v2_prep);
  put("v2_score", r.v2_score);
  put("v2_total", r.v2_total);
  nlohmann::json speedup = nlohmann::json::object();
  if (auto s = r.Speedup(r.v1)) speedup["v1"] = *s;
  if (auto s = r.Speedup(r.v2_score)) speedup["v2_score"] = *s;
  if (auto s = r.Speedup(r.v2_total)) speedup["v2_total"] = *s;
  j["speedup"] = speedup;
}

inline void from_json(const nlohmann::json& j, BenchReport& r) {
  j.at("samples").get_to(r.samples);
  j.at("trees").get_to(r.trees);
  j.at("max_depth").get_to(r.max_depth);
  j.at("repeats").get_to(r.repeats);
  j.at("workers").get_to(r.workers);
  j.at("estimate_per_tree_bytes").get_to(r.estimate_per_tree_bytes);
  j.at("estimate_global_bytes").get_to(r.estimate_global_bytes);
  j.at("max_deviation").get_to(r.max_deviation);
  j.at("machine_note").get_to(r.machine_note);
  auto get = [&](const char* key, std::optional<TimingStats>& s) {
    if (j.contains(key)) {
      s = j.at(key).get<TimingStats>();
    } else {
      s.reset();
    }
  };
  get("original", r.original);
  get("v1", r.v1);
  get("v2_prep", r.v2_prep);
  get("v2_score", r.v2_score);
  get("v2_total", r.v2_total);
}

// Plain-text table: one row per algorithm or phase, mean (sd) and speedup.
inline std::string FormatReport(const BenchReport& r) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line),
                "%zu samples, %zu trees, depth %d, %d repeats, %d worker(s)\n",
                r.samples, r.trees, r.max_depth, r.repeats, r.workers);
  out += line;
  std::snprintf(line, sizeof(line), "%-12s %22s %9s\n", "algorithm",
                "seconds mean (sd)", "speedup");
  out += line;
  auto row = [&](const char* name, const std::optional<TimingStats>& s) {
    if (!s) return;
    const auto speedup = r.Speedup(s);
    char sp[16] = "-";
    if (speedup) std::snprintf(sp, sizeof(sp), "%.2fx", *speedup);
    std::snprintf(line, sizeof(line), "%-12s %11.4f (%8.4f) %9s\n", name,
                  s->mean, s->sd, sp);
    out += line;
  };
  row("original", r.original);
  row("v1", r.v1);
  row("v2 prep", r.v2_prep);
  row("v2 score", r.v2_score);
  row("v2 total", r.v2_total);
  std::snprintf(line, sizeof(line),
                "table bytes: %zu per-tree, %zu global bound\n"
                "max deviation: %.3g\n",
                r.estimate_per_tree_bytes, r.estimate_global_bytes,
                r.max_deviation);
  out += line;
  return out;
}

struct IterationReport {
  WorkCounters original;
  WorkCounters v1;
  WorkCounters v2_score;
  // Sum over samples of sum over leaves of the number of distinct path
  // features; the expected count of original leaf unwinds and of v2 lookups.
  std::uint64_t path_feature_visits = 0;

  double v1_ratio() const {
    const auto base = original.path_iterations();
    return base == 0 ? 0.0
                     : static_cast<double>(v1.path_iterations()) / base;
  }
};

inline std::uint64_t PathFeatureCount(const TreeModel& tree) {
  std::uint64_t total = 0;
  std::vector<int> path;
  auto recurse = [&](auto&& self, int node) -> void {
    if (tree.is_leaf(node)) {
      std::vector<int> unique = path;
      std::sort(unique.begin(), unique.end());
      total += std::unique(unique.begin(), unique.end()) - unique.begin();
      return;
    }
    path.push_back(tree.features[node]);
    self(self, tree.left[node]);
    self(self, tree.right[node]);
    path.pop_back();
  };
  recurse(recurse, 0);
  return total;
}

// Counts inner-loop work of each algorithm over the whole batch.
inline IterationReport IterationCounters(const Ensemble& e,
                                         const SampleBatch& batch) {
  CheckWidth(e, batch.cols());
  IterationReport report;
  std::vector<fastv2::PrepTable> tables;
  for (const auto& tree : e.trees) tables.push_back(fastv2::Prep(tree));
  std::uint64_t per_sample = 0;
  for (const auto& tree : e.trees) per_sample += PathFeatureCount(tree);
  report.path_feature_visits = per_sample * batch.rows();

  std::vector<double> phi(batch.cols());
  std::vector<baseline::PathElement> buffer;
  fastv1::Workspace v1_ws;
  fastv2::ScoreWorkspace v2_ws;
  for (std::size_t i = 0; i < batch.rows(); ++i) {
    for (std::size_t t = 0; t < e.trees.size(); ++t) {
      baseline::ShapOriginal(batch.row(i), e.trees[t], phi, buffer,
                             report.original);
      fastv1::ShapV1(batch.row(i), e.trees[t], phi, v1_ws, report.v1);
      fastv2::Score(batch.row(i), e.trees[t], tables[t], phi, v2_ws,
                    report.v2_score);
    }
  }
  return report;
}

}  // namespace fasttreeshap::bench

#endif  // FASTTREESHAP_BENCH_HPP_
