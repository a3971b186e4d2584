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

// fts: command-line front end.
//
//   fts explain  --model m.json --data x.csv --out phi.csv [--algorithm A]
//                [--cache s.bin] [--workers N] [--budget BYTES]
//   fts prep     --model m.json --cache s.bin [--workers N] [--budget BYTES]
//   fts bench    --model m.json --data x.csv [--out report.json]
//                [--algorithm A] [--repeats R] [--workers N]
//   fts validate --model m.json
//   fts estimate --model m.json [--data x.csv] [--budget BYTES]
//   fts selftest [--seed S]
//
// Exit codes: 0 success, 1 usage error, 2 validation or I/O error, 3
// self-test deviation above the gate.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fasttreeshap/fasttreeshap.hpp"

namespace fts = fasttreeshap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitDeviation = 3;

struct Config {
  std::string model;
  std::string data;
  std::string out;
  std::string algorithm = "auto";
  std::string cache;
  int workers = 1;
  int repeats = 5;
  std::size_t budget = fts::kDefaultBudgetBytes;
  std::uint64_t seed = 7;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fts::Algorithm ParseAlgorithmFlag(const std::string& name) {
  const auto a = fts::ParseAlgorithm(name);
  if (!a) throw UsageError("unknown algorithm '" + name + "'");
  return *a;
}

fts::SampleBatch LoadData(const Config& cfg, const fts::Ensemble& model) {
  return fts::LoadSamples(cfg.data, static_cast<std::size_t>(model.num_features));
}

int RunExplain(const Config& cfg) {
  const fts::Ensemble model = fts::LoadModel(cfg.model);
  const fts::SampleBatch batch = LoadData(cfg, model);
  fts::ExplainOptions opt;
  opt.choice.algorithm = ParseAlgorithmFlag(cfg.algorithm);
  if (!cfg.cache.empty()) {
    if (opt.choice.algorithm != fts::Algorithm::kV2 &&
        opt.choice.algorithm != fts::Algorithm::kAuto) {
      throw UsageError("--cache only applies to --algorithm v2");
    }
    opt.choice.cache_path = cfg.cache;
  }
  opt.workers = cfg.workers;
  opt.budget_bytes = cfg.budget;
  const fts::Attribution out = fts::Explain(model, batch, opt);
  if (opt.choice.algorithm == fts::Algorithm::kAuto) {
    std::fprintf(stderr,
                 "algorithm auto resolved to %s (M=%zu, D=%d, v2 from M=%zu)\n",
                 std::string(fts::AlgorithmName(out.algorithm)).c_str(),
                 batch.rows(), model.max_depth,
                 fts::V2SampleThreshold(model.max_depth));
  }
  std::ofstream os(cfg.out, std::ios::binary);
  if (!os) throw fts::IoError("cannot write " + cfg.out);
  fts::WriteAttributionCsv(os, out);
  if (!os) throw fts::IoError("write failed for " + cfg.out);
  return kExitOk;
}

int RunPrep(const Config& cfg) {
  const fts::Ensemble model = fts::LoadModel(cfg.model);
  const fts::MemoryEstimate est = fts::Estimate(model);
  if (est.per_tree_bytes > cfg.budget) {
    throw fts::BudgetError("tables need " + std::to_string(est.per_tree_bytes) +
                           " bytes, over the budget of " +
                           std::to_string(cfg.budget) +
                           "; use the v1 algorithm");
  }
  const auto tables = fts::PrepAll(model, cfg.workers, cfg.budget);
  fts::cache::SaveCache(tables, fts::cache::ModelDigest(model), cfg.cache);
  std::printf("wrote %zu tables (%zu bytes of weights) to %s\n", tables.size(),
              est.per_tree_bytes, cfg.cache.c_str());
  return kExitOk;
}

int RunBenchCommand(const Config& cfg) {
  const fts::Ensemble model = fts::LoadModel(cfg.model);
  const fts::SampleBatch batch = LoadData(cfg, model);
  fts::bench::BenchOptions opt;
  const fts::Algorithm only = ParseAlgorithmFlag(cfg.algorithm);
  if (only != fts::Algorithm::kAuto) {
    opt.original = only == fts::Algorithm::kOriginal;
    opt.v1 = only == fts::Algorithm::kV1;
    opt.v2 = only == fts::Algorithm::kV2;
  }
  opt.repeats = cfg.repeats;
  opt.workers = cfg.workers;
  const fts::bench::BenchReport report = fts::bench::RunBench(model, batch, opt);
  std::fputs(fts::bench::FormatReport(report).c_str(), stdout);
  if (!cfg.out.empty()) {
    std::ofstream os(cfg.out, std::ios::binary);
    if (!os) throw fts::IoError("cannot write " + cfg.out);
    os << nlohmann::json(report).dump(2) << "\n";
  }
  return kExitOk;
}

int RunValidate(const Config& cfg) {
  const fts::Ensemble model = fts::ParseModel(fts::ReadFile(cfg.model));
  const fts::ValidationReport report = fts::Validate(model);
  if (report.ok()) {
    std::printf("ok: %zu trees, %d features, max depth %d, max leaves %d\n",
                model.trees.size(), model.num_features, model.max_depth,
                model.max_leaves);
    return kExitOk;
  }
  std::fputs(report.ToString().c_str(), stdout);
  return kExitInput;
}

int RunEstimate(const Config& cfg) {
  const fts::Ensemble model = fts::LoadModel(cfg.model);
  const fts::MemoryEstimate est = fts::Estimate(model);
  std::printf("trees: %zu\nmax depth: %d\nmax leaves: %d\n", model.trees.size(),
              model.max_depth, model.max_leaves);
  std::printf("table bytes (per-tree widths): %zu\n", est.per_tree_bytes);
  std::printf("table bytes (global bound): %zu\n", est.global_bound_bytes);
  std::printf("largest single table: %zu\n", est.largest_table_bytes);
  const std::size_t threshold = fts::V2SampleThreshold(model.max_depth);
  if (model.max_depth > 0) {
    std::printf("v2 preferred from M >= %zu samples\n", threshold);
  } else {
    std::printf("v2 never preferred (depth 0)\n");
  }
  if (!cfg.data.empty()) {
    const fts::SampleBatch batch = LoadData(cfg, model);
    std::printf("auto resolves to %s for M=%zu\n",
                std::string(fts::AlgorithmName(
                                fts::AutoSelect(model, batch.rows(), cfg.budget)))
                    .c_str(),
                batch.rows());
  }
  return kExitOk;
}

int RunSelftest(const Config& cfg) {
  fts::selftest::Options opt;
  opt.seed = cfg.seed;
  const fts::selftest::Report r = fts::selftest::Run(opt);
  std::printf("seed %llu: %d trees (%d with repeated features), %llu cases\n",
              static_cast<unsigned long long>(cfg.seed), r.trees,
              r.trees_with_repeated_features,
              static_cast<unsigned long long>(r.cases));
  for (int k = 0; k < fts::selftest::kCount; ++k) {
    std::printf("  %-18s max deviation %.3e\n", fts::selftest::kEvaluatorNames[k],
                r.max_deviation[k]);
  }
  std::printf("  local accuracy     max error     %.3e\n",
              r.max_local_accuracy_error);
  std::printf("max deviation %.3e (gate %.0e): %s\n", r.worst(),
              fts::selftest::kGate, r.passed() ? "pass" : "FAIL");
  return r.passed() ? kExitOk : kExitDeviation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree-ensemble SHAP values: original, v1 and v2 algorithms"};
  app.require_subcommand(1);
  Config cfg;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "model JSON")->required();
  };
  auto add_workers = [&](CLI::App* sub) {
    sub->add_option("--workers", cfg.workers, "worker threads")
        ->envname("FTS_WORKERS")
        ->check(CLI::PositiveNumber);
  };
  auto add_budget = [&](CLI::App* sub) {
    sub->add_option("--budget", cfg.budget, "table memory budget in bytes");
  };
  auto add_algorithm = [&](CLI::App* sub) {
    sub->add_option("--algorithm", cfg.algorithm, "original, v1, v2 or auto")
        ->check(CLI::IsMember({"original", "v1", "v2", "auto"}));
  };

  auto* explain = app.add_subcommand("explain", "write SHAP values as CSV");
  add_model(explain);
  explain->add_option("--data", cfg.data, "headerless sample CSV")->required();
  explain->add_option("--out", cfg.out, "output CSV")->required();
  add_algorithm(explain);
  explain->add_option("--cache", cfg.cache, "v2 table cache to load");
  add_workers(explain);
  add_budget(explain);

  auto* prep = app.add_subcommand("prep", "build and save v2 tables");
  add_model(prep);
  prep->add_option("--cache", cfg.cache, "cache file to write")->required();
  add_workers(prep);
  add_budget(prep);

  auto* bench = app.add_subcommand("bench", "time the algorithms");
  add_model(bench);
  bench->add_option("--data", cfg.data, "headerless sample CSV")->required();
  bench->add_option("--out", cfg.out, "JSON report");
  add_algorithm(bench);
  bench->add_option("--repeats", cfg.repeats, "measured runs")
      ->check(CLI::PositiveNumber);
  add_workers(bench);

  auto* validate = app.add_subcommand("validate", "check model invariants");
  add_model(validate);

  auto* estimate = app.add_subcommand("estimate", "report table memory");
  add_model(estimate);
  estimate->add_option("--data", cfg.data, "sample CSV for auto resolution");
  add_budget(estimate);

  auto* selftest = app.add_subcommand("selftest", "oracle equivalence suite");
  selftest->add_option("--seed", cfg.seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*explain) return RunExplain(cfg);
    if (*prep) return RunPrep(cfg);
    if (*bench) return RunBenchCommand(cfg);
    if (*validate) return RunValidate(cfg);
    if (*estimate) return RunEstimate(cfg);
    if (*selftest) return RunSelftest(cfg);
  } catch (const UsageError& err) {
    std::fprintf(stderr, "usage error: %s\n", err.what());
    return kExitUsage;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitInput;
  }
  return kExitUsage;
}
