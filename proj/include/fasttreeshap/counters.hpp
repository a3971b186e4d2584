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

// Work-counting policies for the SHAP kernels. Kernels are templates over a
// counter type; `NoCounters` compiles every hook away, `WorkCounters` tallies
// inner-loop iterations so the relative work of the algorithms can be
// compared independently of wall-clock noise.

#ifndef FASTTREESHAP_COUNTERS_HPP_
#define FASTTREESHAP_COUNTERS_HPP_

#include <cstdint>

namespace fasttreeshap {

struct NoCounters {
  void extend_step() {}
  void unwind_step() {}
  void leaf_unwind() {}
  void table_lookup() {}
  void full_subset_read() {}
  void prep_step() {}
};

struct WorkCounters {
  // Iterations of the weight-update loops inside EXTEND.
  std::uint64_t extend_iterations = 0;
  // Iterations of the weight-update loops inside UNWIND (including the
  // sum-only unwinds performed at leaves).
  std::uint64_t unwind_iterations = 0;
  // UNWIND calls made at leaves to obtain per-feature weight sums.
  std::uint64_t leaf_unwinds = 0;
  // Reads of the precomputed table during Score.
  std::uint64_t table_lookups = 0;
  // Reads of the full-subset column; must stay zero.
  std::uint64_t full_subset_reads = 0;
  // Inner-loop iterations of table construction.
  std::uint64_t prep_iterations = 0;

  void extend_step() { ++extend_iterations; }
  void unwind_step() { ++unwind_iterations; }
  void leaf_unwind() { ++leaf_unwinds; }
  void table_lookup() { ++table_lookups; }
  void full_subset_read() { ++full_subset_reads; }
  void prep_step() { ++prep_iterations; }

  std::uint64_t path_iterations() const {
    return extend_iterations + unwind_iterations;
  }

  WorkCounters& operator+=(const WorkCounters& o) {
    extend_iterations += o.extend_iterations;
    unwind_iterations += o.unwind_iterations;
    leaf_unwinds += o.leaf_unwinds;
    table_lookups += o.table_lookups;
    full_subset_reads += o.full_subset_reads;
    prep_iterations += o.prep_iterations;
    return *this;
  }
};

}  // namespace fasttreeshap

#endif  // FASTTREESHAP_COUNTERS_HPP_
