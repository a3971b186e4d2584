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

// Fast TreeSHAP v1.
//
// The weight sequence `w` only tracks subset sizes drawn from features whose
// thresholds the sample satisfies; w[m] is the Shapley-weighted sum, over
// size-m subsets of the satisfied features, of the covering-ratio product of
// the satisfied features left out. Features the sample fails only rescale
// `w` (the Shapley weight still depends on the full path length) and fold
// their covering ratio into the scalar `q`.

#ifndef FASTTREESHAP_FASTV1_HPP_
#define FASTTREESHAP_FASTV1_HPP_

#include <algorithm>
#include <span>
#include <vector>

#include "fasttreeshap/counters.hpp"
#include "fasttreeshap/model.hpp"

namespace fasttreeshap::fastv1 {

struct PathRecord {
  int feature = -1;
  double zero_fraction = 1.0;  // covering ratio z
  bool one = true;             // threshold condition o

  bool operator==(const PathRecord&) const = default;
};

// Value-semantic view of the recursion state; m[0] is the dummy record.
struct V1PathState {
  std::vector<PathRecord> m;
  std::vector<double> w;
  double q = 1.0;
};

namespace detail {

// In-place kernels. `m` holds `lm` records and `w` holds `lw` weights; both
// buffers must have room for one more entry.

template <class Counters>
void Extend(PathRecord* m, int& lm, double* w, int& lw, double& q,
            double zero_fraction, bool one, int feature, Counters& counters) {
  const int l = lm;
  m[lm++] = {feature, zero_fraction, one};
  if (!one) {
    q *= zero_fraction;
    for (int i = lw - 1; i >= 0; --i) {
      w[i] = w[i] * (l - i) / (l + 1);
      counters.extend_step();
    }
    return;
  }
  w[lw] = lw == 0 ? 1.0 : 0.0;
  for (int i = lw - 1; i >= 0; --i) {
    w[i + 1] += w[i] * (i + 1) / (l + 1);
    w[i] = zero_fraction * w[i] * (l - i) / (l + 1);
    counters.extend_step();
  }
  ++lw;
}

// Removes m[index] (index >= 1) and its contribution to w and q.
template <class Counters>
void Unwind(PathRecord* m, int& lm, double* w, int& lw, double& q, int index,
            Counters& counters) {
  const int l = lm - 1;
  const PathRecord removed = m[index];
  if (!removed.one) {
    for (int j = lw - 1; j >= 0; --j) {
      w[j] = w[j] * (l + 1) / (l - j);
      counters.unwind_step();
    }
    q /= removed.zero_fraction;
  } else {
    const int top = lw - 1;
    double n = w[top];
    for (int j = top - 1; j >= 0; --j) {
      const double t = w[j];
      w[j] = n * (l + 1) / (j + 1);
      n = t - w[j] * removed.zero_fraction * (l - j) / (l + 1);
      counters.unwind_step();
    }
    --lw;
  }
  std::copy(m + index + 1, m + lm, m + index);
  --lm;
}

// sum(UNWIND(-1).w): the weights reweighted by (l+1)/(l-j) with the path
// left intact. Requires lm > lw.
template <class Counters>
double ReweightedSum(int lm, const double* w, int lw, Counters& counters) {
  const int l = lm - 1;
  double total = 0.0;
  for (int j = lw - 1; j >= 0; --j) {
    total += w[j] * (l + 1) / (l - j);
    counters.unwind_step();
  }
  return total;
}

// sum(UNWIND(index).w) for a satisfied feature, without mutating.
template <class Counters>
double UnwoundSum(const PathRecord* m, int lm, const double* w, int lw,
                  int index, Counters& counters) {
  const int l = lm - 1;
  const double z = m[index].zero_fraction;
  const int top = lw - 1;
  double n = w[top];
  double total = 0.0;
  for (int j = top - 1; j >= 0; --j) {
    const double wj = n * (l + 1) / (j + 1);
    total += wj;
    n = w[j] - wj * z * (l - j) / (l + 1);
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
  PathRecord* m_buffer;
  double* w_buffer;
  int stride;  // per-level slot count (max path length + 1)

  void Run(int node, int level, const PathRecord* parent_m, int parent_lm,
           const double* parent_w, int parent_lw, double q,
           double zero_fraction, bool one, int feature) {
    PathRecord* m = m_buffer + static_cast<std::size_t>(level) * stride;
    double* w = w_buffer + static_cast<std::size_t>(level) * stride;
    std::copy(parent_m, parent_m + parent_lm, m);
    std::copy(parent_w, parent_w + parent_lw, w);
    int lm = parent_lm;
    int lw = parent_lw;
    Extend(m, lm, w, lw, q, zero_fraction, one, feature, counters);

    if (tree.is_leaf(node)) {
      const double value = tree.values[node];
      double s0 = 0.0;
      if (lm > lw) s0 = -ReweightedSum(lm, w, lw, counters);
      for (int i = 1; i < lm; ++i) {
        if (!m[i].one) {
          phi[m[i].feature] += s0 * q * value;
        } else {
          counters.leaf_unwind();
          const double s = UnwoundSum(m, lm, w, lw, i, counters);
          phi[m[i].feature] += s * q * (1.0 - m[i].zero_fraction) * value;
        }
      }
      return;
    }

    const int split = tree.features[node];
    const int hot = tree.next(node, x);
    const int cold = hot == tree.left[node] ? tree.right[node] : tree.left[node];
    double incoming_zero = 1.0;
    bool incoming_one = true;
    int k = 1;
    while (k < lm && m[k].feature != split) ++k;
    if (k < lm) {
      incoming_zero = m[k].zero_fraction;
      incoming_one = m[k].one;
      Unwind(m, lm, w, lw, q, k, counters);
    }
    const double cover = tree.covers[node];
    Run(hot, level + 1, m, lm, w, lw, q,
        incoming_zero * tree.covers[hot] / cover, incoming_one, split);
    Run(cold, level + 1, m, lm, w, lw, q,
        incoming_zero * tree.covers[cold] / cover, false, split);
  }
};

}  // namespace detail

// Reusable scratch for ShapV1; grows to fit the deepest tree seen.
struct Workspace {
  std::vector<PathRecord> m;
  std::vector<double> w;

  int Reserve(int max_depth) {
    const int stride = max_depth + 2;
    const std::size_t size =
        static_cast<std::size_t>(stride) * static_cast<std::size_t>(max_depth + 1);
    if (m.size() < size) {
      m.resize(size);
      w.resize(size);
    }
    return stride;
  }
};

// Appends (feature, z, o) to a copy of `state`.
inline V1PathState V1Extend(V1PathState state, double zero_fraction, bool one,
                            int feature) {
  int lm = static_cast<int>(state.m.size());
  int lw = static_cast<int>(state.w.size());
  state.m.resize(lm + 1);
  state.w.resize(lw + 1);
  NoCounters counters;
  detail::Extend(state.m.data(), lm, state.w.data(), lw, state.q, zero_fraction,
                 one, feature, counters);
  state.m.resize(lm);
  state.w.resize(lw);
  return state;
}

// Removes path record `index` (>= 1) from a copy of `state`.
inline V1PathState V1Unwind(V1PathState state, int index) {
  int lm = static_cast<int>(state.m.size());
  int lw = static_cast<int>(state.w.size());
  NoCounters counters;
  detail::Unwind(state.m.data(), lm, state.w.data(), lw, state.q, index,
                 counters);
  state.m.resize(lm);
  state.w.resize(lw);
  return state;
}

// The w sequence of UNWIND(-1): every entry scaled by (l+1)/(l-j), m and q
// untouched. Requires len(m) > len(w).
inline std::vector<double> V1UnwindReweighted(const V1PathState& state) {
  const int l = static_cast<int>(state.m.size()) - 1;
  std::vector<double> w = state.w;
  for (int j = static_cast<int>(w.size()) - 1; j >= 0; --j) {
    w[j] = w[j] * (l + 1) / (l - j);
  }
  return w;
}

// Adds this tree's SHAP contributions for `x` into `phi`.
template <class Counters = NoCounters>
void ShapV1(std::span<const double> x, const TreeModel& tree,
            std::span<double> phi, Workspace& workspace, Counters& counters) {
  const int stride = workspace.Reserve(tree.max_depth);
  detail::Recursion<Counters> rec{tree,
                                  x,
                                  phi,
                                  counters,
                                  workspace.m.data(),
                                  workspace.w.data(),
                                  stride};
  rec.Run(0, 0, nullptr, 0, nullptr, 0, 1.0, 1.0, true, -1);
}

inline void ShapV1(std::span<const double> x, const TreeModel& tree,
                   std::span<double> phi) {
  Workspace workspace;
  NoCounters counters;
  ShapV1(x, tree, phi, workspace, counters);
}

}  // namespace fasttreeshap::fastv1

#endif  // FASTTREESHAP_FASTV1_HPP_
