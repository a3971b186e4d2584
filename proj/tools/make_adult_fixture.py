#!/usr/bin/env python3
# Copyright 2026 The FastTreeSHAP Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Builds the Adult random-forest fixture used by the acceptance run.

Trains a 100-tree, depth-8 scikit-learn random forest on the one-hot
encoded UCI Adult census data and writes:

  adult_med.json        the forest in the engine's model format
  adult_samples.csv     10,000 headerless sample rows

Leaf values are the positive-class probability divided by the tree count,
so the ensemble output equals predict_proba[:, 1]. Covers are the weighted
training-sample counts (bootstrap multiplicities). scikit-learn sends
x <= threshold left, the same rule as the engine.

The Adult table (48,842 rows, 15 columns) can be given as a CSV or a
parquet file, e.g. the copy bundled with pytorch-widedeep
(pytorch_widedeep/datasets/data/adult.parquet.brotli).
"""

import argparse
import json
import sys

import numpy as np
import pandas as pd
from sklearn.ensemble import RandomForestClassifier

CATEGORICAL = [
    "workclass", "education", "marital-status", "occupation", "relationship",
    "race", "gender", "native-country",
]
TARGET = "income"


def load(path):
    if path.endswith(".csv"):
        return pd.read_csv(path, skipinitialspace=True)
    return pd.read_parquet(path)


def encode(frame):
    y = frame[TARGET].str.strip().str.rstrip(".").eq(">50K").astype(int)
    x = pd.get_dummies(frame.drop(columns=[TARGET]), columns=CATEGORICAL,
                       dtype=np.float64)
    return x.astype(np.float64), y.to_numpy()


def export_tree(estimator, num_trees):
    t = estimator.tree_
    value = t.value[:, 0, :]
    prob = value[:, 1] / value.sum(axis=1)
    leaf = t.children_left == -1
    return {
        "children_left": t.children_left.astype(int).tolist(),
        "children_right": t.children_right.astype(int).tolist(),
        "feature": np.where(leaf, -1, t.feature).astype(int).tolist(),
        "threshold": np.where(leaf, 0.0, t.threshold).tolist(),
        "cover": t.weighted_n_node_samples.astype(float).tolist(),
        "value": np.where(leaf, prob / num_trees, 0.0).tolist(),
    }


def predict(model, x):
    out = np.full(len(x), model["base_offset"])
    for tree in model["trees"]:
        for i, row in enumerate(x):
            node = 0
            while tree["children_left"][node] != -1:
                go_left = row[tree["feature"][node]] <= tree["threshold"][node]
                node = tree["children_left" if go_left else "children_right"][node]
            out[i] += tree["value"][node]
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--adult", required=True, help="Adult CSV or parquet")
    parser.add_argument("--model-out", default="adult_med.json")
    parser.add_argument("--samples-out", default="adult_samples.csv")
    parser.add_argument("--samples", type=int, default=10000)
    parser.add_argument("--trees", type=int, default=100)
    parser.add_argument("--depth", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    x, y = encode(load(args.adult))
    forest = RandomForestClassifier(n_estimators=args.trees,
                                    max_depth=args.depth,
                                    random_state=args.seed, n_jobs=1)
    forest.fit(x.to_numpy(), y)

    model = {
        "num_features": int(x.shape[1]),
        "base_offset": 0.0,
        "trees": [export_tree(e, args.trees) for e in forest.estimators_],
    }
    with open(args.model_out, "w") as f:
        json.dump(model, f, separators=(",", ":"))

    rng = np.random.default_rng(args.seed)
    rows = rng.choice(len(x), size=args.samples, replace=False)
    samples = x.to_numpy()[rows]
    np.savetxt(args.samples_out, samples, delimiter=",", fmt="%.17g")

    check = samples[:1000]
    delta = np.max(np.abs(predict(model, check) -
                          forest.predict_proba(check)[:, 1]))
    leaves = sum(len([c for c in t["children_left"] if c == -1])
                 for t in model["trees"])
    print(f"features={x.shape[1]} trees={args.trees} leaves={leaves} "
          f"max|delta prediction| on 1000 rows={delta:.3g}")
    return 0 if delta <= 1e-6 else 1


if __name__ == "__main__":
    sys.exit(main())
