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

// Convenience header pulling in the whole library.

#ifndef FASTTREESHAP_FASTTREESHAP_HPP_
#define FASTTREESHAP_FASTTREESHAP_HPP_

#include "fasttreeshap/baseline.hpp"
#include "fasttreeshap/bench.hpp"
#include "fasttreeshap/cache.hpp"
#include "fasttreeshap/counters.hpp"
#include "fasttreeshap/error.hpp"
#include "fasttreeshap/explainer.hpp"
#include "fasttreeshap/fastv1.hpp"
#include "fasttreeshap/fastv2.hpp"
#include "fasttreeshap/model.hpp"
#include "fasttreeshap/oracle.hpp"
#include "fasttreeshap/random_tree.hpp"
#include "fasttreeshap/selftest.hpp"

#endif  // FASTTREESHAP_FASTTREESHAP_HPP_
