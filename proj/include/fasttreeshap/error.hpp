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

#ifndef FASTTREESHAP_ERROR_HPP_
#define FASTTREESHAP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fasttreeshap {

// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (model JSON, sample CSV).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A structurally readable model that violates a tree invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Feature vector or batch width does not match the model.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An exponential reference evaluator was asked for too many features.
class GuardError : public Error {
 public:
  using Error::Error;
};

// Precomputed tables would not fit the configured memory budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CacheError : public Error {
 public:
  enum class Kind {
    kIo,
    kBadMagic,
    kVersionMismatch,
    kDigestMismatch,
    kTruncated,
    kModelMismatch,
  };

  CacheError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace fasttreeshap

#endif  // FASTTREESHAP_ERROR_HPP_
