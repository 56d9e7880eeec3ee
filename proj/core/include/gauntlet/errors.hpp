// Copyright 2026 The Gauntlet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace gauntlet {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Tensor/layer shapes are incompatible for the requested operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A class index or element index is out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// An invalid configuration value (attack, defense, training, manifest).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an API contract (non-scalar loss, missing BPDA routing).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A serialized file (checkpoint, IDX, report) is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Two inputs that must agree (e.g. image and label counts) do not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// An operation produced non-finite values.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Training diverged or was handed unusable data.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Empty or otherwise unusable input data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Filesystem read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gauntlet
