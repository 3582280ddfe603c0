// Copyright 2026 The wavehum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace wavehum {

/// Invalid parameters, grid dimensions or configuration entries.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::string field = {},
                       int line = 0)
      : std::runtime_error(what), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

/// Operands living on different grids.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine failed to reach its contract.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iterations)
      : std::runtime_error(what), iterations_(iterations) {}

  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

}  // namespace wavehum
