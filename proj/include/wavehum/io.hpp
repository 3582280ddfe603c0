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

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace wavehum {

/// Shortest round-trip decimal form of x.
std::string format_number(double x);

/// Comma-separated rows with LF line endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header);

  void row(std::initializer_list<double> values);

 private:
  std::ostream& os_;
};

}  // namespace wavehum
