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

#include "wavehum/io.hpp"

#include <charconv>

namespace wavehum {

std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& os,
                     std::initializer_list<std::string_view> header)
    : os_(os) {
  bool first = true;
  for (auto h : header) {
    if (!first) os_ << ',';
    os_ << h;
    first = false;
  }
  os_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os_ << ',';
    os_ << format_number(v);
    first = false;
  }
  os_ << '\n';
}

}  // namespace wavehum
