// Copyright 2026 The finsynth Authors.
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

// Numeric literal scanning and normalization for report text: strips "$",
// thousands separators and "%", and resolves unit words through a table.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace finsynth {

struct UnitTable {
  std::map<std::string, double> scales;
  /// Words that look like units but have no agreed scale ("m" is thousand in
  /// some ledgers, million in others).
  std::set<std::string> ambiguous;

  static UnitTable defaults();
};

struct NumericLiteral {
  std::size_t offset = 0;
  std::size_t length = 0;
  double value = 0.0;  // unit scale applied, percent not divided
  bool percent = false;
  std::optional<std::string> unit;
  bool ambiguous_unit = false;
};

enum class NumberErrc { no_number, unit_ambiguity };

class NumberError : public std::runtime_error {
 public:
  NumberError(NumberErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  NumberErrc code() const noexcept { return code_; }

 private:
  NumberErrc code_;
};

std::vector<NumericLiteral> find_numbers(std::string_view text, const UnitTable& units);

/// Value of the first literal in `text`. Percentages are divided by 100 only
/// for ratio-typed variables.
double normalize_value(std::string_view text, bool ratio_typed, const UnitTable& units);

/// Exact comparison in normalized text form; a percent literal also matches
/// its fractional reading.
bool literal_matches(const NumericLiteral& lit, double value);

}  // namespace finsynth
