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

#include "finsynth/numbers.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "finsynth/dsl.hpp"

namespace finsynth {
namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Powers of ten are applied in decimal ("2.449 thousand" is exactly 2449), so
// the scaled value is the double nearest the written amount.
double apply_scale(const std::string& digits, double v, double scale) {
  const double e = std::round(std::log10(scale));
  if (std::pow(10.0, e) != scale) return v * scale;
  std::string sci = digits + "e" + std::to_string(static_cast<int>(e));
  double out = v * scale;
  std::from_chars(sci.data(), sci.data() + sci.size(), out);
  return out;
}

}  // namespace

UnitTable UnitTable::defaults() {
  UnitTable t;
  t.scales = {{"thousand", 1e3}, {"thousands", 1e3}, {"million", 1e6},
              {"millions", 1e6}, {"billion", 1e9},   {"billions", 1e9}};
  t.ambiguous = {"m", "mm", "mn"};
  return t;
}

std::vector<NumericLiteral> find_numbers(std::string_view text, const UnitTable& units) {
  std::vector<NumericLiteral> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    std::size_t start = i;
    std::size_t p = i;
    bool negative = false;
    if (p < n && text[p] == '-') {
      negative = true;
      ++p;
    }
    if (p < n && text[p] == '$') {
      ++p;
      while (p < n && text[p] == ' ') ++p;
    }
    if (!negative && p < n && text[p] == '-') {
      negative = true;
      ++p;
    }
    bool preceded = start > 0 && (is_word_char(text[start - 1]) || text[start - 1] == '.');
    if (p >= n || !is_digit(text[p]) || preceded) {
      ++i;
      continue;
    }
    std::string digits;
    while (p < n && is_digit(text[p])) digits += text[p++];
    // Thousands groups: a comma followed by exactly three digits.
    while (p + 3 < n && text[p] == ',' && is_digit(text[p + 1]) && is_digit(text[p + 2]) &&
           is_digit(text[p + 3]) && (p + 4 >= n || !is_digit(text[p + 4]))) {
      digits.append(text.substr(p + 1, 3));
      p += 4;
    }
    if (p + 1 < n && text[p] == '.' && is_digit(text[p + 1])) {
      digits += text[p++];
      while (p < n && is_digit(text[p])) digits += text[p++];
    }
    if (p < n && is_alpha(text[p])) {  // "2a", "10k" glued suffixes are not amounts
      i = p;
      while (i < n && is_word_char(text[i])) ++i;
      continue;
    }
    double v = 0.0;
    std::from_chars(digits.data(), digits.data() + digits.size(), v);
    NumericLiteral lit;
    std::size_t end = p;
    std::size_t q = p;
    if (q < n && text[q] == ' ') ++q;
    if (q < n && text[q] == '%') {
      lit.percent = true;
      end = q + 1;
    } else {
      while (q < n && text[q] == ' ') ++q;
      std::size_t w = q;
      while (w < n && is_alpha(text[w])) ++w;
      if (w > q) {
        std::string word(text.substr(q, w - q));
        for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (auto it = units.scales.find(word); it != units.scales.end()) {
          v = apply_scale(digits, v, it->second);
          lit.unit = word;
          end = w;
        } else if (units.ambiguous.count(word)) {
          lit.unit = word;
          lit.ambiguous_unit = true;
          end = w;
        }
      }
    }
    lit.offset = start;
    lit.length = end - start;
    lit.value = negative ? -v : v;
    if (lit.value == 0.0) lit.value = 0.0;
    out.push_back(std::move(lit));
    i = end;
  }
  return out;
}

double normalize_value(std::string_view text, bool ratio_typed, const UnitTable& units) {
  auto lits = find_numbers(text, units);
  if (lits.empty()) {
    throw NumberError(NumberErrc::no_number, "no number in '" + std::string(text) + "'");
  }
  const auto& lit = lits.front();
  if (lit.ambiguous_unit) {
    throw NumberError(NumberErrc::unit_ambiguity,
                      "unit '" + *lit.unit + "' in '" + std::string(text) + "' is ambiguous");
  }
  return (lit.percent && ratio_typed) ? lit.value / 100.0 : lit.value;
}

bool literal_matches(const NumericLiteral& lit, double value) {
  const std::string want = dsl::format_number(value);
  if (dsl::format_number(lit.value) == want) return true;
  return lit.percent && dsl::format_number(lit.value / 100.0) == want;
}

}  // namespace finsynth
