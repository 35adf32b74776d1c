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

#include "finsynth/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace finsynth {

int TimeContext::year_for(const std::optional<std::string>& slice) const {
  if (slice) {
    auto it = slice_map.find(*slice);
    if (it == slice_map.end()) throw std::out_of_range("time slice '" + *slice + "' is not mapped");
    return it->second;
  }
  if (question_points.empty()) throw std::out_of_range("time context has no question year");
  return question_points.front();
}

std::string_view support_kind_name(SupportKind kind) {
  return kind == SupportKind::table ? "table" : "text";
}

std::string FactRef::key() const {
  return (kind == Kind::text ? "text_" : "table_") + std::to_string(index);
}

std::optional<FactRef> FactRef::from_key(std::string_view key) {
  FactRef ref;
  std::string_view digits;
  if (key.rfind("text_", 0) == 0) {
    ref.kind = Kind::text;
    digits = key.substr(5);
  } else if (key.rfind("table_", 0) == 0) {
    ref.kind = Kind::table_row;
    digits = key.substr(6);
  } else {
    return std::nullopt;
  }
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), ref.index);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
    return std::nullopt;
  }
  return ref;
}

std::string_view pipeline_errc_name(PipelineErrc code) {
  switch (code) {
    case PipelineErrc::malformed_table_response: return "MalformedTableResponse";
    case PipelineErrc::contradiction_detected: return "ContradictionDetected";
    case PipelineErrc::missing_template: return "MissingTemplate";
    case PipelineErrc::extraction_miss: return "ExtractionMiss";
    case PipelineErrc::unit_ambiguity: return "UnitAmbiguity";
    case PipelineErrc::execution_error: return "ExecutionError";
    case PipelineErrc::no_supporting_facts: return "NoSupportingFacts";
    case PipelineErrc::not_rectangular: return "NotRectangular";
    case PipelineErrc::no_time_axis: return "NoTimeAxis";
  }
  return "Unknown";
}

bool is_rectangular(const Table& table) {
  if (table.rows.empty()) return true;
  const auto width = table.rows.front().size();
  return std::all_of(table.rows.begin(), table.rows.end(),
                     [&](const auto& r) { return r.size() == width; });
}

std::optional<int> year_of(std::string_view cell) {
  std::optional<int> found;
  std::size_t i = 0;
  while (i < cell.size()) {
    if (!std::isdigit(static_cast<unsigned char>(cell[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cell.size() && std::isdigit(static_cast<unsigned char>(cell[j]))) ++j;
    bool bounded_left = i == 0 || !(std::isalnum(static_cast<unsigned char>(cell[i - 1])) ||
                                    cell[i - 1] == '.' || cell[i - 1] == ',');
    bool bounded_right = j == cell.size() ||
                         !(std::isalnum(static_cast<unsigned char>(cell[j])) || cell[j] == '.');
    if (j - i == 4 && bounded_left && bounded_right) {
      int y = 0;
      std::from_chars(cell.data() + i, cell.data() + j, y);
      if (y >= 1900 && y <= 2100) {
        if (found) return std::nullopt;
        found = y;
      }
    }
    i = j;
  }
  return found;
}

std::string row_to_text(const std::vector<std::string>& row,
                        const std::vector<std::string>& headers) {
  std::string label = row.empty() ? std::string() : row.front();
  if (label.empty() || label == "-") label = "this item";
  if (row.size() <= 1) return label;
  std::string out;
  for (std::size_t i = 1; i < row.size(); ++i) {
    std::string when = i < headers.size() ? headers[i] : std::string();
    if (!out.empty()) out += ' ';
    out += "the " + label + " of " + when + " is " + row[i] + " ;";
  }
  return out;
}

Table transpose(const Table& table) {
  if (!is_rectangular(table)) {
    throw PipelineError(PipelineErrc::not_rectangular, "table rows differ in length");
  }
  Table out;
  if (table.rows.empty()) return out;
  const std::size_t width = table.rows.front().size();
  out.rows.assign(width, std::vector<std::string>(table.rows.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) out.rows[c][r] = table.rows[r][c];
  }
  return out;
}

Table transpose_table(const Table& table) {
  if (!is_rectangular(table)) {
    throw PipelineError(PipelineErrc::not_rectangular, "table rows differ in length");
  }
  if (table.rows.empty()) throw PipelineError(PipelineErrc::no_time_axis, "empty table");
  const auto& header = table.rows.front();
  auto has_years = [](auto begin, auto end) {
    return begin != end && std::all_of(begin, end, [](const std::string& c) {
             return year_of(c).has_value();
           });
  };
  if (has_years(header.begin() + std::min<std::size_t>(1, header.size()), header.end())) {
    return table;
  }
  std::vector<std::string> first_column;
  for (std::size_t r = 1; r < table.rows.size(); ++r) first_column.push_back(table.rows[r].front());
  if (!has_years(first_column.begin(), first_column.end())) {
    throw PipelineError(PipelineErrc::no_time_axis, "no year labels on either table axis");
  }
  return transpose(table);
}

bool fact_in_range(const FinancialReport& report, const FactRef& ref) {
  if (ref.kind == FactRef::Kind::text) {
    return ref.index < report.pre_text.size() + report.post_text.size();
  }
  return ref.index >= 1 && ref.index < report.table.rows.size();
}

std::string fact_text(const FinancialReport& report, const FactRef& ref) {
  if (!fact_in_range(report, ref)) throw std::out_of_range("fact " + ref.key() + " out of range");
  if (ref.kind == FactRef::Kind::text) {
    return ref.index < report.pre_text.size()
               ? report.pre_text[ref.index]
               : report.post_text[ref.index - report.pre_text.size()];
  }
  return row_to_text(report.table.rows[ref.index], report.table.rows.front());
}

std::string render_table(const Table& table) {
  std::string out;
  for (const auto& row : table.rows) {
    out += '|';
    for (const auto& cell : row) out += ' ' + cell + " |";
    out += '\n';
  }
  return out;
}

std::string render_report(const FinancialReport& report) {
  std::string out;
  for (const auto& s : report.pre_text) out += s + '\n';
  out += render_table(report.table);
  for (const auto& s : report.post_text) out += s + '\n';
  return out;
}

std::string normalize_label(std::string_view label) {
  std::string out;
  bool space = false;
  for (char c : label) {
    unsigned char u = static_cast<unsigned char>(c);
    if (c == '_' || std::isspace(u)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(u));
  }
  return out;
}

std::string display_name(std::string_view identifier) {
  std::string out(identifier);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

}  // namespace finsynth
