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

// Report and example domain types shared by generation, dataset I/O and
// evaluation.

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "finsynth/dsl.hpp"

namespace finsynth {

/// Row 0 is the header; the first header cell is blank or a corner label.
struct Table {
  std::vector<std::vector<std::string>> rows;

  bool empty() const { return rows.empty(); }
  bool operator==(const Table&) const = default;
};

struct FinancialReport {
  std::vector<std::string> pre_text;
  Table table;
  std::vector<std::string> post_text;

  bool operator==(const FinancialReport&) const = default;
};

struct TimeContext {
  std::vector<int> range;
  std::vector<int> question_points;
  std::map<std::string, int> slice_map;

  /// Year for a slice tag; unsliced variables read the first question year.
  int year_for(const std::optional<std::string>& slice) const;

  bool operator==(const TimeContext&) const = default;
};

enum class SupportKind { table, text };
std::string_view support_kind_name(SupportKind kind);

/// A supporting fact: a sentence (index over pre_text then post_text) or a
/// table row (index into Table::rows, so data rows start at 1).
struct FactRef {
  enum class Kind { text, table_row };
  Kind kind = Kind::text;
  std::size_t index = 0;

  std::string key() const;  // "text_3" / "table_1"
  static std::optional<FactRef> from_key(std::string_view key);
  bool operator==(const FactRef&) const = default;
};

struct QAExample {
  std::string id;
  FinancialReport report;
  std::string question;
  dsl::Program program;  // year-resolved, canonical
  dsl::Value exe_ans;
  std::vector<FactRef> gold_inds;
  SupportKind support_kind = SupportKind::table;
  std::string source_node;
  TimeContext time;
  dsl::Bindings bindings;  // values read from the report, keyed by resolved names

  bool operator==(const QAExample&) const = default;
};

enum class PipelineErrc {
  malformed_table_response,
  contradiction_detected,
  missing_template,
  extraction_miss,
  unit_ambiguity,
  execution_error,
  no_supporting_facts,
  not_rectangular,
  no_time_axis,
};

std::string_view pipeline_errc_name(PipelineErrc code);

class PipelineError : public std::runtime_error {
 public:
  PipelineError(PipelineErrc code, const std::string& what,
                std::optional<dsl::Errc> cause = std::nullopt)
      : std::runtime_error(what), code_(code), cause_(cause) {}
  PipelineErrc code() const noexcept { return code_; }
  std::optional<dsl::Errc> cause() const noexcept { return cause_; }

 private:
  PipelineErrc code_;
  std::optional<dsl::Errc> cause_;
};

bool is_rectangular(const Table& table);

/// The single four-digit year (1900-2100) in a cell, if exactly one occurs.
std::optional<int> year_of(std::string_view cell);

/// "the {label} of {year} is {value} ;" for each year column.
std::string row_to_text(const std::vector<std::string>& row,
                        const std::vector<std::string>& headers);

/// Plain row/column swap of a rectangular table.
Table transpose(const Table& table);

/// Returns tables with years across the header unchanged; swaps rows and
/// columns when the years run down the first column instead.
Table transpose_table(const Table& table);

/// Sentence or rendered table row a fact points at.
std::string fact_text(const FinancialReport& report, const FactRef& ref);

/// Whether a fact reference points inside the report (and not at the header).
bool fact_in_range(const FinancialReport& report, const FactRef& ref);

/// Plain-text rendering (pre text, pipe table, post text) used in prompts.
std::string render_report(const FinancialReport& report);
std::string render_table(const Table& table);

/// Lowercased, underscores to spaces, whitespace collapsed.
std::string normalize_label(std::string_view label);

/// "gross_profit" -> "gross profit".
std::string display_name(std::string_view identifier);

}  // namespace finsynth
