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

// Example generation: time context, report (table-first or text-first),
// value extraction, question, gold program, answer and supporting facts.

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "finsynth/backend.hpp"
#include "finsynth/graph.hpp"
#include "finsynth/mock_backend.hpp"
#include "finsynth/numbers.hpp"
#include "finsynth/report.hpp"
#include "finsynth/rng.hpp"
#include "finsynth/seed_file.hpp"

namespace finsynth::genpipe {

/// Display labels per variable and the distractor item pool.
struct Vocabulary {
  std::map<std::string, std::vector<std::string>> labels;
  std::vector<std::string> distractors;

  /// Configured synonyms, or the display name when none are configured.
  std::vector<std::string> labels_for(const std::string& variable) const;
};

/// Question templates keyed by provenance (`seed`, `composed`, `change`, ...).
struct Templates {
  std::map<std::string, std::string> by_key;

  static Templates parse(std::istream& in);
  static Templates load(const std::string& path);
};

struct GenConfig {
  std::size_t examples_per_node = 2;
  std::uint64_t seed = 7;
  std::size_t max_concurrency = 4;
  backend::ShotMode shot_mode = backend::ShotMode::few;
  double temperature = 0.7;
  int max_attempts = 3;
  std::size_t distractor_rows = 2;
  Vocabulary vocab;
  Templates templates;
  backend::ExemplarBank exemplars;
  UnitTable units = UnitTable::defaults();
  std::vector<std::string> ratio_suffixes{"_margin", "_margins", "_rate", "_percent",
                                          "_percentage"};

  bool is_ratio(const std::string& variable) const;
};

/// `key = value` lines with `#` comments. Keys this module understands:
/// `label.<variable>`, `distractors`, `unit.<word>`, `ambiguous_units`,
/// `ratio_suffixes`. Lists are `|`-separated. Other keys are returned.
std::map<std::string, std::string> apply_vocabulary_config(std::istream& in, GenConfig& cfg);

/// Mock value model sharing the config's ratio typing and units.
backend::ValueModel make_value_model(const SeedSet& seeds, const GenConfig& cfg);

/// Distinct time slices of a node in natural order (t2 before t10).
std::vector<std::string> slices_of(const FormulaNode& node);

/// Distinct variable names (slice tags dropped) in first-occurrence order.
std::vector<std::string> base_variables(const FormulaNode& node);

TimeContext generate_time(const FormulaNode& node, Rng& rng);

/// Year-resolved variable name: ("gross_profit", 2017) -> "gross_profit_2017".
std::string resolved_name(const std::string& variable, int year);

/// (variable, year) pairs the node's program reads, in first-use order.
std::vector<std::pair<std::string, int>> required_pairs(const FormulaNode& node,
                                                        const TimeContext& time);

/// Replaces every variable by its year-resolved name; result is canonical.
dsl::Program resolve_program(const dsl::Program& program, const TimeContext& time);

/// Context handed to the report generators.
struct ReportContext {
  const FormulaNode& node;
  const TimeContext& time;
  std::map<std::string, std::string> labels;  // variable -> label used in this report
  std::vector<std::string> distractors;
  std::uint64_t seed = 0;
};

FinancialReport generate_report_table_first(const ReportContext& ctx,
                                            backend::TextGenerator& gen, const GenConfig& cfg);
FinancialReport generate_report_text_first(const ReportContext& ctx, backend::TextGenerator& gen,
                                           const GenConfig& cfg);

/// Values through the backend's extraction prompt, keyed by resolved names.
dsl::Bindings extract_bindings(const FinancialReport& report, const FormulaNode& node,
                               const TimeContext& time, backend::TextGenerator& gen,
                               const GenConfig& cfg, std::uint64_t seed);

/// Values read directly from the report: table rows by label and year column,
/// otherwise sentences that open with a label and name the year.
dsl::Bindings read_bindings(const FinancialReport& report, const FormulaNode& node,
                            const TimeContext& time, const GenConfig& cfg);

std::string render_question(const FormulaNode& node, const TimeContext& time,
                            const Templates& templates);

/// Sentences and table rows holding a literal equal to a program constant
/// or a bound value, in document order (pre text, table rows, post text).
std::vector<FactRef> match_supporting_facts(const FinancialReport& report,
                                            const std::vector<double>& program_args,
                                            const dsl::Bindings& bindings,
                                            const UnitTable& units = UnitTable::defaults());

QAExample assemble_example(const FormulaNode& node, const FinancialReport& report,
                           const dsl::Bindings& bindings, const TimeContext& time,
                           const std::string& question, SupportKind support_kind,
                           const UnitTable& units = UnitTable::defaults());

/// True if the answer appears verbatim as a literal in the report.
bool is_direct_lookup(const QAExample& example, const UnitTable& units = UnitTable::defaults());

/// One example; throws PipelineError or BackendError on failure.
QAExample generate_example(const FormulaNode& node, std::size_t index, backend::TextGenerator& gen,
                           const GenConfig& cfg);

/// Re-reads the example's bindings from its own report, re-executes the
/// program and compares with exe_ans.
bool self_consistent(const QAExample& example, const GenConfig& cfg);

struct GenerationSummary {
  std::size_t attempted = 0;
  std::size_t emitted = 0;
  std::size_t skipped = 0;
  std::size_t direct_lookups = 0;
  std::size_t audit_passed = 0;
  std::map<std::string, std::size_t> skip_reasons;
  std::vector<std::string> log;
};

struct GenerationResult {
  std::vector<QAExample> examples;
  GenerationSummary summary;
};

/// Examples for every node in id order, alternating table-first (even index)
/// and text-first (odd index). Per-example seeds make the output independent
/// of scheduling. Authentication and connectivity errors abort the run;
/// other failures skip the example.
GenerationResult generate_dataset(const graph::FormulaGraph& graph, const GenConfig& cfg,
                                  backend::TextGenerator& gen);

std::string format_summary(const GenerationSummary& summary);

}  // namespace finsynth::genpipe
