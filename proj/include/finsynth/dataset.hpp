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

// FinQA-style dataset files, TAT-QA-style conversion, splits, merging and
// distribution statistics.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "finsynth/report.hpp"

namespace finsynth::datasetio {

enum class Errc { io_error, schema_error, unsupported_answer, too_few_examples };

std::string_view errc_name(Errc code);

class DatasetError : public std::runtime_error {
 public:
  DatasetError(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Shared by writing and reading: rectangular table, valid program, gold
/// references inside the report, question years inside the range, and an
/// answer that matches re-execution whenever every variable is bound.
void validate_example(const QAExample& example);

nlohmann::json to_json(const QAExample& example);

/// Throws DatasetError(schema_error) naming the offending record.
QAExample from_json(const nlohmann::json& record);

/// JSON array sorted by id, two-space indent, trailing newline.
std::string dump_dataset(std::vector<QAExample> examples);
std::vector<QAExample> parse_dataset(const std::string& text);

void write_dataset(const std::vector<QAExample>& examples, const std::string& path);
std::vector<QAExample> read_dataset(const std::string& path);

struct TatqaConversion {
  nlohmann::json records = nlohmann::json::array();
  std::size_t skipped = 0;
  std::vector<std::string> log;
};

/// Groups examples sharing a report; boolean answers are skipped and logged.
TatqaConversion convert_tatqa(const std::vector<QAExample>& examples);

struct SplitSpec {
  double train = 0.75;
  double dev = 0.10;
  double test = 0.15;
  std::uint64_t seed = 0;
};

struct SplitSizes {
  std::size_t train = 0, dev = 0, test = 0;
};

/// dev = round(n * dev), test = round(n * test), train takes the remainder.
SplitSizes split_sizes(std::size_t n, const SplitSpec& spec);

/// Seeded permutation of [0, n) cut into train, dev and test index lists.
struct SplitIndices {
  std::vector<std::size_t> train, dev, test;
};
SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

struct Splits {
  std::vector<QAExample> train, dev, test;
};
Splits split(const std::vector<QAExample>& examples, const SplitSpec& spec);

/// Concatenation; ids present in both inputs become "a/<id>" and "b/<id>".
std::vector<QAExample> merge(const std::vector<QAExample>& a, const std::vector<QAExample>& b);

struct Histogram {
  std::map<std::string, std::size_t> counts;
  std::map<std::string, double> percent;
};

struct DatasetStats {
  std::size_t total = 0;
  Histogram gold_inds;     // "1", "2", "3", ">3"
  Histogram steps;         // "1", "2", "3", "4", ">4"
  Histogram support_kind;  // "table", "text"
};

DatasetStats dataset_stats(const std::vector<QAExample>& examples);

/// Statistics over any FinQA-shaped JSON array without full validation.
/// Support kind comes from meta.support_kind when present, else "text" if
/// any gold key is a sentence. Steps are counted as operation calls.
DatasetStats dataset_stats_json(const nlohmann::json& records);

std::string format_stats(const DatasetStats& stats);

}  // namespace finsynth::datasetio
