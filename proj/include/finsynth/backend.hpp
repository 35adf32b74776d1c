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

// Text-generation backend contract, prompt construction and response
// parsing. Implementations live in mock_backend.hpp and live_backend.hpp.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "finsynth/report.hpp"

namespace finsynth::backend {

enum class Errc {
  auth_error,
  rate_limited,
  timeout,
  unreachable,
  http_error,
  malformed_response,
  exemplar_count_mismatch,
  no_table_found,
  ragged_rows,
  config_error,
};

std::string_view errc_name(Errc code);

class BackendError : public std::runtime_error {
 public:
  BackendError(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

enum class TaskKind { table, table_text, text, text_table, extract };
enum class ShotMode { zero, one, few };

std::string_view task_name(TaskKind kind);
std::optional<TaskKind> task_from_name(std::string_view name);
std::string_view shot_mode_name(ShotMode mode);
std::optional<ShotMode> shot_mode_from_name(std::string_view name);

/// Exemplars required by a shot mode: 0, 1 or 4.
std::size_t exemplar_count(ShotMode mode);

struct Exemplar {
  std::string input;
  std::string output;
};

/// Structured prompt input. Every list is rendered as one `key: a | b` line so
/// that deterministic backends can read it back.
struct Payload {
  std::vector<std::string> variables;  // identifiers
  std::vector<std::string> labels;     // display labels, parallel to variables
  std::vector<int> years;
  std::vector<std::string> distractors;
  std::vector<std::string> required;   // extraction keys, "gross_profit@2017"
  std::string artifact;                // earlier output embedded verbatim

  bool operator==(const Payload&) const = default;
};

struct PromptRequest {
  TaskKind task = TaskKind::table;
  ShotMode shot_mode = ShotMode::few;
  std::vector<Exemplar> exemplars;
  Payload payload;
};

std::string build_prompt(const PromptRequest& req);

/// Recovers the task and payload from a prompt produced by build_prompt.
struct ParsedPrompt {
  TaskKind task = TaskKind::table;
  Payload payload;
};
std::optional<ParsedPrompt> parse_prompt(std::string_view prompt);

using ExemplarBank = std::map<TaskKind, std::vector<Exemplar>>;

/// Reads `@@ task: <kind>` / `@@ input` / `@@ output` / `@@ end` blocks.
ExemplarBank load_exemplars(std::istream& in);
ExemplarBank load_exemplars_file(const std::string& path);

/// First `n` exemplars for the task; throws exemplar_count_mismatch if short.
std::vector<Exemplar> select_exemplars(const ExemplarBank& bank, TaskKind task, ShotMode mode);

struct CallOptions {
  double temperature = 0.7;
  std::uint64_t seed = 0;
};

/// The text-generation contract. Implementations must be callable from
/// several threads at once.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual std::string complete(const std::string& prompt, const CallOptions& options) = 0;
  virtual std::string name() const = 0;
};

/// First pipe-delimited block; markdown separator rows are skipped.
Table parse_table_response(std::string_view text);

/// Sentences one per line; a line holding only `---` separates pre text from
/// post text. Blank lines and list bullets are dropped.
struct TextResponse {
  std::vector<std::string> pre_text;
  std::vector<std::string> post_text;
};
TextResponse parse_text_response(std::string_view text);

/// `key = value` lines from an extraction answer.
std::map<std::string, std::string> parse_extraction_response(std::string_view text);

}  // namespace finsynth::backend
