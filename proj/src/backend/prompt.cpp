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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "finsynth/backend.hpp"

namespace finsynth::backend {
namespace {

constexpr std::string_view kPreamble =
    "You write realistic synthetic content for financial question-answering datasets. "
    "Follow the output format exactly and add nothing else.";

constexpr std::string_view kTaskMarker = "### Task";

std::string_view instructions(TaskKind task) {
  switch (task) {
    case TaskKind::table:
      return "Produce one financial table for the listed items over the listed fiscal years. "
             "Write it as a pipe-delimited table whose header row starts with a blank cell "
             "followed by one column per year; each following row starts with an item label "
             "(use the given labels) followed by one value per year. Use plausible amounts, at "
             "most two decimals. Include the distractor items as extra rows when listed.";
    case TaskKind::table_text:
      return "Write short report sentences that accompany the table in the artifact. One "
             "sentence per line; put a line with only --- between the sentences that precede "
             "the table and those that follow it. Any amount you mention must match the table "
             "exactly; most sentences should give context rather than numbers.";
    case TaskKind::text:
      return "Write report sentences that state the value of every listed item for every listed "
             "year, one item and one year per sentence, plus a few context sentences without "
             "numbers. One sentence per line; put a line with only --- between the opening "
             "sentences and the closing ones. Amounts may use $, thousands separators and the "
             "words thousand, million or billion.";
    case TaskKind::text_table:
      return "Produce a pipe-delimited table that could accompany the text in the artifact, "
             "using only the distractor items as rows and the listed years as columns. The "
             "header row starts with a blank cell. Never include any item mentioned in the "
             "variables list.";
    case TaskKind::extract:
      return "Read the report in the artifact and give the value of each required item. Answer "
             "with one line per required key in the form key = value, copying the amount "
             "exactly as written in the report including any unit word or percent sign.";
  }
  return "";
}

std::string trim_copy(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? " | " : "") + items[i];
  return out;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  if (trim_copy(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto bar = s.find('|', start);
    out.push_back(trim_copy(s.substr(start, bar == std::string_view::npos ? bar : bar - start)));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line =
        text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

std::vector<std::string> split_cells(std::string_view line) {
  std::string t = trim_copy(line);
  std::string_view v = t;
  if (!v.empty() && v.front() == '|') v.remove_prefix(1);
  if (!v.empty() && v.back() == '|') v.remove_suffix(1);
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto bar = v.find('|', start);
    cells.push_back(trim_copy(v.substr(start, bar == std::string_view::npos ? bar : bar - start)));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return cells;
}

bool is_separator_row(const std::vector<std::string>& cells) {
  return std::all_of(cells.begin(), cells.end(), [](const std::string& c) {
    if (c.size() < 3) return false;
    return std::all_of(c.begin(), c.end(), [](char ch) { return ch == '-' || ch == ':'; });
  });
}

void render_payload(std::ostringstream& os, TaskKind task, const Payload& p) {
  os << "task: " << task_name(task) << '\n';
  if (!p.variables.empty()) os << "variables: " << join(p.variables) << '\n';
  if (!p.labels.empty()) os << "labels: " << join(p.labels) << '\n';
  if (!p.years.empty()) {
    std::vector<std::string> ys;
    for (int y : p.years) ys.push_back(std::to_string(y));
    os << "years: " << join(ys) << '\n';
  }
  if (!p.distractors.empty()) os << "distractors: " << join(p.distractors) << '\n';
  if (!p.required.empty()) os << "required: " << join(p.required) << '\n';
  if (!p.artifact.empty()) {
    os << "artifact:\n<<<\n" << p.artifact;
    if (p.artifact.back() != '\n') os << '\n';
    os << ">>>\n";
  }
}

}  // namespace

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::auth_error: return "AuthError";
    case Errc::rate_limited: return "RateLimited";
    case Errc::timeout: return "Timeout";
    case Errc::unreachable: return "Unreachable";
    case Errc::http_error: return "HttpError";
    case Errc::malformed_response: return "MalformedResponse";
    case Errc::exemplar_count_mismatch: return "ExemplarCountMismatch";
    case Errc::no_table_found: return "NoTableFound";
    case Errc::ragged_rows: return "RaggedRows";
    case Errc::config_error: return "ConfigError";
  }
  return "Unknown";
}

std::string_view task_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::table: return "table";
    case TaskKind::table_text: return "table_text";
    case TaskKind::text: return "text";
    case TaskKind::text_table: return "text_table";
    case TaskKind::extract: return "extract";
  }
  return "";
}

std::optional<TaskKind> task_from_name(std::string_view name) {
  for (auto k : {TaskKind::table, TaskKind::table_text, TaskKind::text, TaskKind::text_table,
                 TaskKind::extract}) {
    if (task_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view shot_mode_name(ShotMode mode) {
  switch (mode) {
    case ShotMode::zero: return "zero";
    case ShotMode::one: return "one";
    case ShotMode::few: return "few";
  }
  return "";
}

std::optional<ShotMode> shot_mode_from_name(std::string_view name) {
  for (auto m : {ShotMode::zero, ShotMode::one, ShotMode::few}) {
    if (shot_mode_name(m) == name) return m;
  }
  return std::nullopt;
}

std::size_t exemplar_count(ShotMode mode) {
  switch (mode) {
    case ShotMode::zero: return 0;
    case ShotMode::one: return 1;
    case ShotMode::few: return 4;
  }
  return 0;
}

std::string build_prompt(const PromptRequest& req) {
  if (req.exemplars.size() != exemplar_count(req.shot_mode)) {
    throw BackendError(Errc::exemplar_count_mismatch,
                       std::string(shot_mode_name(req.shot_mode)) + "-shot prompt needs " +
                           std::to_string(exemplar_count(req.shot_mode)) + " exemplars, got " +
                           std::to_string(req.exemplars.size()));
  }
  std::ostringstream os;
  os << kPreamble << '\n' << instructions(req.task) << "\n\n";
  for (std::size_t i = 0; i < req.exemplars.size(); ++i) {
    os << "### Example " << (i + 1) << "\nInput:\n" << req.exemplars[i].input;
    if (!req.exemplars[i].input.empty() && req.exemplars[i].input.back() != '\n') os << '\n';
    os << "Output:\n" << req.exemplars[i].output;
    if (!req.exemplars[i].output.empty() && req.exemplars[i].output.back() != '\n') os << '\n';
    os << '\n';
  }
  os << kTaskMarker << '\n';
  render_payload(os, req.task, req.payload);
  os << "Output:\n";
  return os.str();
}

std::optional<ParsedPrompt> parse_prompt(std::string_view prompt) {
  auto marker = prompt.rfind(std::string(kTaskMarker) + "\n");
  if (marker == std::string_view::npos) return std::nullopt;
  auto lines = lines_of(prompt.substr(marker + kTaskMarker.size() + 1));
  ParsedPrompt out;
  bool have_task = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line == "artifact:" && i + 1 < lines.size() && lines[i + 1] == "<<<") {
      std::string body;
      std::size_t j = i + 2;
      for (; j < lines.size() && lines[j] != ">>>"; ++j) body += lines[j] + '\n';
      out.payload.artifact = body;
      i = j;
      continue;
    }
    auto colon = line.find(": ");
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    std::string_view value = std::string_view(line).substr(colon + 2);
    if (key == "task") {
      auto t = task_from_name(trim_copy(value));
      if (!t) return std::nullopt;
      out.task = *t;
      have_task = true;
    } else if (key == "variables") {
      out.payload.variables = split_list(value);
    } else if (key == "labels") {
      out.payload.labels = split_list(value);
    } else if (key == "years") {
      for (const auto& y : split_list(value)) {
        int year = 0;
        auto [ptr, ec] = std::from_chars(y.data(), y.data() + y.size(), year);
        if (ec != std::errc{} || ptr != y.data() + y.size()) return std::nullopt;
        out.payload.years.push_back(year);
      }
    } else if (key == "distractors") {
      out.payload.distractors = split_list(value);
    } else if (key == "required") {
      out.payload.required = split_list(value);
    }
  }
  if (!have_task) return std::nullopt;
  return out;
}

ExemplarBank load_exemplars(std::istream& in) {
  ExemplarBank bank;
  std::string line;
  std::optional<TaskKind> task;
  enum class Section { none, input, output } section = Section::none;
  Exemplar current;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("@@", 0) != 0) {
      if (section == Section::input) current.input += line + '\n';
      if (section == Section::output) current.output += line + '\n';
      continue;
    }
    std::string directive = trim_copy(std::string_view(line).substr(2));
    if (directive.rfind("task:", 0) == 0) {
      task = task_from_name(trim_copy(std::string_view(directive).substr(5)));
      if (!task) {
        throw BackendError(Errc::config_error,
                           "exemplars line " + std::to_string(line_no) + ": unknown task");
      }
      current = {};
      section = Section::none;
    } else if (directive == "input") {
      section = Section::input;
    } else if (directive == "output") {
      section = Section::output;
    } else if (directive == "end") {
      if (!task) {
        throw BackendError(Errc::config_error,
                           "exemplars line " + std::to_string(line_no) + ": @@ end without task");
      }
      bank[*task].push_back(current);
      current = {};
      section = Section::none;
    } else {
      throw BackendError(Errc::config_error, "exemplars line " + std::to_string(line_no) +
                                                 ": unknown directive '" + directive + "'");
    }
  }
  return bank;
}

ExemplarBank load_exemplars_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BackendError(Errc::config_error, "cannot open exemplars file '" + path + "'");
  return load_exemplars(in);
}

std::vector<Exemplar> select_exemplars(const ExemplarBank& bank, TaskKind task, ShotMode mode) {
  const std::size_t n = exemplar_count(mode);
  if (n == 0) return {};
  auto it = bank.find(task);
  if (it == bank.end() || it->second.size() < n) {
    throw BackendError(Errc::exemplar_count_mismatch,
                       std::string(shot_mode_name(mode)) + "-shot " + std::string(task_name(task)) +
                           " prompt needs " + std::to_string(n) + " exemplars");
  }
  return {it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(n)};
}

Table parse_table_response(std::string_view text) {
  Table table;
  bool in_block = false;
  for (const auto& line : lines_of(text)) {
    bool has_pipe = line.find('|') != std::string::npos;
    if (!has_pipe) {
      if (in_block) break;
      continue;
    }
    in_block = true;
    auto cells = split_cells(line);
    if (is_separator_row(cells)) continue;
    table.rows.push_back(std::move(cells));
  }
  if (table.rows.size() < 2) throw BackendError(Errc::no_table_found, "no table in response");
  if (!is_rectangular(table)) {
    throw BackendError(Errc::ragged_rows, "table rows have differing numbers of cells");
  }
  return table;
}

TextResponse parse_text_response(std::string_view text) {
  TextResponse out;
  bool post = false;
  for (const auto& raw : lines_of(text)) {
    std::string line = trim_copy(raw);
    if (line.empty()) continue;
    if (line == "---") {
      post = true;
      continue;
    }
    if (line.rfind("- ", 0) == 0 || line.rfind("* ", 0) == 0) line = trim_copy(line.substr(2));
    (post ? out.post_text : out.pre_text).push_back(line);
  }
  return out;
}

std::map<std::string, std::string> parse_extraction_response(std::string_view text) {
  std::map<std::string, std::string> out;
  for (const auto& raw : lines_of(text)) {
    auto sep = raw.find('=');
    if (sep == std::string::npos) sep = raw.find(':');
    if (sep == std::string::npos) continue;
    std::string key = trim_copy(std::string_view(raw).substr(0, sep));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (key.rfind("- ", 0) == 0) key = trim_copy(key.substr(2));
    out[key] = trim_copy(std::string_view(raw).substr(sep + 1));
  }
  return out;
}

}  // namespace finsynth::backend
