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
#include <atomic>
#include <cctype>
#include <exception>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "finsynth/genpipe.hpp"

namespace finsynth::genpipe {
namespace {

using backend::BackendError;
using backend::TaskKind;

constexpr std::string_view kGenericDistractor = "other items";

// "t2" < "t10": compare the non-digit prefix, then the trailing number.
bool natural_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    std::size_t i = s.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
    std::string digits = s.substr(i);
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size()));
    return std::tuple(s.substr(0, i), digits.size(), digits, s);
  };
  return split(a) < split(b);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Whole-word containment after label normalization.
bool mentions(const std::string& text, const std::string& label) {
  const std::string hay = " " + normalize_label(text) + " ";
  const std::string needle = " " + normalize_label(label) + " ";
  return needle.size() > 2 && hay.find(needle) != std::string::npos;
}

std::vector<std::string> all_node_labels(const FormulaNode& node, const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (const auto& v : base_variables(node)) {
    for (const auto& l : vocab.labels_for(v)) out.push_back(l);
    out.push_back(display_name(v));
  }
  return out;
}

std::string replace_all(std::string s, std::string_view key, const std::string& value) {
  for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size())) {
    s.replace(pos, key.size(), value);
  }
  return s;
}

std::string prompt_for(TaskKind task, backend::Payload payload, const GenConfig& cfg) {
  backend::PromptRequest req;
  req.task = task;
  req.shot_mode = cfg.shot_mode;
  req.exemplars = backend::select_exemplars(cfg.exemplars, task, cfg.shot_mode);
  req.payload = std::move(payload);
  return backend::build_prompt(req);
}

backend::Payload base_payload(const ReportContext& ctx) {
  backend::Payload p;
  for (const auto& v : base_variables(ctx.node)) {
    p.variables.push_back(v);
    auto it = ctx.labels.find(v);
    p.labels.push_back(it != ctx.labels.end() ? it->second : display_name(v));
  }
  p.years = ctx.time.range;
  return p;
}

double read_number(std::string_view text, bool ratio, const UnitTable& units,
                   const std::string& what) {
  try {
    return normalize_value(text, ratio, units);
  } catch (const NumberError& e) {
    if (e.code() == NumberErrc::unit_ambiguity) {
      throw PipelineError(PipelineErrc::unit_ambiguity, what + ": " + e.what());
    }
    throw PipelineError(PipelineErrc::extraction_miss, what + ": " + e.what());
  }
}

// Amount stated by a sentence that opens with `label` and names `year`.
std::optional<std::string> sentence_amount(const std::string& sentence, const std::string& label,
                                           int year, const UnitTable& units) {
  const std::string lab = normalize_label(label);
  const std::string low = lower(sentence);
  if (low.rfind(lab + " ", 0) != 0) return std::nullopt;
  const std::string year_text = std::to_string(year);
  auto lits = find_numbers(sentence, units);
  bool names_year = false;
  std::optional<std::string> amount;
  for (const auto& lit : lits) {
    std::string text = sentence.substr(lit.offset, lit.length);
    if (text == year_text) {
      names_year = true;
    } else if (!amount && lit.offset >= lab.size()) {
      amount = text;
    }
  }
  if (!names_year) return std::nullopt;
  return amount;
}

std::vector<std::string> all_sentences(const FinancialReport& r) {
  std::vector<std::string> out = r.pre_text;
  out.insert(out.end(), r.post_text.begin(), r.post_text.end());
  return out;
}

// Raw cell or phrase holding the value of (variable, year), if present.
std::optional<std::string> locate(const FinancialReport& report,
                                  const std::vector<std::string>& labels, int year,
                                  const UnitTable& units) {
  const auto& rows = report.table.rows;
  if (!rows.empty()) {
    std::optional<std::size_t> col;
    for (std::size_t c = 1; c < rows.front().size(); ++c) {
      if (year_of(rows.front()[c]) == year) col = c;
    }
    if (col) {
      for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::string row_label = normalize_label(rows[r].front());
        for (const auto& l : labels) {
          if (row_label == normalize_label(l) && *col < rows[r].size()) return rows[r][*col];
        }
      }
    }
  }
  for (const auto& s : all_sentences(report)) {
    for (const auto& l : labels) {
      if (auto a = sentence_amount(s, l, year, units)) return a;
    }
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, int>> pairs_of_resolved(const dsl::Program& program) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& v : dsl::variables(program)) {
    auto us = v.name.rfind('_');
    if (us == std::string::npos) throw std::invalid_argument("'" + v.name + "' has no year");
    out.emplace_back(v.name.substr(0, us), std::stoi(v.name.substr(us + 1)));
  }
  return out;
}

dsl::Bindings read_pairs(const FinancialReport& report,
                         const std::vector<std::pair<std::string, int>>& pairs,
                         const GenConfig& cfg) {
  dsl::Bindings out;
  for (const auto& [var, year] : pairs) {
    auto labels = cfg.vocab.labels_for(var);
    labels.push_back(display_name(var));
    auto raw = locate(report, labels, year, cfg.units);
    if (!raw) {
      throw PipelineError(PipelineErrc::extraction_miss,
                          "no value for " + var + " in " + std::to_string(year));
    }
    out[dsl::VarRef(resolved_name(var, year))] =
        read_number(*raw, cfg.is_ratio(var), cfg.units, var + "@" + std::to_string(year));
  }
  return out;
}

void check_table_first(const Table& table, const ReportContext& ctx, const GenConfig& cfg) {
  std::set<int> years;
  for (std::size_t c = 1; c < table.rows.front().size(); ++c) {
    if (auto y = year_of(table.rows.front()[c])) years.insert(*y);
  }
  for (const auto& [var, year] : required_pairs(ctx.node, ctx.time)) {
    if (!years.count(year)) {
      throw PipelineError(PipelineErrc::malformed_table_response,
                          "table lacks a column for " + std::to_string(year));
    }
  }
  for (const auto& var : base_variables(ctx.node)) {
    auto labels = cfg.vocab.labels_for(var);
    labels.push_back(display_name(var));
    if (auto it = ctx.labels.find(var); it != ctx.labels.end()) labels.push_back(it->second);
    bool found = false;
    for (std::size_t r = 1; r < table.rows.size() && !found; ++r) {
      for (const auto& l : labels) found |= normalize_label(table.rows[r].front()) == normalize_label(l);
    }
    if (!found) {
      throw PipelineError(PipelineErrc::malformed_table_response, "table has no row for " + var);
    }
  }
}

// Asks for a table up to `max_attempts` times; returns it in years-as-columns
// orientation after `accept` has approved it.
template <typename Accept>
Table request_table(const std::string& prompt, backend::TextGenerator& gen,
                    const backend::CallOptions& opts, const GenConfig& cfg, Accept accept) {
  std::string last;
  const int attempts = std::max(1, cfg.max_attempts);
  for (int i = 0; i < attempts; ++i) {
    try {
      Table t = transpose_table(backend::parse_table_response(gen.complete(prompt, opts)));
      accept(t);
      return t;
    } catch (const BackendError& e) {
      if (e.code() != backend::Errc::no_table_found && e.code() != backend::Errc::ragged_rows) {
        throw;
      }
      last = e.what();
    } catch (const PipelineError& e) {
      if (e.code() == PipelineErrc::contradiction_detected) throw;
      last = e.what();
    }
  }
  throw PipelineError(PipelineErrc::malformed_table_response,
                      "no usable table after " + std::to_string(attempts) + " attempts: " + last);
}

}  // namespace

std::vector<std::string> slices_of(const FormulaNode& node) {
  std::set<std::string> s;
  if (node.target.slice) s.insert(*node.target.slice);
  for (const auto& v : node.independents) {
    if (v.slice) s.insert(*v.slice);
  }
  std::vector<std::string> out(s.begin(), s.end());
  std::sort(out.begin(), out.end(), natural_less);
  return out;
}

std::vector<std::string> base_variables(const FormulaNode& node) {
  std::vector<std::string> out;
  for (const auto& v : dsl::variables(node.program)) {
    if (std::find(out.begin(), out.end(), v.name) == out.end()) out.push_back(v.name);
  }
  return out;
}

TimeContext generate_time(const FormulaNode& node, Rng& rng) {
  const auto slices = slices_of(node);
  const int k = std::max<int>(1, static_cast<int>(slices.size()));
  const int base = static_cast<int>(rng.uniform_int(1995, 2022 - k));
  const int extra = static_cast<int>(rng.uniform_int(0, 2));
  TimeContext t;
  for (int i = 0; i < k + extra; ++i) t.range.push_back(base + i);
  for (std::size_t i = 0; i < slices.size(); ++i) {
    t.slice_map[slices[i]] = base + static_cast<int>(i);
    t.question_points.push_back(base + static_cast<int>(i));
  }
  if (slices.empty()) t.question_points.push_back(base);
  return t;
}

std::string resolved_name(const std::string& variable, int year) {
  return variable + "_" + std::to_string(year);
}

std::vector<std::pair<std::string, int>> required_pairs(const FormulaNode& node,
                                                        const TimeContext& time) {
  std::vector<std::pair<std::string, int>> out;
  for (const auto& v : dsl::variables(node.program)) {
    std::pair<std::string, int> p{v.name, time.year_for(v.slice)};
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

dsl::Program resolve_program(const dsl::Program& program, const TimeContext& time) {
  dsl::Program out = program;
  for (auto& step : out.steps) {
    for (auto& arg : step.args) {
      if (auto* v = std::get_if<dsl::VarRef>(&arg)) {
        *v = dsl::VarRef(resolved_name(v->name, time.year_for(v->slice)));
      }
    }
  }
  return dsl::canonicalize(std::move(out));
}

FinancialReport generate_report_table_first(const ReportContext& ctx,
                                            backend::TextGenerator& gen, const GenConfig& cfg) {
  backend::CallOptions opts{cfg.temperature, ctx.seed};
  auto payload = base_payload(ctx);
  payload.distractors = ctx.distractors;
  Table table = request_table(prompt_for(TaskKind::table, payload, cfg), gen, opts, cfg,
                              [&](const Table& t) { check_table_first(t, ctx, cfg); });

  auto text_payload = base_payload(ctx);
  text_payload.artifact = render_table(table);
  auto text = backend::parse_text_response(
      gen.complete(prompt_for(TaskKind::table_text, text_payload, cfg), opts));
  FinancialReport report{text.pre_text, table, text.post_text};

  // Prose that restates a table value must agree with the table.
  for (const auto& var : base_variables(ctx.node)) {
    auto labels = cfg.vocab.labels_for(var);
    labels.push_back(display_name(var));
    for (int year : ctx.time.range) {
      FinancialReport table_only{{}, table, {}};
      auto cell = locate(table_only, labels, year, cfg.units);
      if (!cell) continue;
      const double want = read_number(*cell, cfg.is_ratio(var), cfg.units, var);
      for (const auto& s : all_sentences(report)) {
        for (const auto& l : labels) {
          auto said = sentence_amount(s, l, year, cfg.units);
          if (said && read_number(*said, cfg.is_ratio(var), cfg.units, var) != want) {
            throw PipelineError(PipelineErrc::contradiction_detected,
                                "text gives " + *said + " for " + var + " in " +
                                    std::to_string(year) + ", table gives " + *cell);
          }
        }
      }
    }
  }
  return report;
}

FinancialReport generate_report_text_first(const ReportContext& ctx, backend::TextGenerator& gen,
                                           const GenConfig& cfg) {
  backend::CallOptions opts{cfg.temperature, ctx.seed};
  auto text = backend::parse_text_response(
      gen.complete(prompt_for(TaskKind::text, base_payload(ctx), cfg), opts));

  backend::Payload table_payload;
  table_payload.years = ctx.time.range;
  table_payload.distractors = ctx.distractors;
  if (table_payload.distractors.empty()) table_payload.distractors.emplace_back(kGenericDistractor);
  std::string artifact;
  for (const auto& s : text.pre_text) artifact += s + '\n';
  for (const auto& s : text.post_text) artifact += s + '\n';
  table_payload.artifact = artifact;

  const auto node_labels = all_node_labels(ctx.node, cfg.vocab);
  Table table = request_table(
      prompt_for(TaskKind::text_table, table_payload, cfg), gen, opts, cfg, [&](const Table& t) {
        for (std::size_t r = 1; r < t.rows.size(); ++r) {
          for (const auto& l : node_labels) {
            if (mentions(t.rows[r].front(), l)) {
              throw PipelineError(PipelineErrc::contradiction_detected,
                                  "text-first table row '" + t.rows[r].front() + "' names '" + l +
                                      "'");
            }
          }
        }
      });
  return FinancialReport{text.pre_text, table, text.post_text};
}

dsl::Bindings extract_bindings(const FinancialReport& report, const FormulaNode& node,
                               const TimeContext& time, backend::TextGenerator& gen,
                               const GenConfig& cfg, std::uint64_t seed) {
  const auto pairs = required_pairs(node, time);
  backend::Payload payload;
  for (const auto& [var, year] : pairs) payload.required.push_back(var + "@" + std::to_string(year));
  payload.artifact = render_report(report);
  // Value reading is deterministic regardless of the generation temperature.
  const auto answer = backend::parse_extraction_response(
      gen.complete(prompt_for(TaskKind::extract, payload, cfg), {0.0, seed}));
  dsl::Bindings out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [var, year] = pairs[i];
    auto it = answer.find(payload.required[i]);
    if (it == answer.end()) {
      throw PipelineError(PipelineErrc::extraction_miss, "no value extracted for " +
                                                             payload.required[i]);
    }
    out[dsl::VarRef(resolved_name(var, year))] =
        read_number(it->second, cfg.is_ratio(var), cfg.units, payload.required[i]);
  }
  return out;
}

dsl::Bindings read_bindings(const FinancialReport& report, const FormulaNode& node,
                            const TimeContext& time, const GenConfig& cfg) {
  return read_pairs(report, required_pairs(node, time), cfg);
}

std::string render_question(const FormulaNode& node, const TimeContext& time,
                            const Templates& templates) {
  const std::string key = node.provenance.template_key();
  auto it = templates.by_key.find(key);
  if (it == templates.by_key.end()) {
    throw PipelineError(PipelineErrc::missing_template, "no question template for '" + key + "'");
  }
  std::string q = it->second;
  q = replace_all(q, "{target_display}", display_name(node.target.name));
  q = replace_all(q, "{year}", std::to_string(time.year_for(node.target.slice)));
  if (node.provenance.connector && node.provenance.slice_pair) {
    q = replace_all(q, "{v}", display_name(node.provenance.base_variable));
    q = replace_all(q, "{y1}", std::to_string(time.year_for(node.provenance.slice_pair->first)));
    q = replace_all(q, "{y2}", std::to_string(time.year_for(node.provenance.slice_pair->second)));
  }
  if (auto open = q.find('{'); open != std::string::npos && q.find('}', open) != std::string::npos) {
    throw PipelineError(PipelineErrc::missing_template,
                        "template '" + key + "' has a placeholder this node cannot fill");
  }
  return q;
}

std::vector<FactRef> match_supporting_facts(const FinancialReport& report,
                                            const std::vector<double>& program_args,
                                            const dsl::Bindings& bindings,
                                            const UnitTable& units) {
  std::vector<double> wanted = program_args;
  for (const auto& [k, v] : bindings) wanted.push_back(v);
  auto hit = [&](std::string_view text) {
    for (const auto& lit : find_numbers(text, units)) {
      for (double w : wanted) {
        if (literal_matches(lit, w)) return true;
      }
    }
    return false;
  };
  std::vector<FactRef> out;
  for (std::size_t i = 0; i < report.pre_text.size(); ++i) {
    if (hit(report.pre_text[i])) out.push_back({FactRef::Kind::text, i});
  }
  for (std::size_t r = 1; r < report.table.rows.size(); ++r) {
    const auto& row = report.table.rows[r];
    bool any = false;
    for (std::size_t c = 1; c < row.size() && !any; ++c) any = hit(row[c]);
    if (any) out.push_back({FactRef::Kind::table_row, r});
  }
  for (std::size_t i = 0; i < report.post_text.size(); ++i) {
    if (hit(report.post_text[i])) out.push_back({FactRef::Kind::text, report.pre_text.size() + i});
  }
  return out;
}

QAExample assemble_example(const FormulaNode& node, const FinancialReport& report,
                           const dsl::Bindings& bindings, const TimeContext& time,
                           const std::string& question, SupportKind support_kind,
                           const UnitTable& units) {
  QAExample ex;
  ex.report = report;
  ex.question = question;
  ex.program = resolve_program(node.program, time);
  ex.support_kind = support_kind;
  ex.source_node = node.id;
  ex.time = time;
  for (const auto& v : dsl::variables(ex.program)) {
    if (auto it = bindings.find(v); it != bindings.end()) ex.bindings.insert(*it);
  }
  try {
    auto value = dsl::execute(ex.program, bindings);
    ex.exe_ans = value.is_number() ? dsl::Value::number(dsl::round_to(value.as_number(), 5)) : value;
  } catch (const dsl::Error& e) {
    throw PipelineError(PipelineErrc::execution_error,
                        std::string(dsl::errc_name(e.code())) + ": " + e.what(), e.code());
  }
  ex.gold_inds = match_supporting_facts(report, dsl::constants(ex.program), ex.bindings, units);
  if (ex.gold_inds.empty()) {
    throw PipelineError(PipelineErrc::no_supporting_facts, "no sentence or row holds a used value");
  }
  return ex;
}

bool is_direct_lookup(const QAExample& example, const UnitTable& units) {
  if (!example.exe_ans.is_number()) return false;
  const double answer = example.exe_ans.as_number();
  auto has = [&](std::string_view text) {
    for (const auto& lit : find_numbers(text, units)) {
      if (literal_matches(lit, answer)) return true;
    }
    return false;
  };
  for (const auto& s : all_sentences(example.report)) {
    if (has(s)) return true;
  }
  for (std::size_t r = 1; r < example.report.table.rows.size(); ++r) {
    const auto& row = example.report.table.rows[r];
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (has(row[c])) return true;
    }
  }
  return false;
}

QAExample generate_example(const FormulaNode& node, std::size_t index, backend::TextGenerator& gen,
                           const GenConfig& cfg) {
  const std::uint64_t seed = derive_seed(cfg.seed, node.id, index);
  Rng rng(seed);
  const TimeContext time = generate_time(node, rng);
  const std::string question = render_question(node, time, cfg.templates);

  std::map<std::string, std::string> labels;
  for (const auto& v : base_variables(node)) labels[v] = rng.pick(cfg.vocab.labels_for(v));

  const auto node_labels = all_node_labels(node, cfg.vocab);
  std::vector<std::string> pool;
  for (const auto& d : cfg.vocab.distractors) {
    bool clash = std::any_of(node_labels.begin(), node_labels.end(),
                             [&](const std::string& l) { return mentions(d, l) || mentions(l, d); });
    if (!clash) pool.push_back(d);
  }
  std::vector<std::string> distractors;
  while (distractors.size() < cfg.distractor_rows && !pool.empty()) {
    auto i = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1));
    distractors.push_back(pool[i]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
  }

  ReportContext ctx{node, time, labels, distractors, seed};
  const bool table_first = index % 2 == 0;
  FinancialReport report = table_first ? generate_report_table_first(ctx, gen, cfg)
                                       : generate_report_text_first(ctx, gen, cfg);
  dsl::Bindings bindings = extract_bindings(report, node, time, gen, cfg, seed);
  QAExample ex = assemble_example(node, report, bindings, time, question,
                                  table_first ? SupportKind::table : SupportKind::text, cfg.units);
  ex.id = node.id + "/" + std::to_string(index);
  return ex;
}

bool self_consistent(const QAExample& example, const GenConfig& cfg) {
  try {
    auto bindings = read_pairs(example.report, pairs_of_resolved(example.program), cfg);
    auto value = dsl::execute(example.program, bindings);
    if (value.is_boolean()) return example.exe_ans == value;
    return example.exe_ans.is_number() &&
           dsl::round_to(value.as_number(), 5) == example.exe_ans.as_number();
  } catch (const std::exception&) {
    return false;
  }
}

GenerationResult generate_dataset(const graph::FormulaGraph& graph, const GenConfig& cfg,
                                  backend::TextGenerator& gen) {
  for (auto task : {TaskKind::table, TaskKind::table_text, TaskKind::text, TaskKind::text_table,
                    TaskKind::extract}) {
    try {
      backend::select_exemplars(cfg.exemplars, task, cfg.shot_mode);
    } catch (const BackendError& e) {
      throw BackendError(backend::Errc::config_error, e.what());
    }
  }

  std::vector<std::pair<const FormulaNode*, std::size_t>> jobs;
  for (const auto& [id, node] : graph.nodes()) {
    for (std::size_t i = 0; i < cfg.examples_per_node; ++i) jobs.emplace_back(&node, i);
  }
  std::vector<std::optional<QAExample>> results(jobs.size());
  std::vector<std::pair<std::string, std::string>> failures(jobs.size());  // (reason, message)

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex fatal_mu;
  std::exception_ptr fatal;
  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        results[j] = generate_example(*jobs[j].first, jobs[j].second, gen, cfg);
      } catch (const BackendError& e) {
        if (e.code() == backend::Errc::auth_error || e.code() == backend::Errc::unreachable ||
            e.code() == backend::Errc::config_error) {
          std::lock_guard lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
          abort = true;
          return;
        }
        failures[j] = {std::string(backend::errc_name(e.code())), e.what()};
      } catch (const PipelineError& e) {
        failures[j] = {std::string(pipeline_errc_name(e.code())), e.what()};
      } catch (const std::exception& e) {
        failures[j] = {"Error", e.what()};
      }
    }
  };
  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min(cfg.max_concurrency, jobs.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (fatal) std::rethrow_exception(fatal);

  GenerationResult out;
  auto& s = out.summary;
  s.attempted = jobs.size();
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const std::string id = jobs[j].first->id + "/" + std::to_string(jobs[j].second);
    if (!results[j]) {
      ++s.skipped;
      ++s.skip_reasons[failures[j].first];
      s.log.push_back("skip " + id + ": " + failures[j].first + ": " + failures[j].second);
      continue;
    }
    if (self_consistent(*results[j], cfg)) {
      ++s.audit_passed;
    } else {
      s.log.push_back("audit " + id + ": answer not reproduced from the report");
    }
    if (is_direct_lookup(*results[j], cfg.units)) {
      ++s.direct_lookups;
      s.log.push_back("note " + id + ": answer appears verbatim in the report");
    }
    out.examples.push_back(std::move(*results[j]));
  }
  s.emitted = out.examples.size();
  std::sort(out.examples.begin(), out.examples.end(),
            [](const QAExample& a, const QAExample& b) { return a.id < b.id; });
  return out;
}

std::string format_summary(const GenerationSummary& s) {
  std::ostringstream os;
  os << "attempted " << s.attempted << ", emitted " << s.emitted << ", skipped " << s.skipped
     << '\n';
  os << "self-consistency " << s.audit_passed << "/" << s.emitted << '\n';
  os << "direct lookups " << s.direct_lookups << '\n';
  for (const auto& [reason, n] : s.skip_reasons) os << "skip " << reason << ": " << n << '\n';
  return os.str();
}

}  // namespace finsynth::genpipe
