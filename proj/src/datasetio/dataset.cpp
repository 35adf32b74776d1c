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

#include "finsynth/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "finsynth/rng.hpp"

namespace finsynth::datasetio {
namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& id, const std::string& msg) {
  throw DatasetError(Errc::schema_error, (id.empty() ? "record" : "record '" + id + "'") + ": " + msg);
}

// Position of a fact in reading order: pre text, table rows, post text.
std::pair<int, std::size_t> document_position(const FinancialReport& r, const FactRef& f) {
  if (f.kind == FactRef::Kind::table_row) return {1, f.index};
  if (f.index < r.pre_text.size()) return {0, f.index};
  return {2, f.index};
}

json value_to_json(const dsl::Value& v) {
  if (v.is_boolean()) return v.as_boolean() ? "yes" : "no";
  return v.as_number();
}

dsl::Value value_from_json(const json& j, const std::string& id) {
  if (j.is_number()) return dsl::Value::number(j.get<double>());
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "yes") return dsl::Value::boolean(true);
    if (s == "no") return dsl::Value::boolean(false);
  }
  schema(id, "exe_ans must be a number, \"yes\" or \"no\"");
}

std::vector<std::string> strings(const json& j, const char* field, const std::string& id) {
  if (!j.is_array()) schema(id, std::string(field) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& s : j) {
    if (!s.is_string()) schema(id, std::string(field) + " must be an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::string numeric_program(const QAExample& ex) {
  dsl::Program p = ex.program;
  for (auto& step : p.steps) {
    for (auto& arg : step.args) {
      if (auto* v = std::get_if<dsl::VarRef>(&arg)) {
        auto it = ex.bindings.find(*v);
        if (it == ex.bindings.end()) return "";
        arg = dsl::Constant{it->second};
      }
    }
  }
  return dsl::serialize(p);
}

void fill_percent(Histogram& h, std::size_t total) {
  for (const auto& [k, n] : h.counts) {
    h.percent[k] = total == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(total);
  }
}

Histogram empty_histogram(std::initializer_list<const char*> keys) {
  Histogram h;
  for (const char* k : keys) h.counts[k] = 0;
  return h;
}

std::string gold_bucket(std::size_t n) { return n > 3 ? ">3" : std::to_string(n); }
std::string step_bucket(std::size_t n) { return n > 4 ? ">4" : std::to_string(n); }

}  // namespace

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::io_error: return "IoError";
    case Errc::schema_error: return "SchemaError";
    case Errc::unsupported_answer: return "UnsupportedAnswer";
    case Errc::too_few_examples: return "TooFewExamples";
  }
  return "Unknown";
}

void validate_example(const QAExample& ex) {
  if (ex.id.empty()) schema(ex.id, "empty id");
  if (!is_rectangular(ex.report.table)) schema(ex.id, "table rows differ in length");
  try {
    dsl::validate(ex.program);
  } catch (const dsl::Error& e) {
    schema(ex.id, std::string("invalid program: ") + e.what());
  }
  if (ex.gold_inds.empty()) schema(ex.id, "gold_inds is empty");
  for (const auto& f : ex.gold_inds) {
    if (!fact_in_range(ex.report, f)) schema(ex.id, "gold fact " + f.key() + " is out of range");
  }
  for (int y : ex.time.question_points) {
    if (std::find(ex.time.range.begin(), ex.time.range.end(), y) == ex.time.range.end()) {
      schema(ex.id, "question year " + std::to_string(y) + " is outside the time range");
    }
  }
  if (ex.exe_ans.is_number() && !std::isfinite(ex.exe_ans.as_number())) {
    schema(ex.id, "exe_ans is not finite");
  }
  const auto vars = dsl::variables(ex.program);
  const bool all_bound = std::all_of(vars.begin(), vars.end(),
                                     [&](const dsl::VarRef& v) { return ex.bindings.count(v); });
  if (all_bound) {
    dsl::Value got;
    try {
      got = dsl::execute(ex.program, ex.bindings);
    } catch (const dsl::Error& e) {
      schema(ex.id, std::string("program does not execute: ") + e.what());
    }
    const bool same = got.is_boolean()
                          ? got == ex.exe_ans
                          : ex.exe_ans.is_number() &&
                                std::fabs(dsl::round_to(got.as_number(), 5) -
                                          ex.exe_ans.as_number()) <= 1e-5;
    if (!same) schema(ex.id, "exe_ans does not match the program on the recorded bindings");
  }
}

json to_json(const QAExample& ex) {
  json gold = json::object();
  for (const auto& f : ex.gold_inds) gold[f.key()] = fact_text(ex.report, f);
  json bindings = json::object();
  for (const auto& [k, v] : ex.bindings) bindings[k.str()] = v;
  json qa = {
      {"question", ex.question},
      {"program", dsl::serialize(ex.program)},
      {"exe_ans", value_to_json(ex.exe_ans)},
      {"gold_inds", gold},
      {"bindings", bindings},
  };
  if (auto numeric = numeric_program(ex); !numeric.empty()) qa["program_numeric"] = numeric;
  json slice_map = json::object();
  for (const auto& [k, v] : ex.time.slice_map) slice_map[k] = v;
  return {
      {"id", ex.id},
      {"pre_text", ex.report.pre_text},
      {"post_text", ex.report.post_text},
      {"table", ex.report.table.rows},
      {"qa", qa},
      {"meta",
       {{"support_kind", support_kind_name(ex.support_kind)},
        {"source_node", ex.source_node},
        {"time",
         {{"range", ex.time.range},
          {"question_points", ex.time.question_points},
          {"slice_map", slice_map}}}}},
  };
}

QAExample from_json(const json& r) {
  QAExample ex;
  if (!r.is_object()) schema("", "record is not an object");
  if (!r.contains("id") || !r["id"].is_string()) schema("", "missing string field 'id'");
  ex.id = r["id"].get<std::string>();
  for (const char* f : {"pre_text", "post_text", "table", "qa"}) {
    if (!r.contains(f)) schema(ex.id, std::string("missing field '") + f + "'");
  }
  ex.report.pre_text = strings(r["pre_text"], "pre_text", ex.id);
  ex.report.post_text = strings(r["post_text"], "post_text", ex.id);
  if (!r["table"].is_array()) schema(ex.id, "table must be an array of rows");
  for (const auto& row : r["table"]) ex.report.table.rows.push_back(strings(row, "table row", ex.id));

  const json& qa = r["qa"];
  for (const char* f : {"question", "program", "exe_ans", "gold_inds"}) {
    if (!qa.contains(f)) schema(ex.id, std::string("missing field 'qa.") + f + "'");
  }
  if (!qa["question"].is_string()) schema(ex.id, "qa.question must be a string");
  ex.question = qa["question"].get<std::string>();
  if (!qa["program"].is_string()) schema(ex.id, "qa.program must be a string");
  try {
    ex.program = dsl::parse_program(qa["program"].get<std::string>());
    dsl::validate(ex.program);
  } catch (const dsl::Error& e) {
    schema(ex.id, std::string("unparseable program: ") + e.what());
  }
  ex.exe_ans = value_from_json(qa["exe_ans"], ex.id);
  if (!qa["gold_inds"].is_object()) schema(ex.id, "qa.gold_inds must be an object");
  for (const auto& [key, text] : qa["gold_inds"].items()) {
    auto f = FactRef::from_key(key);
    if (!f) schema(ex.id, "bad gold key '" + key + "'");
    ex.gold_inds.push_back(*f);
  }
  std::sort(ex.gold_inds.begin(), ex.gold_inds.end(), [&](const FactRef& a, const FactRef& b) {
    return document_position(ex.report, a) < document_position(ex.report, b);
  });
  if (qa.contains("bindings")) {
    if (!qa["bindings"].is_object()) schema(ex.id, "qa.bindings must be an object");
    for (const auto& [key, v] : qa["bindings"].items()) {
      if (!v.is_number()) schema(ex.id, "binding '" + key + "' is not a number");
      ex.bindings[dsl::VarRef(key)] = v.get<double>();
    }
  }
  if (r.contains("meta")) {
    const json& m = r["meta"];
    try {
      auto kind = m.value("support_kind", std::string("table"));
      if (kind != "table" && kind != "text") schema(ex.id, "unknown support_kind '" + kind + "'");
      ex.support_kind = kind == "text" ? SupportKind::text : SupportKind::table;
      ex.source_node = m.value("source_node", std::string());
      if (m.contains("time")) {
        const json& t = m["time"];
        ex.time.range = t.value("range", std::vector<int>{});
        ex.time.question_points = t.value("question_points", std::vector<int>{});
        ex.time.slice_map = t.value("slice_map", std::map<std::string, int>{});
      }
    } catch (const json::exception& e) {
      schema(ex.id, std::string("malformed meta: ") + e.what());
    }
  }
  validate_example(ex);
  return ex;
}

std::string dump_dataset(std::vector<QAExample> examples) {
  std::sort(examples.begin(), examples.end(),
            [](const QAExample& a, const QAExample& b) { return a.id < b.id; });
  json arr = json::array();
  for (const auto& ex : examples) {
    validate_example(ex);
    arr.push_back(to_json(ex));
  }
  return arr.dump(2) + "\n";
}

std::vector<QAExample> parse_dataset(const std::string& text) {
  json arr = json::parse(text, nullptr, false);
  if (arr.is_discarded()) throw DatasetError(Errc::schema_error, "dataset is not valid JSON");
  if (!arr.is_array()) throw DatasetError(Errc::schema_error, "dataset must be a JSON array");
  std::vector<QAExample> out;
  std::set<std::string> ids;
  for (const auto& r : arr) {
    out.push_back(from_json(r));
    if (!ids.insert(out.back().id).second) schema(out.back().id, "duplicate id");
  }
  return out;
}

void write_dataset(const std::vector<QAExample>& examples, const std::string& path) {
  const std::string text = dump_dataset(examples);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError(Errc::io_error, "cannot write '" + path + "'");
  out << text;
  if (!out) throw DatasetError(Errc::io_error, "write to '" + path + "' failed");
}

std::vector<QAExample> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(Errc::io_error, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

SplitSizes split_sizes(std::size_t n, const SplitSpec& spec) {
  for (double f : {spec.train, spec.dev, spec.test}) {
    if (!(f >= 0.0 && f <= 1.0)) throw std::invalid_argument("split fractions must lie in [0, 1]");
  }
  if (std::fabs(spec.train + spec.dev + spec.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }
  if (n < 3) {
    throw DatasetError(Errc::too_few_examples,
                       "need at least 3 examples to split, got " + std::to_string(n));
  }
  SplitSizes s;
  s.dev = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.dev));
  s.test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.test));
  s.train = n - s.dev - s.test;
  return s;
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
  const SplitSizes sizes = split_sizes(n, spec);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(spec.seed);
  for (std::size_t i = n; i > 1; --i) {
    auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(order[i - 1], order[j]);
  }
  SplitIndices out;
  auto begin = order.begin();
  out.train.assign(begin, begin + static_cast<std::ptrdiff_t>(sizes.train));
  begin += static_cast<std::ptrdiff_t>(sizes.train);
  out.dev.assign(begin, begin + static_cast<std::ptrdiff_t>(sizes.dev));
  begin += static_cast<std::ptrdiff_t>(sizes.dev);
  out.test.assign(begin, order.end());
  return out;
}

Splits split(const std::vector<QAExample>& examples, const SplitSpec& spec) {
  // Shuffle from id order so the partition does not depend on input order.
  std::vector<const QAExample*> sorted;
  for (const auto& ex : examples) sorted.push_back(&ex);
  std::sort(sorted.begin(), sorted.end(),
            [](const QAExample* a, const QAExample* b) { return a->id < b->id; });
  const auto idx = split_indices(examples.size(), spec);
  Splits out;
  for (auto i : idx.train) out.train.push_back(*sorted[i]);
  for (auto i : idx.dev) out.dev.push_back(*sorted[i]);
  for (auto i : idx.test) out.test.push_back(*sorted[i]);
  return out;
}

std::vector<QAExample> merge(const std::vector<QAExample>& a, const std::vector<QAExample>& b) {
  std::set<std::string> ids_a, ids_b;
  for (const auto& ex : a) ids_a.insert(ex.id);
  for (const auto& ex : b) ids_b.insert(ex.id);
  std::vector<QAExample> out;
  for (const auto& ex : a) {
    validate_example(ex);
    out.push_back(ex);
    if (ids_b.count(ex.id)) out.back().id = "a/" + ex.id;
  }
  for (const auto& ex : b) {
    validate_example(ex);
    out.push_back(ex);
    if (ids_a.count(ex.id)) out.back().id = "b/" + ex.id;
  }
  std::set<std::string> seen;
  for (const auto& ex : out) {
    if (!seen.insert(ex.id).second) schema(ex.id, "id collides after merging");
  }
  return out;
}

DatasetStats dataset_stats(const std::vector<QAExample>& examples) {
  DatasetStats s;
  s.total = examples.size();
  s.gold_inds = empty_histogram({"1", "2", "3", ">3"});
  s.steps = empty_histogram({"1", "2", "3", "4", ">4"});
  s.support_kind = empty_histogram({"table", "text"});
  for (const auto& ex : examples) {
    if (!ex.gold_inds.empty()) ++s.gold_inds.counts[gold_bucket(ex.gold_inds.size())];
    ++s.steps.counts[step_bucket(ex.program.size())];
    ++s.support_kind.counts[std::string(support_kind_name(ex.support_kind))];
  }
  fill_percent(s.gold_inds, s.total);
  fill_percent(s.steps, s.total);
  fill_percent(s.support_kind, s.total);
  return s;
}

DatasetStats dataset_stats_json(const json& records) {
  if (!records.is_array()) throw DatasetError(Errc::schema_error, "dataset must be a JSON array");
  DatasetStats s;
  s.total = records.size();
  s.gold_inds = empty_histogram({"1", "2", "3", ">3"});
  s.steps = empty_histogram({"1", "2", "3", "4", ">4"});
  s.support_kind = empty_histogram({"table", "text"});
  for (const auto& r : records) {
    const json qa = r.contains("qa") ? r["qa"] : json::object();
    std::vector<std::string> keys;
    if (qa.contains("gold_inds")) {
      const auto& g = qa["gold_inds"];
      if (g.is_object()) {
        for (const auto& [k, v] : g.items()) keys.push_back(k);
      } else if (g.is_array()) {
        for (const auto& k : g) keys.push_back(k.is_string() ? k.get<std::string>() : "");
      }
    }
    if (!keys.empty()) ++s.gold_inds.counts[gold_bucket(keys.size())];

    std::string kind;
    if (r.contains("meta") && r["meta"].contains("support_kind")) {
      kind = r["meta"]["support_kind"].get<std::string>();
    } else {
      kind = std::any_of(keys.begin(), keys.end(),
                         [](const std::string& k) { return k.rfind("text", 0) == 0; })
                 ? "text"
                 : "table";
    }
    ++s.support_kind.counts[kind];

    if (qa.contains("program") && qa["program"].is_string()) {
      const auto prog = qa["program"].get<std::string>();
      ++s.steps.counts[step_bucket(
          static_cast<std::size_t>(std::count(prog.begin(), prog.end(), '(')))];
    }
  }
  fill_percent(s.gold_inds, s.total);
  fill_percent(s.steps, s.total);
  fill_percent(s.support_kind, s.total);
  return s;
}

std::string format_stats(const DatasetStats& s) {
  std::ostringstream os;
  os << "examples " << s.total << '\n';
  auto section = [&](const char* title, const Histogram& h) {
    os << title << '\n';
    for (const auto& [k, n] : h.counts) {
      os << "  " << std::left << std::setw(6) << k << std::right << std::setw(8) << n << "  "
         << std::fixed << std::setprecision(2) << h.percent.at(k) << "%\n";
    }
  };
  section("gold_inds", s.gold_inds);
  section("steps", s.steps);
  section("support_kind", s.support_kind);
  return os.str();
}

}  // namespace finsynth::datasetio
