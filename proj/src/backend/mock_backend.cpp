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

#include "finsynth/mock_backend.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "finsynth/rng.hpp"

namespace finsynth::backend {
namespace {

constexpr std::string_view kFiller[] = {
    "the company operates in a single reportable segment .",
    "management reviews these amounts on a quarterly basis .",
    "the following table summarizes selected financial information .",
    "amounts are presented in accordance with generally accepted accounting principles .",
    "the comparability of these results was affected by changes in the product mix .",
    "see the notes to the consolidated financial statements for additional detail .",
    "no significant acquisitions were completed during the periods presented .",
    "foreign currency movements did not have a material effect on these results .",
    "pricing actions partially offset higher input costs .",
    "the board of directors approved the annual operating plan .",
};

// Every phrasing starts with the label and states the amount before the year.
constexpr std::string_view kValuePhrases[] = {
    "{label} was {value} in {year} .",
    "{label} amounted to {value} for fiscal {year} .",
    "{label} came in at {value} during {year} .",
    "{label} totaled {value} in fiscal {year} .",
};

std::string fixed_text(double v, int places) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", places, v);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string with_commas(const std::string& plain) {
  std::string sign, body = plain;
  if (!body.empty() && body.front() == '-') {
    sign = "-";
    body.erase(0, 1);
  }
  auto dot = body.find('.');
  std::string whole = body.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : body.substr(dot);
  std::string grouped;
  for (std::size_t i = 0; i < whole.size(); ++i) {
    if (i > 0 && (whole.size() - i) % 3 == 0) grouped += ',';
    grouped += whole[i];
  }
  return sign + grouped + frac;
}

std::string replace_all(std::string s, std::string_view key, const std::string& value) {
  for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size())) {
    s.replace(pos, key.size(), value);
  }
  return s;
}

LedgerEntry make_entry(const ValueModel& model, const std::string& variable, double v, Rng& rng,
                       bool allow_scaled) {
  LedgerEntry e;
  if (model.is_ratio(variable)) {
    e.display = fixed_text(dsl::round_to(v * 100.0, 2), 2) + "%";
  } else {
    const std::string sign = v < 0 ? "-" : "";
    const double mag = std::fabs(v);
    const auto style = rng.uniform_int(0, allow_scaled && mag >= 1000.0 ? 3 : 2);
    switch (style) {
      case 0: e.display = sign + fixed_text(mag, 2); break;
      case 1: e.display = sign + "$ " + fixed_text(mag, 2); break;
      case 2: e.display = sign + "$" + with_commas(fixed_text(mag, 2)); break;
      default: e.display = sign + fixed_text(mag / 1000.0, 3) + " thousand"; break;
    }
  }
  e.value = normalize_value(e.display, model.is_ratio(variable), model.units);
  return e;
}

LedgerEntry entry_impl(const ValueModel& model, std::uint64_t seed, const std::string& variable,
                       int year, std::set<std::string>& visiting) {
  Rng rng(derive_seed(seed, variable, static_cast<std::uint64_t>(year)));
  auto book = model.book.find(variable);
  if (book != model.book.end() && !visiting.count(variable)) {
    visiting.insert(variable);
    dsl::Bindings inputs;
    for (const auto& v : dsl::variables(book->second.program)) {
      inputs[v] = entry_impl(model, seed, v.name, year, visiting).value;
    }
    visiting.erase(variable);
    try {
      auto r = dsl::execute(book->second.program, inputs);
      if (r.is_number()) {
        double v = model.is_ratio(variable) ? r.as_number() : dsl::round_to(r.as_number(), 2);
        return make_entry(model, variable, v, rng, false);
      }
    } catch (const dsl::Error&) {
      // Fall through to an independent draw.
    }
  }
  double v;
  if (model.is_ratio(variable)) {
    v = rng.log_uniform(model.ratio_range.first, model.ratio_range.second);
  } else {
    auto range = model.ranges.find(variable);
    auto [lo, hi] = range == model.ranges.end() ? model.default_range : range->second;
    v = dsl::round_to(rng.log_uniform(lo, hi), 2);
  }
  return make_entry(model, variable, v, rng, true);
}

std::string identifier_for(const std::string& label) {
  std::string out;
  for (char c : normalize_label(label)) out += c == ' ' ? '_' : c;
  return out;
}

std::string label_at(const Payload& p, std::size_t i) {
  return i < p.labels.size() && !p.labels[i].empty() ? p.labels[i] : display_name(p.variables[i]);
}

std::string render_rows(const ValueModel& model, std::uint64_t seed,
                        const std::vector<std::pair<std::string, std::string>>& rows,
                        const std::vector<int>& years) {
  std::ostringstream os;
  os << "| |";
  for (int y : years) os << ' ' << y << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < years.size(); ++i) os << "---|";
  os << '\n';
  for (const auto& [variable, label] : rows) {
    os << "| " << label << " |";
    for (int y : years) os << ' ' << ledger_entry(model, seed, variable, y).display << " |";
    os << '\n';
  }
  return os.str();
}

std::string mock_table(const ValueModel& model, std::uint64_t seed, const Payload& p) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (std::size_t i = 0; i < p.variables.size(); ++i) rows.emplace_back(p.variables[i], label_at(p, i));
  for (const auto& d : p.distractors) rows.emplace_back(identifier_for(d), d);
  return render_rows(model, seed, rows, p.years);
}

std::string mock_text_table(const ValueModel& model, std::uint64_t seed, const Payload& p) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& d : p.distractors) rows.emplace_back(identifier_for(d), d);
  if (rows.empty()) rows.emplace_back("other_items", "other items");
  return render_rows(model, seed, rows, p.years);
}

std::vector<std::string> filler(Rng& rng, std::size_t n) {
  std::vector<std::string> out;
  std::set<std::size_t> used;
  while (out.size() < n) {
    auto i = static_cast<std::size_t>(rng.uniform_int(0, std::size(kFiller) - 1));
    if (used.insert(i).second) out.emplace_back(kFiller[i]);
  }
  return out;
}

std::string join_text(const std::vector<std::string>& pre, const std::vector<std::string>& post) {
  std::string out;
  for (const auto& s : pre) out += s + '\n';
  out += "---\n";
  for (const auto& s : post) out += s + '\n';
  return out;
}

std::string mock_table_text(std::uint64_t seed, const Payload& p) {
  Rng rng(derive_seed(seed, "table_text", 0));
  auto pre = filler(rng, 2);
  auto post = filler(rng, 1);
  try {
    Table t = parse_table_response(p.artifact);
    const auto& row = t.rows[static_cast<std::size_t>(
        rng.uniform_int(1, static_cast<std::int64_t>(t.rows.size()) - 1))];
    auto col = static_cast<std::size_t>(
        rng.uniform_int(1, static_cast<std::int64_t>(row.size()) - 1));
    pre.push_back(row.front() + " stood at " + row[col] + " at the end of " + t.rows[0][col] +
                  " .");
  } catch (const BackendError&) {
    // No table to restate; context sentences only.
  }
  return join_text(pre, post);
}

std::string mock_text(const ValueModel& model, std::uint64_t seed, const Payload& p) {
  Rng rng(derive_seed(seed, "text", 0));
  std::vector<std::string> stated;
  for (std::size_t i = 0; i < p.variables.size(); ++i) {
    for (int y : p.years) {
      std::string s(kValuePhrases[rng.uniform_int(0, std::size(kValuePhrases) - 1)]);
      s = replace_all(s, "{label}", label_at(p, i));
      s = replace_all(s, "{value}", ledger_entry(model, seed, p.variables[i], y).display);
      s = replace_all(s, "{year}", std::to_string(y));
      stated.push_back(s);
    }
  }
  auto pre = filler(rng, 1);
  auto post = filler(rng, 1);
  const std::size_t half = (stated.size() + 1) / 2;
  pre.insert(pre.end(), stated.begin(), stated.begin() + static_cast<std::ptrdiff_t>(half));
  post.insert(post.begin(), stated.begin() + static_cast<std::ptrdiff_t>(half), stated.end());
  return join_text(pre, post);
}

std::string mock_extract(const ValueModel& model, std::uint64_t seed, const Payload& p) {
  std::string out;
  for (const auto& key : p.required) {
    auto at = key.find('@');
    if (at == std::string::npos) continue;
    int year = 0;
    try {
      year = std::stoi(key.substr(at + 1));
    } catch (const std::exception&) {
      continue;
    }
    out += key + " = " + ledger_entry(model, seed, key.substr(0, at), year).display + '\n';
  }
  return out;
}

}  // namespace

bool ValueModel::is_ratio(const std::string& variable) const {
  for (const auto& suffix : ratio_suffixes) {
    if (variable.size() >= suffix.size() &&
        variable.compare(variable.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return true;
    }
  }
  return false;
}

ValueModel ValueModel::from_seeds(const std::vector<FormulaNode>& seeds) {
  ValueModel m;
  for (const auto& n : seeds) {
    if (!n.target.slice) m.book.emplace(n.target.name, n);
  }
  return m;
}

LedgerEntry ledger_entry(const ValueModel& model, std::uint64_t seed, const std::string& variable,
                         int year) {
  std::set<std::string> visiting;
  return entry_impl(model, seed, variable, year, visiting);
}

Ledger mock_ledger(const FormulaNode& node, const TimeContext& time, std::uint64_t seed,
                   const ValueModel& model) {
  Ledger out;
  for (const auto& v : node.independents) {
    for (int y : time.range) out[{v.name, y}] = ledger_entry(model, seed, v.name, y);
  }
  return out;
}

std::string MockBackend::complete(const std::string& prompt, const CallOptions& options) {
  auto parsed = parse_prompt(prompt);
  if (!parsed) return "I could not find a task in this request.";
  const auto& p = parsed->payload;
  switch (parsed->task) {
    case TaskKind::table: return mock_table(model_, options.seed, p);
    case TaskKind::table_text: return mock_table_text(options.seed, p);
    case TaskKind::text: return mock_text(model_, options.seed, p);
    case TaskKind::text_table: return mock_text_table(model_, options.seed, p);
    case TaskKind::extract: return mock_extract(model_, options.seed, p);
  }
  return "";
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses)
    : responses_(responses.begin(), responses.end()) {}

std::string ScriptedBackend::complete(const std::string& prompt, const CallOptions&) {
  std::lock_guard lock(mu_);
  prompts_.push_back(prompt);
  if (responses_.empty()) throw BackendError(Errc::malformed_response, "script exhausted");
  std::string r = std::move(responses_.front());
  responses_.pop_front();
  return r;
}

std::vector<std::string> ScriptedBackend::prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

}  // namespace finsynth::backend
