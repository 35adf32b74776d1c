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

#include <cstdio>
#include <map>

#include "finsynth/dataset.hpp"
#include "finsynth/formula.hpp"
#include "finsynth/rng.hpp"

namespace finsynth::datasetio {
namespace {

using nlohmann::json;

std::string report_uid(const FinancialReport& r) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(render_report(r))));
  return buf;
}

std::string derivation(const QAExample& ex) {
  return render_infix(ex.program, [&](const dsl::Operand& op) -> std::string {
    if (const auto* c = std::get_if<dsl::Constant>(&op)) return dsl::format_number(c->value);
    const auto& v = std::get<dsl::VarRef>(op);
    auto it = ex.bindings.find(v);
    return it == ex.bindings.end() ? v.str() : dsl::format_number(it->second);
  });
}

}  // namespace

TatqaConversion convert_tatqa(const std::vector<QAExample>& examples) {
  TatqaConversion out;
  std::map<std::string, std::size_t> group_of;  // report uid -> index in records
  for (const auto& ex : examples) {
    if (ex.exe_ans.is_boolean()) {
      ++out.skipped;
      out.log.push_back("skip " + ex.id + ": " + std::string(errc_name(Errc::unsupported_answer)) +
                        ": yes/no answer has no arithmetic derivation");
      continue;
    }
    const std::string uid = report_uid(ex.report);
    auto [it, fresh] = group_of.emplace(uid, out.records.size());
    if (fresh) {
      json paragraphs = json::array();
      std::size_t order = 1;
      for (const auto* part : {&ex.report.pre_text, &ex.report.post_text}) {
        for (const auto& s : *part) {
          paragraphs.push_back(
              {{"uid", uid + "-" + std::to_string(order)}, {"order", order}, {"text", s}});
          ++order;
        }
      }
      out.records.push_back({{"table", {{"uid", uid}, {"table", ex.report.table.rows}}},
                             {"paragraphs", paragraphs},
                             {"questions", json::array()}});
    }
    json& questions = out.records[it->second]["questions"];
    questions.push_back({
        {"uid", ex.id},
        {"order", questions.size() + 1},
        {"question", ex.question},
        {"answer", ex.exe_ans.as_number()},
        {"derivation", derivation(ex)},
        {"answer_type", "arithmetic"},
        {"answer_from", support_kind_name(ex.support_kind)},
        {"scale", ""},
    });
  }
  return out;
}

}  // namespace finsynth::datasetio
