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

#include "finsynth/metrics.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace finsynth::metrics {

Verdict program_accuracy(const std::string& predicted, const std::string& gold) {
  dsl::Program p, g;
  try {
    p = dsl::canonicalize(dsl::parse_program(predicted));
  } catch (const dsl::Error& e) {
    return {false, "parse failure: " + std::string(dsl::errc_name(e.code()))};
  }
  try {
    g = dsl::canonicalize(dsl::parse_program(gold));
  } catch (const dsl::Error& e) {
    return {false, "gold parse failure: " + std::string(dsl::errc_name(e.code()))};
  }
  if (p == g) return {true, ""};
  return {false, "program differs"};
}

bool answers_match(const dsl::Value& predicted, const dsl::Value& gold, double tol) {
  if (predicted.is_boolean() || gold.is_boolean()) return predicted == gold;
  return std::fabs(dsl::round_to(predicted.as_number(), 5) - dsl::round_to(gold.as_number(), 5)) <=
         tol;
}

Verdict execution_accuracy(const Prediction& pred, const QAExample& gold, double tol) {
  std::string failure;
  if (pred.program) {
    // The gold program executes to the gold answer, so a matching program is
    // a correct execution even when the gold record carries no bindings.
    if (program_accuracy(*pred.program, dsl::serialize(gold.program)).correct) return {true, ""};
    try {
      auto value = dsl::execute(dsl::parse_program(*pred.program), gold.bindings);
      if (answers_match(value, gold.exe_ans, tol)) return {true, ""};
      return {false, "executed answer differs"};
    } catch (const dsl::Error& e) {
      failure = std::string(dsl::errc_name(e.code()));
    }
  }
  if (pred.answer) {
    if (answers_match(*pred.answer, gold.exe_ans, tol)) return {true, ""};
    return {false, "answer differs"};
  }
  return {false, failure.empty() ? "no program or answer" : failure};
}

EvalResult evaluate(const std::vector<Prediction>& predictions, const std::vector<QAExample>& gold,
                    double tol) {
  std::map<std::string, const QAExample*> by_id;
  for (const auto& g : gold) by_id[g.id] = &g;
  std::map<std::string, const Prediction*> pred_by_id;
  for (const auto& p : predictions) {
    if (!by_id.count(p.id)) {
      throw MetricsError(Errc::unknown_example_id, "prediction for unknown id '" + p.id + "'");
    }
    if (!pred_by_id.emplace(p.id, &p).second) {
      throw MetricsError(Errc::duplicate_prediction, "two predictions for id '" + p.id + "'");
    }
  }
  EvalResult r;
  r.n = gold.size();
  for (const auto& [id, g] : by_id) {
    ExampleVerdict v{id, {false, "missing prediction"}, {false, "missing prediction"}};
    if (auto it = pred_by_id.find(id); it != pred_by_id.end()) {
      v.ea = execution_accuracy(*it->second, *g, tol);
      v.pa = it->second->program ? program_accuracy(*it->second->program, dsl::serialize(g->program))
                                 : Verdict{false, "no program"};
    }
    r.ea_count += v.ea.correct;
    r.pa_count += v.pa.correct;
    r.verdicts.push_back(std::move(v));
  }
  if (r.n > 0) {
    r.ea = static_cast<double>(r.ea_count) / static_cast<double>(r.n);
    r.pa = static_cast<double>(r.pa_count) / static_cast<double>(r.n);
  }
  if (r.ea_count < r.pa_count) throw std::logic_error("execution accuracy fell below program accuracy");
  return r;
}

std::vector<Prediction> predictions_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw MetricsError(Errc::bad_prediction, "predictions must be a JSON array");
  std::vector<Prediction> out;
  for (const auto& r : arr) {
    if (!r.is_object() || !r.contains("id") || !r["id"].is_string()) {
      throw MetricsError(Errc::bad_prediction, "prediction without a string id");
    }
    Prediction p;
    p.id = r["id"].get<std::string>();
    if (r.contains("predicted_program") && !r["predicted_program"].is_null()) {
      if (!r["predicted_program"].is_string()) {
        throw MetricsError(Errc::bad_prediction, p.id + ": predicted_program must be a string");
      }
      p.program = r["predicted_program"].get<std::string>();
    }
    if (r.contains("predicted_answer") && !r["predicted_answer"].is_null()) {
      const auto& a = r["predicted_answer"];
      if (a.is_number()) {
        p.answer = dsl::Value::number(a.get<double>());
      } else if (a.is_string() && (a == "yes" || a == "no")) {
        p.answer = dsl::Value::boolean(a == "yes");
      } else {
        throw MetricsError(Errc::bad_prediction,
                           p.id + ": predicted_answer must be a number, \"yes\" or \"no\"");
      }
    }
    if (!p.program && !p.answer) {
      throw MetricsError(Errc::bad_prediction, p.id + ": needs a program or an answer");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Prediction> read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MetricsError(Errc::bad_prediction, "cannot read '" + path + "'");
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw MetricsError(Errc::bad_prediction, "'" + path + "' is not JSON");
  return predictions_from_json(j);
}

std::string format_result(const EvalResult& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "n " << r.n << "\nEA " << 100.0 * r.ea << " (" << r.ea_count << ")\nPA " << 100.0 * r.pa
     << " (" << r.pa_count << ")\n";
  return os.str();
}

}  // namespace finsynth::metrics
