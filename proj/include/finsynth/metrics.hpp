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

// Execution accuracy (EA) and program accuracy (PA) against a gold dataset.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "finsynth/report.hpp"

namespace finsynth::metrics {

enum class Errc { unknown_example_id, duplicate_prediction, bad_prediction };

class MetricsError : public std::runtime_error {
 public:
  MetricsError(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

struct Prediction {
  std::string id;
  std::optional<std::string> program;
  std::optional<dsl::Value> answer;
};

struct Verdict {
  bool correct = false;
  std::string reason;  // empty when correct
};

inline constexpr double kDefaultTolerance = 1e-5;

/// Canonical structural match; a parse failure is a false verdict.
Verdict program_accuracy(const std::string& predicted, const std::string& gold);

/// Numbers compare after 5-decimal rounding within `tol`; yes/no exactly.
bool answers_match(const dsl::Value& predicted, const dsl::Value& gold,
                   double tol = kDefaultTolerance);

/// A predicted program is executed on the gold bindings first; the predicted
/// answer is used when there is no program or it cannot run.
Verdict execution_accuracy(const Prediction& pred, const QAExample& gold,
                           double tol = kDefaultTolerance);

struct ExampleVerdict {
  std::string id;
  Verdict ea;
  Verdict pa;
};

struct EvalResult {
  std::size_t n = 0;
  std::size_t ea_count = 0;
  std::size_t pa_count = 0;
  double ea = 0.0;
  double pa = 0.0;
  std::vector<ExampleVerdict> verdicts;  // gold id order
};

/// Gold examples without a prediction count as wrong on both metrics.
EvalResult evaluate(const std::vector<Prediction>& predictions, const std::vector<QAExample>& gold,
                    double tol = kDefaultTolerance);

/// JSON array of {id, predicted_program?, predicted_answer?}.
std::vector<Prediction> predictions_from_json(const nlohmann::json& arr);
std::vector<Prediction> read_predictions(const std::string& path);

std::string format_result(const EvalResult& result);

}  // namespace finsynth::metrics
