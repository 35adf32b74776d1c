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

// Deterministic offline backend. Every value it writes comes from a ledger
// that is a pure function of (seed, variable, year), so the report, the
// extraction answer and any test oracle agree exactly.

#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "finsynth/backend.hpp"
#include "finsynth/formula.hpp"
#include "finsynth/numbers.hpp"

namespace finsynth::backend {

/// What the mock knows about plausible values.
struct ValueModel {
  /// Seed formulas by unsliced target; such variables are derived, not drawn.
  std::map<std::string, FormulaNode> book;
  std::map<std::string, std::pair<double, double>> ranges;
  std::pair<double, double> default_range{1e3, 1e5};
  std::pair<double, double> ratio_range{0.05, 0.6};
  std::vector<std::string> ratio_suffixes{"_margin", "_margins", "_rate", "_percent",
                                          "_percentage"};
  UnitTable units = UnitTable::defaults();

  bool is_ratio(const std::string& variable) const;

  /// Book built from seed nodes; the first formula for a target wins.
  static ValueModel from_seeds(const std::vector<FormulaNode>& seeds);
};

struct LedgerEntry {
  double value = 0.0;    // normalized reading of `display`
  std::string display;   // as written in reports: "$15,191.5", "16.13%", "2.45 thousand"
};

/// (variable, year) -> entry
using Ledger = std::map<std::pair<std::string, int>, LedgerEntry>;

LedgerEntry ledger_entry(const ValueModel& model, std::uint64_t seed, const std::string& variable,
                         int year);

/// Entries for every base variable of the node over every year in range.
Ledger mock_ledger(const FormulaNode& node, const TimeContext& time, std::uint64_t seed,
                   const ValueModel& model);

class MockBackend : public TextGenerator {
 public:
  explicit MockBackend(ValueModel model) : model_(std::move(model)) {}

  std::string complete(const std::string& prompt, const CallOptions& options) override;
  std::string name() const override { return "mock"; }
  const ValueModel& model() const { return model_; }

 private:
  ValueModel model_;
};

/// Replays queued responses in order and records every prompt it receives.
class ScriptedBackend : public TextGenerator {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses);

  std::string complete(const std::string& prompt, const CallOptions& options) override;
  std::string name() const override { return "scripted"; }
  std::vector<std::string> prompts() const;

 private:
  mutable std::mutex mu_;
  std::deque<std::string> responses_;
  std::vector<std::string> prompts_;
};

}  // namespace finsynth::backend
