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

#include <gtest/gtest.h>

#include "finsynth/metrics.hpp"
#include "oracle.hpp"

namespace finsynth::metrics {
namespace {

QAExample gold(const std::string& id, const std::string& program, dsl::Bindings b) {
  QAExample ex;
  ex.id = id;
  ex.program = dsl::parse_program(program);
  ex.bindings = std::move(b);
  auto v = dsl::execute(ex.program, ex.bindings);
  ex.exe_ans = v.is_number() ? dsl::Value::number(dsl::round_to(v.as_number(), 5)) : v;
  return ex;
}

Prediction program_pred(const std::string& id, const std::string& program) {
  return Prediction{id, program, std::nullopt};
}

// Swaps the arguments of every add and multiply step.
dsl::Program commuted(dsl::Program p) {
  for (auto& s : p.steps) {
    if (s.op == dsl::Op::add || s.op == dsl::Op::multiply) std::swap(s.args[0], s.args[1]);
  }
  return p;
}

const dsl::Bindings kB{{dsl::VarRef("a_2017"), 6.0}, {dsl::VarRef("b_2017"), 4.0}};

TEST(ProgramAccuracy, CanonicalStructuralMatch) {
  EXPECT_TRUE(program_accuracy("ADD(A_2017, b_2017)", "add(a_2017, b_2017)").correct);
  EXPECT_FALSE(program_accuracy("add(b_2017, a_2017)", "add(a_2017, b_2017)").correct);
  auto v = program_accuracy("add(a_2017", "add(a_2017, b_2017)");
  EXPECT_FALSE(v.correct);
  EXPECT_NE(v.reason.find("SyntaxError"), std::string::npos);
}

TEST(AnswersMatch, FiveDecimalRounding) {
  using dsl::Value;
  EXPECT_TRUE(answers_match(Value::number(0.161271), Value::number(0.16127)));
  EXPECT_FALSE(answers_match(Value::number(0.1613), Value::number(0.16127)));
  EXPECT_TRUE(answers_match(Value::boolean(true), Value::boolean(true)));
  EXPECT_FALSE(answers_match(Value::boolean(true), Value::number(1.0)));
}

TEST(ExecutionAccuracy, ProgramThenAnswer) {
  auto g = gold("x", "subtract(a_2017, b_2017), divide(#0, b_2017)", kB);
  EXPECT_TRUE(execution_accuracy(program_pred("x", "subtract(a_2017, b_2017), divide(#0, b_2017)"), g).correct);
  // Different program, same value.
  EXPECT_TRUE(execution_accuracy(program_pred("x", "divide(2, 4)"), g).correct);
  EXPECT_FALSE(execution_accuracy(program_pred("x", "divide(3, 4)"), g).correct);
  // Program that cannot run falls back to the answer.
  Prediction both{"x", "add(zzz, 1)", dsl::Value::number(0.5)};
  EXPECT_TRUE(execution_accuracy(both, g).correct);
  Prediction neither{"x", "add(zzz, 1)", std::nullopt};
  auto v = execution_accuracy(neither, g);
  EXPECT_FALSE(v.correct);
  EXPECT_EQ(v.reason, "UnboundVariable");
}

TEST(ExecutionAccuracy, MatchingProgramWithoutBindings) {
  auto g = gold("x", "add(a_2017, b_2017)", kB);
  g.bindings.clear();
  EXPECT_TRUE(execution_accuracy(program_pred("x", "add(a_2017, b_2017)"), g).correct);
}

TEST(Evaluate, CountsAndErrors) {
  std::vector<QAExample> golds{gold("a", "add(a_2017, b_2017)", kB), gold("b", "multiply(a_2017, b_2017)", kB),
                               gold("c", "greater(a_2017, b_2017)", kB)};
  std::vector<Prediction> preds{program_pred("a", "add(a_2017, b_2017)"),
                                program_pred("b", "multiply(b_2017, a_2017)")};
  auto r = evaluate(preds, golds);
  EXPECT_EQ(r.n, 3u);
  EXPECT_EQ(r.ea_count, 2u);
  EXPECT_EQ(r.pa_count, 1u);
  EXPECT_EQ(r.verdicts[2].ea.reason, "missing prediction");
  EXPECT_NEAR(r.ea, 2.0 / 3.0, 1e-12);

  try {
    evaluate({program_pred("zz", "add(1, 2)")}, golds);
    FAIL();
  } catch (const MetricsError& e) {
    EXPECT_EQ(e.code(), Errc::unknown_example_id);
  }
  try {
    evaluate({program_pred("a", "add(1, 2)"), program_pred("a", "add(1, 2)")}, golds);
    FAIL();
  } catch (const MetricsError& e) {
    EXPECT_EQ(e.code(), Errc::duplicate_prediction);
  }
}

TEST(Evaluate, BooleanGold) {
  auto g = gold("c", "greater(a_2017, b_2017)", kB);
  EXPECT_TRUE(execution_accuracy({"c", std::nullopt, dsl::Value::boolean(true)}, g).correct);
  EXPECT_FALSE(execution_accuracy({"c", std::nullopt, dsl::Value::number(1)}, g).correct);
}

TEST(PredictionsJson, Parsing) {
  const auto records = nlohmann::json::parse(
      R"json([{"id": "a", "predicted_program": "add(1, 2)"},
              {"id": "b", "predicted_answer": 3.5},
              {"id": "c", "predicted_answer": "yes"}])json");
  auto preds = predictions_from_json(records);
  ASSERT_EQ(preds.size(), 3u);
  EXPECT_EQ(*preds[0].program, "add(1, 2)");
  EXPECT_EQ(preds[1].answer->as_number(), 3.5);
  EXPECT_TRUE(preds[2].answer->as_boolean());
  const auto no_fields = nlohmann::json::parse(R"([{"id": "a"}])");
  const auto not_array = nlohmann::json::parse(R"({"id": "a"})");
  const auto bad_answer = nlohmann::json::parse(R"([{"id": "a", "predicted_answer": "maybe"}])");
  EXPECT_THROW(predictions_from_json(no_fields), MetricsError);
  EXPECT_THROW(predictions_from_json(not_array), MetricsError);
  EXPECT_THROW(predictions_from_json(bad_answer), MetricsError);
}

// EA >= PA on random prediction sets mixing exact, commuted, perturbed and
// unparseable programs.
TEST(MetricsLaw, ExecutionAccuracyNeverBelowProgramAccuracy) {
  Rng rng(51);
  testing::ProgramShape shape;
  shape.sliced_vars = false;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<QAExample> golds;
    std::vector<Prediction> preds, metamorphic;
    for (int i = 0; i < 40; ++i) {
      auto p = testing::random_program(rng, shape);
      auto b = testing::random_bindings(rng, p, true);
      QAExample g;
      g.id = "g" + std::to_string(i);
      g.program = p;
      g.bindings = b;
      try {
        auto v = dsl::execute(p, b);
        g.exe_ans = v.is_number() ? dsl::Value::number(dsl::round_to(v.as_number(), 5)) : v;
      } catch (const dsl::Error&) {
        continue;
      }
      golds.push_back(g);
      metamorphic.push_back(program_pred(g.id, dsl::serialize(commuted(p))));
      switch (rng.uniform_int(0, 4)) {
        case 0: preds.push_back(program_pred(g.id, dsl::serialize(p))); break;
        case 1: preds.push_back(program_pred(g.id, dsl::serialize(commuted(p)))); break;
        case 2: preds.push_back(program_pred(g.id, dsl::serialize(testing::random_program(rng, shape)))); break;
        case 3: preds.push_back(program_pred(g.id, "add(")); break;
        default: break;
      }
    }
    auto r = evaluate(preds, golds);
    ASSERT_GE(r.ea_count, r.pa_count);
    auto m = evaluate(metamorphic, golds);
    ASSERT_GE(m.ea_count, m.pa_count);
    for (const auto& v : m.verdicts) {
      if (v.pa.correct) {
        ASSERT_TRUE(v.ea.correct) << v.id;
      }
    }
  }
}

TEST(MetricsLaw, CommutedProgramsExecuteCorrectly) {
  Rng rng(52);
  testing::ProgramShape shape;
  shape.sliced_vars = false;
  int ea = 0, total = 0;
  for (int i = 0; i < 500; ++i) {
    auto p = testing::random_program(rng, shape);
    auto b = testing::random_bindings(rng, p, true);
    QAExample g;
    g.id = "g";
    g.program = p;
    g.bindings = b;
    try {
      auto v = dsl::execute(p, b);
      g.exe_ans = v.is_number() ? dsl::Value::number(dsl::round_to(v.as_number(), 5)) : v;
    } catch (const dsl::Error&) {
      continue;
    }
    ++total;
    ea += execution_accuracy(program_pred("g", dsl::serialize(commuted(p))), g).correct;
  }
  EXPECT_EQ(ea, total);
}

}  // namespace
}  // namespace finsynth::metrics
