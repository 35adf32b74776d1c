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

#include "finsynth/formula.hpp"
#include "finsynth/graph.hpp"
#include "oracle.hpp"

namespace finsynth {
namespace {

std::string leaf_text(const dsl::Operand& op) {
  if (const auto* c = std::get_if<dsl::Constant>(&op)) return dsl::format_number(c->value);
  return std::get<dsl::VarRef>(op).str();
}

dsl::Errc compile_errc(std::string_view eq) {
  try {
    compile_infix(eq);
  } catch (const dsl::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for: " << eq;
  return dsl::Errc::parse_error;
}

TEST(CompileInfix, LowersInPostOrder) {
  auto n = compile_infix("total_profit = operating_profit + non_operating_income - non_operating_expense");
  EXPECT_EQ(n.id, "total_profit");
  EXPECT_EQ(dsl::serialize(n.program),
            "add(operating_profit, non_operating_income), subtract(#0, non_operating_expense)");
  ASSERT_EQ(n.independents.size(), 3u);
  EXPECT_EQ(n.provenance.origin, Origin::seed);
}

TEST(CompileInfix, Precedence) {
  EXPECT_EQ(dsl::serialize(compile_infix("y = a + b * c").program), "multiply(b, c), add(a, #0)");
  EXPECT_EQ(dsl::serialize(compile_infix("y = (a + b) * c").program), "add(a, b), multiply(#0, c)");
  EXPECT_EQ(dsl::serialize(compile_infix("y = a * b ^ 2").program), "exp(b, 2), multiply(a, #0)");
  EXPECT_EQ(dsl::serialize(compile_infix("y = a - b - c").program), "subtract(a, b), subtract(#0, c)");
  EXPECT_EQ(dsl::serialize(compile_infix("y = a / b / c").program), "divide(a, b), divide(#0, c)");
}

TEST(CompileInfix, UnaryMinusOnLiterals) {
  EXPECT_EQ(dsl::serialize(compile_infix("y = a * -2").program), "multiply(a, -2)");
  EXPECT_EQ(compile_errc("y = -a + 1"), dsl::Errc::parse_error);
}

TEST(CompileInfix, SlicedInputs) {
  auto n = compile_infix("d = ebit@t2 - ebit@t1");
  EXPECT_EQ(dsl::serialize(n.program), "subtract(ebit@t2, ebit@t1)");
}

TEST(CompileInfix, Errors) {
  EXPECT_EQ(compile_errc("y + 1"), dsl::Errc::parse_error);
  EXPECT_EQ(compile_errc("a b = c + 1"), dsl::Errc::parse_error);
  EXPECT_EQ(compile_errc("y ="), dsl::Errc::empty_expression);
  EXPECT_EQ(compile_errc("y = x"), dsl::Errc::empty_expression);
  EXPECT_EQ(compile_errc("y = (x)"), dsl::Errc::empty_expression);
  EXPECT_EQ(compile_errc("x = x + 1"), dsl::Errc::self_reference);
  EXPECT_EQ(compile_errc("y = a + (b"), dsl::Errc::parse_error);
  EXPECT_EQ(compile_errc("y = a + $b"), dsl::Errc::parse_error);
  EXPECT_EQ(compile_errc("y = 1.2.3 + a"), dsl::Errc::parse_error);
}

TEST(RenderInfix, MinimalParentheses) {
  auto render = [](std::string_view eq) {
    return render_infix(compile_infix(eq).program, leaf_text);
  };
  EXPECT_EQ(render("y = a - (b - c)"), "a - (b - c)");
  EXPECT_EQ(render("y = (a - b) - c"), "a - b - c");
  EXPECT_EQ(render("y = (a + b) / 2"), "(a + b) / 2");
  EXPECT_EQ(render("y = a / (b * c)"), "a / (b * c)");
  EXPECT_EQ(render("y = (a ^ b) ^ c"), "a ^ b ^ c");
}

TEST(CheckNode, Invariants) {
  auto n = compile_infix("y = a + b");
  EXPECT_NO_THROW(check_node(n));
  auto dup = n;
  dup.independents.push_back(dup.independents[0]);
  EXPECT_THROW(check_node(dup), std::invalid_argument);
  auto missing = n;
  missing.independents.pop_back();
  EXPECT_THROW(check_node(missing), std::invalid_argument);
  auto self = n;
  self.independents.push_back(self.target);
  EXPECT_THROW(check_node(self), std::invalid_argument);
}

TEST(Compose, WorkedExample) {
  auto producer = compile_infix("total_profit = operating_profit - tax");
  auto consumer = compile_infix("ebit = total_profit + interest_expense");
  auto c = graph::compose(producer, consumer);
  EXPECT_EQ(dsl::serialize(c.program),
            "subtract(operating_profit, tax), add(#0, interest_expense)");
  EXPECT_EQ(c.target.name, "ebit");
  EXPECT_EQ(c.id, "total_profit>ebit");
  EXPECT_EQ(c.provenance.origin, Origin::composed);
  EXPECT_EQ(c.depth, 1);
}

TEST(Compose, ShiftsConsumerReferences) {
  auto producer = compile_infix("p = a * b + c");
  auto consumer = compile_infix("q = (p - d) / p");
  auto c = graph::compose(producer, consumer);
  EXPECT_EQ(dsl::serialize(c.program),
            "multiply(a, b), add(#0, c), subtract(#1, d), divide(#2, #1)");
}

TEST(Compose, RejectsUnconnectedPairs) {
  auto a = compile_infix("p = a + b");
  auto b = compile_infix("q = c + d");
  try {
    graph::compose(a, b);
    FAIL();
  } catch (const graph::GraphError& e) {
    EXPECT_EQ(e.code(), graph::Errc::not_connected);
  }
}

TEST(Compose, RejectsTargetReappearingAsInput) {
  auto producer = compile_infix("p = q + b");
  auto consumer = compile_infix("q = p * 2");
  try {
    graph::compose(producer, consumer);
    FAIL();
  } catch (const graph::GraphError& e) {
    EXPECT_EQ(e.code(), graph::Errc::invalid_composition);
  }
}

// Rendering a random program as infix and compiling it back must evaluate
// like the final step's expression tree.
TEST(InfixProperty, RenderCompileAgreesWithTree) {
  Rng rng(21);
  testing::ProgramShape shape;
  shape.sliced_vars = false;
  int checked = 0;
  for (int i = 0; i < 1500; ++i) {
    auto p = testing::random_program(rng, shape);
    if (p.steps.back().op == dsl::Op::greater) continue;
    auto b = testing::random_bindings(rng, p, true);
    auto trees = testing::to_trees(p);
    std::optional<double> want;
    try {
      want = std::get<double>(testing::eval_tree(*trees.back(), b));
    } catch (const testing::OracleFailure&) {
    }
    const auto text = render_infix(p, leaf_text);
    auto node = compile_infix("y = " + text);
    std::optional<double> got;
    try {
      got = dsl::execute(node.program, b).as_number();
    } catch (const dsl::Error&) {
    }
    ASSERT_EQ(want.has_value(), got.has_value()) << text;
    if (want) {
      ASSERT_TRUE(testing::close_rel(*want, *got, 1e-9)) << text;
    }
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

}  // namespace
}  // namespace finsynth
