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

// Six-operation arithmetic DSL: program model, parser, canonical printer and
// executor. Concrete syntax is `op(arg, arg)` steps joined by ", ", with `#k`
// referring to the result of step k.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace finsynth::dsl {

enum class Op : std::uint8_t { add, subtract, multiply, divide, greater, exp };

inline constexpr std::array<Op, 6> kAllOps = {Op::add,    Op::subtract, Op::multiply,
                                              Op::divide, Op::greater,  Op::exp};

std::string_view op_name(Op op);

/// Case-insensitive lookup of an operation keyword.
std::optional<Op> op_from_name(std::string_view name);

struct Constant {
  double value = 0.0;
  bool operator==(const Constant&) const = default;
};

/// A named variable, optionally pinned to a time slice (`ebit@t2`).
struct VarRef {
  std::string name;
  std::optional<std::string> slice;

  VarRef() = default;
  VarRef(std::string n) : name(std::move(n)) {}  // NOLINT(google-explicit-constructor)
  VarRef(const char* n) : name(n) {}             // NOLINT(google-explicit-constructor)
  VarRef(std::string n, std::optional<std::string> s) : name(std::move(n)), slice(std::move(s)) {}

  /// `name` or `name@slice`.
  std::string str() const;

  auto operator<=>(const VarRef&) const = default;
  bool operator==(const VarRef&) const = default;
};

struct StepRef {
  std::size_t index = 0;
  bool operator==(const StepRef&) const = default;
};

using Operand = std::variant<Constant, VarRef, StepRef>;

struct Step {
  Op op = Op::add;
  std::array<Operand, 2> args;
  bool operator==(const Step&) const = default;
};

struct Program {
  std::vector<Step> steps;
  bool operator==(const Program&) const = default;
  std::size_t size() const { return steps.size(); }
};

/// Result of running a program: a number, or yes/no for a final `greater`.
class Value {
 public:
  Value() = default;
  static Value number(double v) { return Value(v); }
  static Value boolean(bool b) { return Value(b); }

  bool is_boolean() const { return std::holds_alternative<bool>(v_); }
  bool is_number() const { return std::holds_alternative<double>(v_); }
  double as_number() const;
  bool as_boolean() const;

  bool operator==(const Value&) const = default;

 private:
  explicit Value(double v) : v_(v) {}
  explicit Value(bool b) : v_(b) {}
  std::variant<double, bool> v_{0.0};
};

using Bindings = std::map<VarRef, double>;

enum class Errc {
  empty_program,
  unknown_operation,
  arity_error,
  forward_step_ref,
  malformed_number,
  invalid_identifier,
  syntax_error,
  misplaced_greater,
  unbound_variable,
  division_by_zero,
  non_finite_result,
  boolean_in_arithmetic,
  parse_error,
  self_reference,
  empty_expression,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Divisors with smaller magnitude are rejected as division by zero.
inline constexpr double kDivisionEpsilon = 1e-12;

Program parse_program(std::string_view text);
std::string serialize(const Program& program);

/// Throws Error if the program breaks a structural invariant: empty,
/// forward/self step references, non-finite constants, malformed identifiers,
/// or a `greater` anywhere but the final step.
void validate(const Program& program);

/// Lexical normalization only: lowercases identifiers, folds -0 to 0.
/// Never reorders arguments.
Program canonicalize(Program program);

Value execute(const Program& program, const Bindings& bindings);

/// Distinct variables in first-occurrence order.
std::vector<VarRef> variables(const Program& program);

/// Distinct numeric constants in first-occurrence order.
std::vector<double> constants(const Program& program);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Valid identifier: `[a-z_][a-z0-9_]*`.
bool is_identifier(std::string_view s);

/// Round half away from zero to `digits` decimal places.
double round_to(double value, int digits);

}  // namespace finsynth::dsl
