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

#include "finsynth/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace finsynth::dsl {
namespace {

constexpr std::array<std::string_view, 6> kOpNames = {"add",    "subtract", "multiply",
                                                      "divide", "greater",  "exp"};

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_slice_label(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::islower(c) || std::isdigit(c) || c == '_';
  });
}

class ProgramParser {
 public:
  explicit ProgramParser(std::string_view text) : text_(text) {}

  Program parse() {
    if (trim(text_).empty()) throw Error(Errc::empty_program, "empty program");
    Program program;
    skip_ws();
    while (true) {
      program.steps.push_back(parse_step(program.steps.size()));
      skip_ws();
      if (at_end()) break;
      expect(',', "',' between steps");
      skip_ws();
      if (at_end()) fail(Errc::syntax_error, "trailing ','");
    }
    validate(program);
    return program;
  }

 private:
  Step parse_step(std::size_t index) {
    std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    std::string_view word = text_.substr(start, pos_ - start);
    if (word.empty()) fail(Errc::syntax_error, "expected an operation name");
    auto op = op_from_name(word);
    if (!op) fail(Errc::unknown_operation, "unknown operation '" + std::string(word) + "'");
    skip_ws();
    expect('(', "'(' after operation name");

    std::vector<std::string_view> raw_args;
    while (true) {
      std::size_t arg_start = pos_;
      while (!at_end() && peek() != ',' && peek() != ')' && peek() != '(') ++pos_;
      if (at_end()) fail(Errc::syntax_error, "unterminated argument list");
      if (peek() == '(') fail(Errc::syntax_error, "nested calls are not allowed");
      raw_args.push_back(trim(text_.substr(arg_start, pos_ - arg_start)));
      if (peek() == ')') {
        ++pos_;
        break;
      }
      ++pos_;  // ','
    }
    if (raw_args.size() != 2) {
      fail(Errc::arity_error, std::string(op_name(*op)) + " takes 2 arguments, got " +
                                  std::to_string(raw_args.size()));
    }
    Step step;
    step.op = *op;
    for (std::size_t i = 0; i < 2; ++i) step.args[i] = parse_operand(raw_args[i], index);
    return step;
  }

  Operand parse_operand(std::string_view tok, std::size_t step_index) {
    if (tok.empty()) fail(Errc::syntax_error, "empty argument");
    char c = tok.front();
    if (c == '#') {
      std::string_view digits = tok.substr(1);
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
      if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
        fail(Errc::syntax_error, "bad step reference '" + std::string(tok) + "'");
      }
      if (idx >= step_index) {
        fail(Errc::forward_step_ref, "step " + std::to_string(step_index) + " references #" +
                                         std::to_string(idx));
      }
      return StepRef{idx};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
      std::string_view body = tok;
      if (body.front() == '+') body.remove_prefix(1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
      if (body.empty() || ec != std::errc{} || ptr != body.data() + body.size() ||
          !std::isfinite(v)) {
        fail(Errc::malformed_number, "malformed number '" + std::string(tok) + "'");
      }
      return Constant{v};
    }
    std::string lowered = to_lower(tok);
    std::string_view name = lowered;
    std::optional<std::string> slice;
    if (auto at = name.find('@'); at != std::string_view::npos) {
      std::string_view s = name.substr(at + 1);
      if (!is_slice_label(s)) fail(Errc::invalid_identifier, "bad time slice in '" + lowered + "'");
      slice = std::string(s);
      name = name.substr(0, at);
    }
    if (!is_identifier(name)) fail(Errc::invalid_identifier, "bad identifier '" + lowered + "'");
    return VarRef{std::string(name), slice};
  }

  [[noreturn]] void fail(Errc code, const std::string& msg) const {
    throw Error(code, msg + " at offset " + std::to_string(pos_));
  }

  void expect(char c, const char* what) {
    if (at_end() || peek() != c) fail(Errc::syntax_error, std::string("expected ") + what);
    ++pos_;
  }
  void skip_ws() {
    while (!at_end() && is_space(peek())) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string operand_text(const Operand& arg) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return format_number(a.value);
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return a.str();
        } else {
          return "#" + std::to_string(a.index);
        }
      },
      arg);
}

double checked(double v, Op op) {
  if (!std::isfinite(v)) {
    throw Error(Errc::non_finite_result, std::string(op_name(op)) + " produced a non-finite value");
  }
  return v;
}

}  // namespace

std::string_view op_name(Op op) { return kOpNames[static_cast<std::size_t>(op)]; }

std::optional<Op> op_from_name(std::string_view name) {
  std::string lowered = to_lower(name);
  for (std::size_t i = 0; i < kOpNames.size(); ++i) {
    if (kOpNames[i] == lowered) return static_cast<Op>(i);
  }
  return std::nullopt;
}

std::string VarRef::str() const { return slice ? name + "@" + *slice : name; }

double Value::as_number() const {
  if (!is_number()) throw Error(Errc::boolean_in_arithmetic, "value is boolean");
  return std::get<double>(v_);
}

bool Value::as_boolean() const {
  if (!is_boolean()) throw std::logic_error("value is numeric");
  return std::get<bool>(v_);
}

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::empty_program: return "EmptyProgram";
    case Errc::unknown_operation: return "UnknownOperation";
    case Errc::arity_error: return "ArityError";
    case Errc::forward_step_ref: return "ForwardStepRef";
    case Errc::malformed_number: return "MalformedNumber";
    case Errc::invalid_identifier: return "InvalidIdentifier";
    case Errc::syntax_error: return "SyntaxError";
    case Errc::misplaced_greater: return "MisplacedGreater";
    case Errc::unbound_variable: return "UnboundVariable";
    case Errc::division_by_zero: return "DivisionByZero";
    case Errc::non_finite_result: return "NonFiniteResult";
    case Errc::boolean_in_arithmetic: return "BooleanInArithmetic";
    case Errc::parse_error: return "ParseError";
    case Errc::self_reference: return "SelfReference";
    case Errc::empty_expression: return "EmptyExpression";
  }
  return "Unknown";
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::islower(head) || head == '_')) return false;
  return std::all_of(s.begin() + 1, s.end(), [](unsigned char c) {
    return std::islower(c) || std::isdigit(c) || c == '_';
  });
}

Program parse_program(std::string_view text) { return ProgramParser(text).parse(); }

std::string serialize(const Program& program) {
  std::string out;
  for (std::size_t i = 0; i < program.steps.size(); ++i) {
    const Step& s = program.steps[i];
    if (i > 0) out += ", ";
    out += op_name(s.op);
    out += '(';
    out += operand_text(s.args[0]);
    out += ", ";
    out += operand_text(s.args[1]);
    out += ')';
  }
  return out;
}

void validate(const Program& program) {
  if (program.steps.empty()) throw Error(Errc::empty_program, "empty program");
  for (std::size_t i = 0; i < program.steps.size(); ++i) {
    const Step& step = program.steps[i];
    if (step.op == Op::greater && i + 1 != program.steps.size()) {
      throw Error(Errc::misplaced_greater,
                  "greater may only be the final step (found at step " + std::to_string(i) + ")");
    }
    for (const Operand& arg : step.args) {
      if (const auto* ref = std::get_if<StepRef>(&arg); ref && ref->index >= i) {
        throw Error(Errc::forward_step_ref,
                    "step " + std::to_string(i) + " references #" + std::to_string(ref->index));
      }
      if (const auto* c = std::get_if<Constant>(&arg); c && !std::isfinite(c->value)) {
        throw Error(Errc::malformed_number, "non-finite constant");
      }
      if (const auto* v = std::get_if<VarRef>(&arg)) {
        if (!is_identifier(v->name) || (v->slice && !is_slice_label(*v->slice))) {
          throw Error(Errc::invalid_identifier, "bad identifier '" + v->str() + "'");
        }
      }
    }
  }
}

Program canonicalize(Program program) {
  for (Step& step : program.steps) {
    for (Operand& arg : step.args) {
      if (auto* c = std::get_if<Constant>(&arg); c && c->value == 0.0) {
        c->value = 0.0;
      } else if (auto* v = std::get_if<VarRef>(&arg)) {
        v->name = to_lower(v->name);
        if (v->slice) v->slice = to_lower(*v->slice);
      }
    }
  }
  return program;
}

Value execute(const Program& program, const Bindings& bindings) {
  if (program.steps.empty()) throw Error(Errc::empty_program, "empty program");
  std::vector<Value> results;
  results.reserve(program.steps.size());

  auto resolve = [&](const Operand& arg, std::size_t step) -> Value {
    if (const auto* c = std::get_if<Constant>(&arg)) return Value::number(c->value);
    if (const auto* v = std::get_if<VarRef>(&arg)) {
      auto it = bindings.find(*v);
      if (it == bindings.end()) {
        throw Error(Errc::unbound_variable, "unbound variable '" + v->str() + "'");
      }
      if (!std::isfinite(it->second)) {
        throw Error(Errc::non_finite_result, "binding for '" + v->str() + "' is not finite");
      }
      return Value::number(it->second);
    }
    std::size_t idx = std::get<StepRef>(arg).index;
    if (idx >= step) {
      throw Error(Errc::forward_step_ref,
                  "step " + std::to_string(step) + " references #" + std::to_string(idx));
    }
    return results[idx];
  };

  for (std::size_t i = 0; i < program.steps.size(); ++i) {
    const Step& s = program.steps[i];
    Value lhs = resolve(s.args[0], i);
    Value rhs = resolve(s.args[1], i);
    if (lhs.is_boolean() || rhs.is_boolean()) {
      throw Error(Errc::boolean_in_arithmetic,
                  "step " + std::to_string(i) + " consumes a yes/no result");
    }
    double a = lhs.as_number();
    double b = rhs.as_number();
    switch (s.op) {
      case Op::add: results.push_back(Value::number(checked(a + b, s.op))); break;
      case Op::subtract: results.push_back(Value::number(checked(a - b, s.op))); break;
      case Op::multiply: results.push_back(Value::number(checked(a * b, s.op))); break;
      case Op::divide:
        if (std::fabs(b) < kDivisionEpsilon) {
          throw Error(Errc::division_by_zero, "division by zero at step " + std::to_string(i));
        }
        results.push_back(Value::number(checked(a / b, s.op)));
        break;
      case Op::exp: results.push_back(Value::number(checked(std::pow(a, b), s.op))); break;
      case Op::greater: results.push_back(Value::boolean(a > b)); break;
    }
  }
  return results.back();
}

std::vector<VarRef> variables(const Program& program) {
  std::vector<VarRef> out;
  std::set<VarRef> seen;
  for (const Step& s : program.steps) {
    for (const Operand& arg : s.args) {
      if (const auto* v = std::get_if<VarRef>(&arg); v && seen.insert(*v).second) {
        out.push_back(*v);
      }
    }
  }
  return out;
}

std::vector<double> constants(const Program& program) {
  std::vector<double> out;
  for (const Step& s : program.steps) {
    for (const Operand& arg : s.args) {
      if (const auto* c = std::get_if<Constant>(&arg);
          c && std::find(out.begin(), out.end(), c->value) == out.end()) {
        out.push_back(c->value);
      }
    }
  }
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
  return std::string(buf, ptr);
}

double round_to(double value, int digits) {
  if (!std::isfinite(value)) return value;
  // printf rounds the exact binary value, which avoids the double-rounding
  // artefacts of scale-round-unscale.
  std::vector<char> buf(400);
  int n = std::snprintf(buf.data(), buf.size(), "%.*f", digits, value);
  if (n < 0 || static_cast<std::size_t>(n) >= buf.size()) return value;
  double out = std::strtod(buf.data(), nullptr);
  return out == 0.0 ? 0.0 : out;
}

}  // namespace finsynth::dsl
