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

#include "finsynth/formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <set>
#include <stdexcept>

namespace finsynth {

using dsl::Errc;
using dsl::Error;

std::string_view origin_name(Origin origin) {
  switch (origin) {
    case Origin::seed: return "seed";
    case Origin::temporal_slice: return "temporal_slice";
    case Origin::temporal_connector: return "temporal_connector";
    case Origin::composed: return "composed";
  }
  return "unknown";
}

std::string_view connector_name(ConnectorKind kind) {
  switch (kind) {
    case ConnectorKind::rate_of_change: return "rate_of_change";
    case ConnectorKind::change: return "change";
    case ConnectorKind::sum: return "sum";
    case ConnectorKind::average: return "average";
  }
  return "unknown";
}

std::optional<ConnectorKind> connector_from_name(std::string_view name) {
  for (auto k : {ConnectorKind::rate_of_change, ConnectorKind::change, ConnectorKind::sum,
                 ConnectorKind::average}) {
    if (connector_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string Provenance::template_key() const {
  if (connector) return std::string(connector_name(*connector));
  return std::string(origin_name(origin));
}

std::string Provenance::str() const {
  std::string out(origin_name(origin));
  if (connector) {
    out += ":" + std::string(connector_name(*connector));
  }
  if (origin == Origin::composed) out += "(" + producer + "," + consumer + ")";
  return out;
}

void check_node(const FormulaNode& node) {
  dsl::validate(node.program);
  std::set<dsl::VarRef> inputs;
  for (const auto& v : node.independents) {
    if (!inputs.insert(v).second) {
      throw std::invalid_argument(node.id + ": duplicate independent '" + v.str() + "'");
    }
  }
  if (inputs.count(node.target)) {
    throw std::invalid_argument(node.id + ": target '" + node.target.str() +
                                "' is also an independent variable");
  }
  auto used = dsl::variables(node.program);
  std::set<dsl::VarRef> used_set(used.begin(), used.end());
  if (used_set != inputs) {
    throw std::invalid_argument(node.id + ": program variables differ from independents");
  }
}

namespace {

struct Expr {
  enum class Kind { number, variable, binary } kind = Kind::number;
  double number = 0.0;
  dsl::VarRef var;
  dsl::Op op = dsl::Op::add;
  std::unique_ptr<Expr> lhs, rhs;
};

struct Token {
  enum class Kind { ident, number, op, lparen, rparen, end } kind = Kind::end;
  std::string text;
  double number = 0.0;
  char op = 0;
  std::size_t pos = 0;
};

int precedence(char op) {
  switch (op) {
    case '+':
    case '-': return 1;
    case '*':
    case '/': return 2;
    case '^': return 3;
    default: return -1;
  }
}

dsl::Op op_for(char c) {
  switch (c) {
    case '+': return dsl::Op::add;
    case '-': return dsl::Op::subtract;
    case '*': return dsl::Op::multiply;
    case '/': return dsl::Op::divide;
    default: return dsl::Op::exp;
  }
}

class InfixParser {
 public:
  explicit InfixParser(std::string_view src) : src_(src) { advance(); }

  std::unique_ptr<Expr> parse() {
    if (tok_.kind == Token::Kind::end) throw Error(Errc::empty_expression, "empty expression");
    auto e = parse_expr(1);
    if (tok_.kind != Token::Kind::end) fail("unexpected '" + tok_.text + "'");
    return e;
  }

 private:
  std::unique_ptr<Expr> parse_expr(int min_prec) {
    auto lhs = parse_primary();
    while (tok_.kind == Token::Kind::op && precedence(tok_.op) >= min_prec) {
      char op = tok_.op;
      int prec = precedence(op);
      advance();
      auto rhs = parse_expr(prec + 1);
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::binary;
      node->op = op_for(op);
      node->lhs = std::move(lhs);
      node->rhs = std::move(rhs);
      lhs = std::move(node);
    }
    return lhs;
  }

  std::unique_ptr<Expr> parse_primary() {
    auto e = std::make_unique<Expr>();
    switch (tok_.kind) {
      case Token::Kind::number:
        e->kind = Expr::Kind::number;
        e->number = tok_.number;
        advance();
        return e;
      case Token::Kind::ident:
        e->kind = Expr::Kind::variable;
        e->var = parse_var(tok_.text);
        advance();
        return e;
      case Token::Kind::lparen: {
        advance();
        auto inner = parse_expr(1);
        if (tok_.kind != Token::Kind::rparen) fail("expected ')'");
        advance();
        return inner;
      }
      case Token::Kind::op:
        if (tok_.op == '-') {
          advance();
          if (tok_.kind != Token::Kind::number) fail("unary '-' applies only to numeric literals");
          e->kind = Expr::Kind::number;
          e->number = -tok_.number;
          advance();
          return e;
        }
        [[fallthrough]];
      default: fail(tok_.kind == Token::Kind::end ? "unexpected end of expression"
                                                  : "unexpected '" + tok_.text + "'");
    }
  }

  dsl::VarRef parse_var(const std::string& text) const {
    auto at = text.find('@');
    if (at == std::string::npos) return dsl::VarRef(text);
    return dsl::VarRef(text.substr(0, at), text.substr(at + 1));
  }

  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_ = Token{};
    tok_.pos = pos_;
    if (pos_ >= src_.size()) return;
    char c = src_[pos_];
    auto is_word = [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '@';
    };
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
        ++pos_;
      }
      tok_.text = std::string(src_.substr(start, pos_ - start));
      if (pos_ < src_.size() && is_word(src_[pos_])) fail("malformed number '" + tok_.text + "'");
      auto [ptr, ec] =
          std::from_chars(tok_.text.data(), tok_.text.data() + tok_.text.size(), tok_.number);
      if (ec != std::errc{} || ptr != tok_.text.data() + tok_.text.size() ||
          !std::isfinite(tok_.number)) {
        fail("malformed number '" + tok_.text + "'");
      }
      tok_.kind = Token::Kind::number;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && is_word(src_[pos_])) ++pos_;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      std::transform(tok_.text.begin(), tok_.text.end(), tok_.text.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      auto at = tok_.text.find('@');
      std::string_view name = std::string_view(tok_.text).substr(0, at);
      if (!dsl::is_identifier(name) ||
          (at != std::string::npos &&
           (at + 1 == tok_.text.size() || tok_.text.find('@', at + 1) != std::string::npos))) {
        fail("bad identifier '" + tok_.text + "'");
      }
      tok_.kind = Token::Kind::ident;
      return;
    }
    ++pos_;
    tok_.text = std::string(1, c);
    if (c == '(') {
      tok_.kind = Token::Kind::lparen;
    } else if (c == ')') {
      tok_.kind = Token::Kind::rparen;
    } else if (precedence(c) > 0) {
      tok_.kind = Token::Kind::op;
      tok_.op = c;
    } else {
      fail("unexpected character '" + tok_.text + "'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::parse_error, msg + " at column " + std::to_string(tok_.pos + 1));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

dsl::Operand lower(const Expr& e, dsl::Program& out) {
  switch (e.kind) {
    case Expr::Kind::number: return dsl::Constant{e.number};
    case Expr::Kind::variable: return e.var;
    case Expr::Kind::binary: break;
  }
  dsl::Operand a = lower(*e.lhs, out);
  dsl::Operand b = lower(*e.rhs, out);
  out.steps.push_back(dsl::Step{e.op, {std::move(a), std::move(b)}});
  return dsl::StepRef{out.steps.size() - 1};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

FormulaNode compile_infix(std::string_view equation) {
  auto eq = equation.find('=');
  if (eq == std::string_view::npos) throw Error(Errc::parse_error, "missing '=' in formula");
  std::string target(trim(equation.substr(0, eq)));
  std::transform(target.begin(), target.end(), target.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (!dsl::is_identifier(target)) {
    throw Error(Errc::parse_error, "left side '" + target + "' is not a single identifier");
  }
  std::string_view rhs = trim(equation.substr(eq + 1));
  if (rhs.empty()) throw Error(Errc::empty_expression, "empty right-hand side for " + target);

  auto tree = InfixParser(rhs).parse();
  FormulaNode node;
  node.id = target;
  node.target = dsl::VarRef(target);
  if (tree->kind != Expr::Kind::binary) {
    throw Error(Errc::empty_expression, "right-hand side of " + target + " has no operation");
  }
  lower(*tree, node.program);
  node.independents = dsl::variables(node.program);
  if (std::find(node.independents.begin(), node.independents.end(), node.target) !=
      node.independents.end()) {
    throw Error(Errc::self_reference, target + " appears on both sides");
  }
  dsl::validate(node.program);
  return node;
}

std::string render_infix(const dsl::Program& program,
                         const std::function<std::string(const dsl::Operand&)>& render_operand) {
  struct Piece {
    std::string text;
    int prec;
  };
  constexpr int kLeaf = 100;
  auto symbol = [](dsl::Op op) -> std::pair<const char*, int> {
    switch (op) {
      case dsl::Op::add: return {"+", 1};
      case dsl::Op::subtract: return {"-", 1};
      case dsl::Op::multiply: return {"*", 2};
      case dsl::Op::divide: return {"/", 2};
      case dsl::Op::exp: return {"^", 3};
      case dsl::Op::greater: return {">", 0};
    }
    return {"?", 0};
  };
  std::vector<Piece> pieces;
  for (const auto& step : program.steps) {
    auto [sym, prec] = symbol(step.op);
    auto piece_of = [&](const dsl::Operand& arg) -> Piece {
      if (const auto* ref = std::get_if<dsl::StepRef>(&arg)) return pieces.at(ref->index);
      return {render_operand(arg), kLeaf};
    };
    Piece lhs = piece_of(step.args[0]);
    Piece rhs = piece_of(step.args[1]);
    std::string l = lhs.prec < prec ? "(" + lhs.text + ")" : lhs.text;
    std::string r = rhs.prec <= prec ? "(" + rhs.text + ")" : rhs.text;
    pieces.push_back({l + " " + sym + " " + r, prec});
  }
  return pieces.empty() ? std::string() : pieces.back().text;
}

}  // namespace finsynth
