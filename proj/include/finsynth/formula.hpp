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

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "finsynth/dsl.hpp"

namespace finsynth {

enum class Origin { seed, temporal_slice, temporal_connector, composed };

enum class ConnectorKind { rate_of_change, change, sum, average };

std::string_view origin_name(Origin origin);
std::string_view connector_name(ConnectorKind kind);
std::optional<ConnectorKind> connector_from_name(std::string_view name);

/// Where a formula came from. Connector metadata (kind, base variable, slice
/// pair) is carried through composition so a composed node still knows which
/// temporal question it answers.
struct Provenance {
  Origin origin = Origin::seed;
  std::optional<ConnectorKind> connector;
  std::string base_variable;                           // connectors only
  std::optional<std::pair<std::string, std::string>> slice_pair;  // connectors only
  std::string producer;                                // composed only
  std::string consumer;                                // composed only

  /// Key used to pick a question template: the connector kind when present,
  /// otherwise the origin name.
  std::string template_key() const;
  std::string str() const;

  bool operator==(const Provenance&) const = default;
};

struct FormulaNode {
  std::string id;
  dsl::VarRef target;
  std::vector<dsl::VarRef> independents;
  dsl::Program program;
  Provenance provenance;
  int depth = 0;

  bool operator==(const FormulaNode&) const = default;
};

/// Throws std::invalid_argument when the node breaks its invariants: target
/// listed as an input, duplicate inputs, program variables not exactly the
/// inputs, or an invalid program.
void check_node(const FormulaNode& node);

/// Compiles `target = infix-expression` into a seed node whose id is the
/// target identifier. Precedence: `^` over `*` `/` over `+` `-`, all
/// left-associative; lowered to steps in post-order.
FormulaNode compile_infix(std::string_view equation);

/// Infix rendering of a program with `#k` references expanded, using the
/// minimum parentheses. `render_operand` turns leaves into text.
std::string render_infix(const dsl::Program& program,
                         const std::function<std::string(const dsl::Operand&)>& render_operand);

}  // namespace finsynth
