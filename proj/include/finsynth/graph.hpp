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

// Formula dependency graph: nodes are formulas, an edge (j, i) means the
// target of j is an input of i. Extension composes the two ends of each
// unconsumed edge into a new formula.

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finsynth/formula.hpp"

namespace finsynth::graph {

enum class Errc {
  duplicate_node_id,
  duplicate_formula,
  already_temporal,
  fewer_than_two_slices,
  not_connected,
  invalid_composition,
};

class GraphError : public std::runtime_error {
 public:
  GraphError(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

struct ExtensionFilter {
  int max_steps = 4;
  int max_vars = 5;
  int iterations = 6;
};

/// (producer id, consumer id)
using Edge = std::pair<std::string, std::string>;

class FormulaGraph {
 public:
  const std::map<std::string, FormulaNode>& nodes() const { return nodes_; }
  const std::set<Edge>& edges() const { return edges_; }
  const std::set<Edge>& consumed() const { return consumed_; }

  const FormulaNode& node(const std::string& id) const;
  bool contains(const std::string& id) const { return nodes_.count(id) != 0; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  /// True if a node with the same target and canonical program exists.
  bool has_formula(const FormulaNode& node) const;

  /// Adds a node and recomputes edges. Throws GraphError on id or formula
  /// collisions.
  void add_node(FormulaNode node);

 private:
  friend FormulaGraph build_graph(std::vector<FormulaNode> nodes);
  friend FormulaGraph add_temporal(const FormulaGraph& g, const std::vector<std::string>& slices);
  friend FormulaGraph extend(const FormulaGraph& g, const ExtensionFilter& filter,
                             std::vector<std::size_t>* counts);

  void insert(FormulaNode node);
  void recompute_edges();

  std::map<std::string, FormulaNode> nodes_;
  std::set<Edge> edges_;
  std::set<Edge> consumed_;
  std::set<std::pair<dsl::VarRef, std::string>> formulas_;
};

/// Dedup key: target plus canonical program text.
std::pair<dsl::VarRef, std::string> formula_key(const FormulaNode& node);

FormulaGraph build_graph(std::vector<FormulaNode> nodes);

/// Replaces every node by one copy per slice and adds change, rate of change,
/// sum and average connectors for every variable and adjacent slice pair.
FormulaGraph add_temporal(const FormulaGraph& g, const std::vector<std::string>& slices);

/// Inlines `producer` into `consumer`: producer steps first, consumer step
/// references shifted, and the consumer's uses of the producer target
/// replaced by a reference to the producer's last step.
FormulaNode compose(const FormulaNode& producer, const FormulaNode& consumer);

bool is_valid(const FormulaNode& node, const ExtensionFilter& filter);

/// Runs `filter.iterations` rounds of edge composition. When `counts` is
/// given it receives the node count after each round.
FormulaGraph extend(const FormulaGraph& g, const ExtensionFilter& filter,
                    std::vector<std::size_t>* counts = nullptr);

struct GraphStats {
  std::size_t total = 0;
  std::map<std::string, std::size_t> by_origin;
  std::map<std::size_t, std::size_t> steps_histogram;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> shape_histogram;  // (steps, vars)
  int max_depth = 0;
  std::size_t edges = 0;
};

GraphStats graph_stats(const FormulaGraph& g);

/// Line-oriented, tab-separated dump: node lines then edge lines.
std::string dump(const FormulaGraph& g);
std::string format_stats(const GraphStats& stats);

}  // namespace finsynth::graph
