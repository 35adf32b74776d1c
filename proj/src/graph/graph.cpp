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

#include "finsynth/graph.hpp"

#include <algorithm>
#include <sstream>

namespace finsynth::graph {
namespace {

dsl::VarRef sliced(const dsl::VarRef& v, const std::string& slice) {
  return dsl::VarRef(v.name, slice);
}

dsl::Program slice_program(dsl::Program program, const std::string& slice) {
  for (auto& step : program.steps) {
    for (auto& arg : step.args) {
      if (auto* v = std::get_if<dsl::VarRef>(&arg)) *v = sliced(*v, slice);
    }
  }
  return program;
}

bool is_temporal(const FormulaNode& node) {
  if (node.target.slice) return true;
  return std::any_of(node.independents.begin(), node.independents.end(),
                     [](const dsl::VarRef& v) { return v.slice.has_value(); });
}

std::string wrap_id(const FormulaNode& node) {
  return node.provenance.origin == Origin::composed ? "[" + node.id + "]" : node.id;
}

FormulaNode make_connector(const std::string& var, ConnectorKind kind, const std::string& from,
                           const std::string& to) {
  using dsl::Op;
  dsl::VarRef a(var, from);
  dsl::VarRef b(var, to);
  FormulaNode n;
  n.target = dsl::VarRef(var + "_" + std::string(connector_name(kind)));
  n.id = n.target.name + "@" + from + "-" + to;
  switch (kind) {
    case ConnectorKind::change:
      n.program.steps = {{Op::subtract, {b, a}}};
      break;
    case ConnectorKind::rate_of_change:
      n.program.steps = {{Op::subtract, {b, a}}, {Op::divide, {dsl::StepRef{0}, a}}};
      break;
    case ConnectorKind::sum:
      n.program.steps = {{Op::add, {a, b}}};
      break;
    case ConnectorKind::average:
      n.program.steps = {{Op::add, {a, b}}, {Op::divide, {dsl::StepRef{0}, dsl::Constant{2}}}};
      break;
  }
  n.independents = dsl::variables(n.program);
  n.provenance.origin = Origin::temporal_connector;
  n.provenance.connector = kind;
  n.provenance.base_variable = var;
  n.provenance.slice_pair = std::make_pair(from, to);
  return n;
}

}  // namespace

std::pair<dsl::VarRef, std::string> formula_key(const FormulaNode& node) {
  return {node.target, dsl::serialize(dsl::canonicalize(node.program))};
}

const FormulaNode& FormulaGraph::node(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw std::out_of_range("no node '" + id + "'");
  return it->second;
}

bool FormulaGraph::has_formula(const FormulaNode& node) const {
  return formulas_.count(formula_key(node)) != 0;
}

void FormulaGraph::insert(FormulaNode node) {
  if (nodes_.count(node.id)) {
    throw GraphError(Errc::duplicate_node_id, "duplicate node id '" + node.id + "'");
  }
  auto key = formula_key(node);
  if (formulas_.count(key)) {
    throw GraphError(Errc::duplicate_formula,
                     "node '" + node.id + "' duplicates an existing formula for " + key.first.str());
  }
  formulas_.insert(std::move(key));
  std::string id = node.id;
  nodes_.emplace(std::move(id), std::move(node));
}

void FormulaGraph::add_node(FormulaNode node) {
  check_node(node);
  insert(std::move(node));
  recompute_edges();
}

void FormulaGraph::recompute_edges() {
  std::map<dsl::VarRef, std::vector<const std::string*>> producers;
  for (const auto& [id, n] : nodes_) producers[n.target].push_back(&id);
  edges_.clear();
  for (const auto& [id, n] : nodes_) {
    for (const auto& v : n.independents) {
      auto it = producers.find(v);
      if (it == producers.end()) continue;
      for (const std::string* p : it->second) {
        if (*p != id) edges_.emplace(*p, id);
      }
    }
  }
  // Consumed marks only make sense for edges that still exist.
  for (auto it = consumed_.begin(); it != consumed_.end();) {
    it = edges_.count(*it) ? std::next(it) : consumed_.erase(it);
  }
}

FormulaGraph build_graph(std::vector<FormulaNode> nodes) {
  FormulaGraph g;
  for (auto& n : nodes) {
    check_node(n);
    g.insert(std::move(n));
  }
  g.recompute_edges();
  return g;
}

FormulaGraph add_temporal(const FormulaGraph& g, const std::vector<std::string>& slices) {
  if (slices.size() < 2) {
    throw GraphError(Errc::fewer_than_two_slices, "temporal expansion needs at least two slices");
  }
  for (const auto& s : slices) {
    dsl::Program probe{{{dsl::Op::add, {dsl::VarRef("x", s), dsl::Constant{0}}}}};
    dsl::validate(probe);
    if (std::count(slices.begin(), slices.end(), s) > 1) {
      throw std::invalid_argument("duplicate time slice '" + s + "'");
    }
  }
  std::set<std::string> variables;
  for (const auto& [id, n] : g.nodes()) {
    if (is_temporal(n)) {
      throw GraphError(Errc::already_temporal, "node '" + id + "' is already time-sliced");
    }
    variables.insert(n.target.name);
    for (const auto& v : n.independents) variables.insert(v.name);
  }

  FormulaGraph out;
  for (const auto& [id, n] : g.nodes()) {
    for (const auto& slice : slices) {
      FormulaNode copy = n;
      copy.id = id + "@" + slice;
      copy.target = sliced(n.target, slice);
      for (auto& v : copy.independents) v = sliced(v, slice);
      copy.program = slice_program(n.program, slice);
      if (copy.provenance.origin == Origin::seed) copy.provenance.origin = Origin::temporal_slice;
      out.insert(std::move(copy));
    }
  }
  for (const auto& var : variables) {
    for (std::size_t k = 0; k + 1 < slices.size(); ++k) {
      for (auto kind : {ConnectorKind::change, ConnectorKind::rate_of_change, ConnectorKind::sum,
                        ConnectorKind::average}) {
        out.insert(make_connector(var, kind, slices[k], slices[k + 1]));
      }
    }
  }
  out.recompute_edges();
  return out;
}

FormulaNode compose(const FormulaNode& producer, const FormulaNode& consumer) {
  if (producer.id == consumer.id ||
      std::find(consumer.independents.begin(), consumer.independents.end(), producer.target) ==
          consumer.independents.end()) {
    throw GraphError(Errc::not_connected, "'" + producer.id + "' does not feed '" + consumer.id + "'");
  }
  const std::size_t offset = producer.program.size();
  FormulaNode out;
  out.program = producer.program;
  for (dsl::Step step : consumer.program.steps) {
    for (auto& arg : step.args) {
      if (auto* ref = std::get_if<dsl::StepRef>(&arg)) {
        ref->index += offset;
      } else if (auto* v = std::get_if<dsl::VarRef>(&arg); v && *v == producer.target) {
        arg = dsl::StepRef{offset - 1};
      }
    }
    out.program.steps.push_back(std::move(step));
  }
  out.target = consumer.target;
  out.independents = dsl::variables(out.program);
  out.id = wrap_id(producer) + ">" + wrap_id(consumer);
  out.provenance = consumer.provenance;
  out.provenance.origin = Origin::composed;
  out.provenance.producer = producer.id;
  out.provenance.consumer = consumer.id;
  out.depth = std::max(producer.depth, consumer.depth) + 1;
  try {
    check_node(out);
  } catch (const std::exception& e) {
    throw GraphError(Errc::invalid_composition, e.what());
  }
  return out;
}

bool is_valid(const FormulaNode& node, const ExtensionFilter& filter) {
  return node.program.size() <= static_cast<std::size_t>(filter.max_steps) &&
         node.independents.size() <= static_cast<std::size_t>(filter.max_vars);
}

FormulaGraph extend(const FormulaGraph& g, const ExtensionFilter& filter,
                    std::vector<std::size_t>* counts) {
  if (filter.max_steps < 1 || filter.max_vars < 1 || filter.iterations < 0) {
    throw std::invalid_argument("extension filter needs max_steps >= 1, max_vars >= 1");
  }
  FormulaGraph out = g;
  for (int round = 0; round < filter.iterations; ++round) {
    std::vector<Edge> frontier;
    std::set_difference(out.edges_.begin(), out.edges_.end(), out.consumed_.begin(),
                        out.consumed_.end(), std::back_inserter(frontier));
    std::vector<FormulaNode> kept;
    std::set<std::pair<dsl::VarRef, std::string>> kept_keys;
    std::set<std::string> kept_ids;
    for (const Edge& e : frontier) {
      out.consumed_.insert(e);
      FormulaNode candidate;
      try {
        candidate = compose(out.node(e.first), out.node(e.second));
      } catch (const GraphError&) {
        continue;
      }
      if (!is_valid(candidate, filter)) continue;
      auto key = formula_key(candidate);
      if (out.formulas_.count(key) || kept_keys.count(key)) continue;
      if (out.nodes_.count(candidate.id) || kept_ids.count(candidate.id)) continue;
      kept_keys.insert(std::move(key));
      kept_ids.insert(candidate.id);
      kept.push_back(std::move(candidate));
    }
    for (auto& n : kept) out.insert(std::move(n));
    out.recompute_edges();
    if (counts) counts->push_back(out.size());
  }
  return out;
}

GraphStats graph_stats(const FormulaGraph& g) {
  GraphStats s;
  for (auto o : {Origin::seed, Origin::temporal_slice, Origin::temporal_connector, Origin::composed}) {
    s.by_origin[std::string(origin_name(o))] = 0;
  }
  s.total = g.size();
  s.edges = g.edges().size();
  for (const auto& [id, n] : g.nodes()) {
    ++s.by_origin[std::string(origin_name(n.provenance.origin))];
    ++s.steps_histogram[n.program.size()];
    ++s.shape_histogram[{n.program.size(), n.independents.size()}];
    s.max_depth = std::max(s.max_depth, n.depth);
  }
  return s;
}

std::string dump(const FormulaGraph& g) {
  std::ostringstream os;
  os << "# node\tid\ttarget\tindependents\tprogram\tprovenance\tdepth\n";
  for (const auto& [id, n] : g.nodes()) {
    os << "node\t" << id << '\t' << n.target.str() << '\t';
    for (std::size_t i = 0; i < n.independents.size(); ++i) {
      os << (i ? "," : "") << n.independents[i].str();
    }
    os << '\t' << dsl::serialize(n.program) << '\t' << n.provenance.str() << '\t' << n.depth
       << '\n';
  }
  os << "# edge\tproducer\tconsumer\tconsumed\n";
  for (const auto& e : g.edges()) {
    os << "edge\t" << e.first << '\t' << e.second << '\t' << (g.consumed().count(e) ? 1 : 0)
       << '\n';
  }
  return os.str();
}

std::string format_stats(const GraphStats& stats) {
  std::ostringstream os;
  os << stats.total << " nodes, " << stats.edges << " edges\n";
  for (const auto& [origin, count] : stats.by_origin) os << "  " << origin << ": " << count << '\n';
  os << "  steps:";
  for (const auto& [steps, count] : stats.steps_histogram) os << ' ' << steps << '=' << count;
  os << "\n  max depth: " << stats.max_depth << '\n';
  return os.str();
}

}  // namespace finsynth::graph
