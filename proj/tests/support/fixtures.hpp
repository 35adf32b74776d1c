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

// Shipped data files loaded the way the CLI loads them.

#include <fstream>
#include <string>

#include "finsynth/genpipe.hpp"
#include "finsynth/graph.hpp"
#include "finsynth/seed_file.hpp"

namespace finsynth::testing {

inline std::string data_path(const std::string& name) {
  return std::string(FINSYNTH_DATA_DIR) + "/" + name;
}

inline genpipe::GenConfig shipped_config() {
  genpipe::GenConfig cfg;
  std::ifstream conf(data_path("finsynth.conf"));
  genpipe::apply_vocabulary_config(conf, cfg);
  cfg.templates = genpipe::Templates::load(data_path("templates.txt"));
  cfg.exemplars = backend::load_exemplars_file(data_path("exemplars.txt"));
  return cfg;
}

inline SeedSet shipped_seeds() { return load_seed_file(data_path("seed_formulas.txt")); }

/// Seed graph, optionally time-sliced over t1/t2, then extended.
inline graph::FormulaGraph shipped_graph(bool temporal, std::vector<std::size_t>* counts = nullptr) {
  auto g = graph::build_graph(shipped_seeds().nodes);
  if (temporal) g = graph::add_temporal(g, {"t1", "t2"});
  return graph::extend(g, {}, counts);
}

}  // namespace finsynth::testing
