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

#include <cmath>
#include <fstream>
#include <sstream>

#include "finsynth/genpipe.hpp"

namespace finsynth::genpipe {
namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_bars(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, '|')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::vector<std::string> Vocabulary::labels_for(const std::string& variable) const {
  auto it = labels.find(variable);
  if (it != labels.end() && !it->second.empty()) return it->second;
  return {display_name(variable)};
}

Templates Templates::parse(std::istream& in) {
  Templates t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto colon = s.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("templates line " + std::to_string(line_no) +
                                  ": expected 'kind: template'");
    }
    t.by_key[trim(s.substr(0, colon))] = trim(s.substr(colon + 1));
  }
  return t;
}

Templates Templates::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open templates file '" + path + "'");
  return parse(in);
}

bool GenConfig::is_ratio(const std::string& variable) const {
  for (const auto& suffix : ratio_suffixes) {
    if (variable.size() >= suffix.size() &&
        variable.compare(variable.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return true;
    }
  }
  return false;
}

std::map<std::string, std::string> apply_vocabulary_config(std::istream& in, GenConfig& cfg) {
  std::map<std::string, std::string> rest;
  std::string line;
  int line_no = 0;
  bool units_reset = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.rfind("label.", 0) == 0) {
      cfg.vocab.labels[key.substr(6)] = split_bars(value);
    } else if (key == "distractors") {
      cfg.vocab.distractors = split_bars(value);
    } else if (key.rfind("unit.", 0) == 0) {
      if (!units_reset) {
        cfg.units.scales.clear();
        units_reset = true;
      }
      double scale = 0;
      try {
        scale = std::stod(value);
      } catch (const std::exception&) {
        scale = 0;
      }
      if (!(scale > 0) || !std::isfinite(scale)) {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unit scale must be a positive number");
      }
      cfg.units.scales[key.substr(5)] = scale;
    } else if (key == "ambiguous_units") {
      auto words = split_bars(value);
      cfg.units.ambiguous = {words.begin(), words.end()};
    } else if (key == "ratio_suffixes") {
      cfg.ratio_suffixes = split_bars(value);
    } else {
      rest[key] = value;
    }
  }
  return rest;
}

backend::ValueModel make_value_model(const SeedSet& seeds, const GenConfig& cfg) {
  auto model = backend::ValueModel::from_seeds(seeds.nodes);
  model.ranges = seeds.ranges;
  model.ratio_suffixes = cfg.ratio_suffixes;
  model.units = cfg.units;
  return model;
}

}  // namespace finsynth::genpipe
