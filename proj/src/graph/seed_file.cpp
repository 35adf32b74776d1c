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

#include "finsynth/seed_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace finsynth {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void parse_directive(const std::string& body, int line_no, const std::string& source,
                     SeedSet& out) {
  std::istringstream words(body);
  std::string kind, variable;
  double lo = 0, hi = 0;
  words >> kind;
  if (kind != "range") {
    throw SeedFileError(line_no, source + ":" + std::to_string(line_no) +
                                     ": unknown directive '" + kind + "'");
  }
  std::string extra;
  if (!(words >> variable >> lo >> hi) || (words >> extra) || !(lo > 0) || !(hi >= lo) ||
      !std::isfinite(hi) || !dsl::is_identifier(variable)) {
    throw SeedFileError(line_no, source + ":" + std::to_string(line_no) +
                                     ": expected '#! range <variable> <lo> <hi>' with 0 < lo <= hi");
  }
  out.ranges[variable] = {lo, hi};
}

}  // namespace

SeedSet parse_seed_file(std::istream& in, const std::string& source) {
  SeedSet out;
  std::map<std::string, int> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.rfind("#!", 0) == 0) {
      parse_directive(line.substr(2), line_no, source, out);
      continue;
    }
    if (auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    FormulaNode node;
    try {
      node = compile_infix(line);
    } catch (const dsl::Error& e) {
      throw SeedFileError(line_no,
                          source + ":" + std::to_string(line_no) + ": " +
                              std::string(dsl::errc_name(e.code())) + ": " + e.what(),
                          e.code());
    } catch (const std::invalid_argument& e) {
      throw SeedFileError(line_no, source + ":" + std::to_string(line_no) + ": " + e.what());
    }
    int count = ++seen[node.id];
    if (count > 1) node.id += "~" + std::to_string(count);
    out.nodes.push_back(std::move(node));
  }
  if (out.nodes.empty()) throw SeedFileError(0, source + ": no formulas found");
  return out;
}

SeedSet load_seed_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SeedFileError(0, "cannot open seed file '" + path + "'");
  return parse_seed_file(in, path);
}

}  // namespace finsynth
