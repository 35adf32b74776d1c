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

// Seed formula files: one `target = expression` per line, `#` comments,
// blank lines ignored. A `#! range <variable> <lo> <hi>` directive sets the
// value range the mock backend draws that variable from.

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "finsynth/formula.hpp"

namespace finsynth {

struct SeedSet {
  std::vector<FormulaNode> nodes;
  std::map<std::string, std::pair<double, double>> ranges;
};

class SeedFileError : public std::runtime_error {
 public:
  SeedFileError(int line, const std::string& what, std::optional<dsl::Errc> cause = std::nullopt)
      : std::runtime_error(what), line_(line), cause_(cause) {}
  /// 1-based; 0 when the error concerns the whole file.
  int line() const noexcept { return line_; }
  std::optional<dsl::Errc> cause() const noexcept { return cause_; }

 private:
  int line_;
  std::optional<dsl::Errc> cause_;
};

/// A repeated target gets ids `target`, `target~2`, ... in file order.
SeedSet parse_seed_file(std::istream& in, const std::string& source = "<input>");
SeedSet load_seed_file(const std::string& path);

}  // namespace finsynth
