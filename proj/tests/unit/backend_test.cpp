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

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "finsynth/backend.hpp"
#include "finsynth/mock_backend.hpp"
#include "finsynth/seed_file.hpp"
#include "oracle.hpp"

namespace finsynth::backend {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ValueModel seed_model() {
  auto seeds = load_seed_file(std::string(FINSYNTH_DATA_DIR) + "/seed_formulas.txt");
  auto m = ValueModel::from_seeds(seeds.nodes);
  m.ranges = seeds.ranges;
  return m;
}

Payload sample_payload() {
  Payload p;
  p.variables = {"total_profit", "interest_expense"};
  p.labels = {"profit before income taxes", "interest expense"};
  p.years = {2016, 2017};
  p.distractors = {"goodwill"};
  return p;
}

std::string table_prompt(const Payload& p) {
  return build_prompt({TaskKind::table, ShotMode::zero, {}, p});
}

TEST(Prompt, RoundTripsPayload) {
  Payload p = sample_payload();
  p.required = {"total_profit@2016", "interest_expense@2017"};
  p.artifact = "| | 2016 |\n| revenue | 5 |\n";
  for (auto task : {TaskKind::table, TaskKind::table_text, TaskKind::text, TaskKind::text_table,
                    TaskKind::extract}) {
    auto parsed = parse_prompt(build_prompt({task, ShotMode::zero, {}, p}));
    ASSERT_TRUE(parsed);
    EXPECT_EQ(parsed->task, task);
    EXPECT_EQ(parsed->payload, p);
  }
}

TEST(Prompt, ExemplarsPrecedeTheTask) {
  std::vector<Exemplar> ex(4, Exemplar{"task: table\nyears: 1999\n", "| | 1999 |\n| x | 1 |\n"});
  auto prompt = build_prompt({TaskKind::table, ShotMode::few, ex, sample_payload()});
  EXPECT_NE(prompt.find("### Example 4\nInput:\n"), std::string::npos);
  EXPECT_LT(prompt.find("### Example 1"), prompt.find("### Task\n"));
  EXPECT_EQ(prompt.substr(prompt.size() - 8), "Output:\n");
  // The exemplar inputs also contain task lines; only the final block counts.
  EXPECT_EQ(parse_prompt(prompt)->payload.years, (std::vector<int>{2016, 2017}));
}

TEST(Prompt, ExemplarCountMustMatchShotMode) {
  try {
    build_prompt({TaskKind::table, ShotMode::one, {}, sample_payload()});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.code(), Errc::exemplar_count_mismatch);
  }
  EXPECT_EQ(exemplar_count(ShotMode::few), 4u);
  EXPECT_FALSE(parse_prompt("no task marker here"));
}

TEST(Exemplars, ShippedBankCoversEveryTask) {
  auto bank = load_exemplars_file(std::string(FINSYNTH_DATA_DIR) + "/exemplars.txt");
  for (auto task : {TaskKind::table, TaskKind::table_text, TaskKind::text, TaskKind::text_table,
                    TaskKind::extract}) {
    auto ex = select_exemplars(bank, task, ShotMode::few);
    ASSERT_EQ(ex.size(), 4u);
    EXPECT_FALSE(ex[0].input.empty());
    EXPECT_FALSE(ex[0].output.empty());
  }
  EXPECT_TRUE(select_exemplars(bank, TaskKind::table, ShotMode::zero).empty());
}

TEST(Exemplars, ParseErrors) {
  std::istringstream bad("@@ task: poem\n");
  EXPECT_THROW(load_exemplars(bad), BackendError);
  std::istringstream orphan("@@ end\n");
  EXPECT_THROW(load_exemplars(orphan), BackendError);
  std::istringstream one("@@ task: text\n@@ input\nq\n@@ output\na\n@@ end\n");
  auto bank = load_exemplars(one);
  EXPECT_EQ(bank[TaskKind::text].at(0).input, "q\n");
  try {
    select_exemplars(bank, TaskKind::text, ShotMode::few);
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.code(), Errc::exemplar_count_mismatch);
  }
}

TEST(TableResponse, SkipsProseAndSeparators) {
  auto t = parse_table_response(
      "Here is the table:\n\n"
      "|  | 2016 | 2017 |\n"
      "|:---|---:|---:|\n"
      "| revenue | $1,200 | $1,300 |\n"
      "\nA second | block | is ignored\n");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"", "2016", "2017"}));
  EXPECT_EQ(t.rows[1][1], "$1,200");
}

TEST(TableResponse, Errors) {
  auto code_of = [](std::string_view text) {
    try {
      parse_table_response(text);
    } catch (const BackendError& e) {
      return e.code();
    }
    return Errc::http_error;
  };
  EXPECT_EQ(code_of("no table at all"), Errc::no_table_found);
  EXPECT_EQ(code_of("| just | a header |\n"), Errc::no_table_found);
  EXPECT_EQ(code_of("| | 2016 | 2017 |\n| a | 1 |\n"), Errc::ragged_rows);
}

TEST(TextResponse, SplitsAndStripsBullets) {
  auto r = parse_text_response("- first .\n\n* second .\n---\nthird .\n");
  EXPECT_EQ(r.pre_text, (std::vector<std::string>{"first .", "second ."}));
  EXPECT_EQ(r.post_text, (std::vector<std::string>{"third ."}));
}

TEST(ExtractionResponse, KeyValueLines) {
  auto m = parse_extraction_response("EBIT@2017 = $1,200\ngross_profit@2016: 2.4 million\nnoise\n");
  EXPECT_EQ(m.at("ebit@2017"), "$1,200");
  EXPECT_EQ(m.at("gross_profit@2016"), "2.4 million");
  EXPECT_EQ(m.size(), 2u);
}

TEST(Ledger, DeterministicAndOrderIndependent) {
  auto m = seed_model();
  auto a = ledger_entry(m, 5, "interest_expense", 2017);
  auto b = ledger_entry(m, 5, "interest_expense", 2017);
  EXPECT_EQ(a.display, b.display);
  EXPECT_EQ(a.value, b.value);
  EXPECT_NE(ledger_entry(m, 6, "interest_expense", 2017).display, a.display);
  EXPECT_GE(a.value, 100.0);
  EXPECT_LE(a.value, 5000.0);
}

TEST(Ledger, FormulaTargetsAreDerived) {
  auto m = seed_model();
  for (int year = 1995; year < 2020; ++year) {
    auto tp = ledger_entry(m, 9, "total_profit", year).value;
    auto ie = ledger_entry(m, 9, "interest_expense", year).value;
    auto ebit = ledger_entry(m, 9, "ebit", year).value;
    EXPECT_EQ(ebit, dsl::round_to(tp + ie, 2)) << year;
    auto margin = ledger_entry(m, 9, "gross_margins", year);
    EXPECT_EQ(margin.display.back(), '%');
  }
}

TEST(Ledger, DisplayAlwaysNormalizesToValue) {
  auto m = seed_model();
  Rng rng(41);
  const std::vector<std::string> vars{"revenue", "gross_margins", "ebit", "headcount", "net_profit"};
  for (int i = 0; i < 500; ++i) {
    const auto& v = rng.pick(vars);
    auto e = ledger_entry(m, rng.next(), v, static_cast<int>(rng.uniform_int(1990, 2030)));
    EXPECT_EQ(normalize_value(e.display, m.is_ratio(v), m.units), e.value) << e.display;
  }
}

TEST(Mock, TableResponseParsesAndMatchesLedger) {
  auto m = seed_model();
  MockBackend mock(m);
  Payload p = sample_payload();
  auto t = parse_table_response(mock.complete(table_prompt(p), {0.7, 3}));
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"", "2016", "2017"}));
  EXPECT_EQ(t.rows[1][0], "profit before income taxes");
  EXPECT_EQ(t.rows[2][2], ledger_entry(m, 3, "interest_expense", 2017).display);
  EXPECT_EQ(t.rows[3][0], "goodwill");
}

TEST(Mock, ExtractionReturnsLedgerDisplays) {
  auto m = seed_model();
  MockBackend mock(m);
  Payload p;
  p.required = {"ebit@2016", "revenue@2020"};
  auto out = parse_extraction_response(mock.complete(build_prompt({TaskKind::extract, ShotMode::zero, {}, p}), {0, 8}));
  EXPECT_EQ(out.at("ebit@2016"), ledger_entry(m, 8, "ebit", 2016).display);
  EXPECT_EQ(out.at("revenue@2020"), ledger_entry(m, 8, "revenue", 2020).display);
}

TEST(Mock, TextStatesEveryPairOnceLabelFirst) {
  auto m = seed_model();
  MockBackend mock(m);
  Payload p = sample_payload();
  auto r = parse_text_response(mock.complete(build_prompt({TaskKind::text, ShotMode::zero, {}, p}), {0.7, 4}));
  std::vector<std::string> all = r.pre_text;
  all.insert(all.end(), r.post_text.begin(), r.post_text.end());
  for (std::size_t i = 0; i < p.variables.size(); ++i) {
    for (int y : p.years) {
      const auto display = ledger_entry(m, 4, p.variables[i], y).display;
      int hits = 0;
      for (const auto& s : all) {
        if (s.rfind(p.labels[i], 0) == 0 && s.find(std::to_string(y)) != std::string::npos &&
            s.find(display) != std::string::npos) {
          ++hits;
        }
      }
      EXPECT_EQ(hits, 1) << p.variables[i] << " " << y;
    }
  }
}

TEST(Mock, TextTableNeverNamesVariables) {
  MockBackend mock(seed_model());
  Payload p = sample_payload();
  auto t = parse_table_response(mock.complete(build_prompt({TaskKind::text_table, ShotMode::zero, {}, p}), {0.7, 4}));
  for (std::size_t r = 1; r < t.rows.size(); ++r) EXPECT_EQ(t.rows[r][0], "goodwill");
  p.distractors.clear();
  t = parse_table_response(mock.complete(build_prompt({TaskKind::text_table, ShotMode::zero, {}, p}), {0.7, 4}));
  EXPECT_EQ(t.rows[1][0], "other items");
}

TEST(Mock, SameInputsSameBytesAcrossThreads) {
  MockBackend mock(seed_model());
  const auto prompt = table_prompt(sample_payload());
  const auto want = mock.complete(prompt, {0.7, 77});
  std::vector<std::string> got(8);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < got.size(); ++i) {
    pool.emplace_back([&, i] { got[i] = mock.complete(prompt, {0.7, 77}); });
  }
  for (auto& t : pool) t.join();
  for (const auto& g : got) EXPECT_EQ(g, want);
  EXPECT_NE(mock.complete(prompt, {0.7, 78}), want);
}

TEST(Mock, GoldenTableResponse) {
  MockBackend mock(seed_model());
  EXPECT_EQ(mock.complete(table_prompt(sample_payload()), {0.7, 2024}),
            read_file(std::string(FINSYNTH_GOLDEN_DIR) + "/mock_table_response.txt"));
}

TEST(Mock, UnparseablePromptGetsNonTableReply) {
  MockBackend mock(seed_model());
  EXPECT_THROW(parse_table_response(mock.complete("hello", {})), BackendError);
}

TEST(Scripted, ReplaysInOrderThenFails) {
  ScriptedBackend s({"one", "two"});
  EXPECT_EQ(s.complete("a", {}), "one");
  EXPECT_EQ(s.complete("b", {}), "two");
  try {
    s.complete("c", {});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.code(), Errc::malformed_response);
  }
  EXPECT_EQ(s.prompts(), (std::vector<std::string>{"a", "b", "c"}));
}

}  // namespace
}  // namespace finsynth::backend
