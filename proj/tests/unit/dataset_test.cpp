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

#include <cstdio>
#include <filesystem>
#include <numeric>

#include "finsynth/dataset.hpp"
#include "fixtures.hpp"

namespace finsynth::datasetio {
namespace {

using nlohmann::json;

QAExample margin_example() {
  QAExample ex;
  ex.id = "gross_margins/0";
  ex.report.pre_text = {"the company sells widgets .", "gross profit was $2,449.9 in 2019 ."};
  ex.report.table.rows = {{"", "2019"}, {"revenue", "15191.5"}};
  ex.report.post_text = {"see notes ."};
  ex.question = "what was the gross margins in 2019?";
  ex.program = dsl::parse_program("divide(gross_profit_2019, revenue_2019)");
  ex.exe_ans = dsl::Value::number(0.16127);
  ex.gold_inds = {{FactRef::Kind::text, 1}, {FactRef::Kind::table_row, 1}};
  ex.support_kind = SupportKind::text;
  ex.source_node = "gross_margins";
  ex.time = {{2019}, {2019}, {}};
  ex.bindings = {{dsl::VarRef("gross_profit_2019"), 2449.9}, {dsl::VarRef("revenue_2019"), 15191.5}};
  return ex;
}

const std::vector<QAExample>& mock_examples() {
  static const std::vector<QAExample> examples = [] {
    auto cfg = testing::shipped_config();
    backend::MockBackend mock(genpipe::make_value_model(testing::shipped_seeds(), cfg));
    return genpipe::generate_dataset(testing::shipped_graph(true), cfg, mock).examples;
  }();
  return examples;
}

Errc dataset_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const DatasetError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no DatasetError";
  return Errc::io_error;
}

TEST(Json, RecordLayout) {
  auto j = to_json(margin_example());
  EXPECT_EQ(j["qa"]["program"], "divide(gross_profit_2019, revenue_2019)");
  EXPECT_EQ(j["qa"]["program_numeric"], "divide(2449.9, 15191.5)");
  EXPECT_EQ(j["qa"]["exe_ans"], 0.16127);
  EXPECT_EQ(j["qa"]["gold_inds"]["text_1"], "gross profit was $2,449.9 in 2019 .");
  EXPECT_EQ(j["qa"]["gold_inds"]["table_1"], "the revenue of 2019 is 15191.5 ;");
  EXPECT_EQ(j["meta"]["support_kind"], "text");
  EXPECT_EQ(from_json(j), margin_example());
}

TEST(Json, BooleanAnswers) {
  auto ex = margin_example();
  ex.program = dsl::parse_program("greater(gross_profit_2019, revenue_2019)");
  ex.exe_ans = dsl::Value::boolean(false);
  auto j = to_json(ex);
  EXPECT_EQ(j["qa"]["exe_ans"], "no");
  EXPECT_EQ(from_json(j), ex);
}

TEST(Json, SchemaErrors) {
  auto base = to_json(margin_example());
  auto broken = [&](auto mutate) {
    json j = base;
    mutate(j);
    return dataset_code([&] { from_json(j); });
  };
  EXPECT_EQ(broken([](json& j) { j.erase("id"); }), Errc::schema_error);
  EXPECT_EQ(broken([](json& j) { j.erase("table"); }), Errc::schema_error);
  EXPECT_EQ(broken([](json& j) { j["qa"]["program"] = "divide(a"; }), Errc::schema_error);
  EXPECT_EQ(broken([](json& j) { j["qa"]["exe_ans"] = "maybe"; }), Errc::schema_error);
  EXPECT_EQ(broken([](json& j) { j["qa"]["exe_ans"] = 0.5; }), Errc::schema_error);
  EXPECT_EQ(broken([](json& j) { j["qa"]["gold_inds"] = json::object(); }), Errc::schema_error);
  EXPECT_EQ(broken([](json& j) { j["qa"]["gold_inds"]["table_5"] = "x"; }), Errc::schema_error);
  EXPECT_EQ(broken([](json& j) { j["qa"]["gold_inds"]["row_1"] = "x"; }), Errc::schema_error);
  EXPECT_EQ(broken([](json& j) { j["table"][1].push_back("extra"); }), Errc::schema_error);
  EXPECT_EQ(broken([](json& j) { j["meta"]["time"]["question_points"] = {2030}; }),
            Errc::schema_error);
  EXPECT_EQ(broken([](json& j) { j["meta"]["support_kind"] = "chart"; }), Errc::schema_error);
}

TEST(Json, OptionalFieldsMayBeAbsent) {
  auto j = to_json(margin_example());
  j.erase("meta");
  j["qa"].erase("bindings");
  j["qa"].erase("program_numeric");
  auto ex = from_json(j);
  EXPECT_TRUE(ex.bindings.empty());
  EXPECT_EQ(ex.support_kind, SupportKind::table);
}

TEST(Json, GoldFactsSortedIntoDocumentOrder) {
  auto j = to_json(margin_example());
  // Object keys come back alphabetically ("table_1" before "text_1").
  auto ex = from_json(j);
  ASSERT_EQ(ex.gold_inds.size(), 2u);
  EXPECT_EQ(ex.gold_inds[0].key(), "text_1");
  EXPECT_EQ(ex.gold_inds[1].key(), "table_1");
}

TEST(Dataset, WriteReadIdentity) {
  const auto& examples = mock_examples();
  ASSERT_GE(examples.size(), 200u);
  std::vector<QAExample> first(examples.begin(), examples.begin() + 200);
  const auto path = (std::filesystem::temp_directory_path() / "finsynth_dataset_test.json").string();
  write_dataset(first, path);
  auto back = read_dataset(path);
  std::remove(path.c_str());
  EXPECT_EQ(back, first);
  EXPECT_EQ(dump_dataset(back), dump_dataset(first));
}

TEST(Dataset, DumpIsSortedAndNewlineTerminated) {
  auto a = margin_example();
  auto b = margin_example();
  b.id = "a_first/0";
  const auto text = dump_dataset({a, b});
  EXPECT_EQ(text.back(), '\n');
  EXPECT_LT(text.find("a_first/0"), text.find("gross_margins/0"));
  EXPECT_EQ(dataset_code([&] { parse_dataset("[" + to_json(a).dump() + "," + to_json(a).dump() + "]"); }),
            Errc::schema_error);
  EXPECT_EQ(dataset_code([&] { parse_dataset("{}"); }), Errc::schema_error);
  EXPECT_EQ(dataset_code([&] { read_dataset("/nonexistent/x.json"); }), Errc::io_error);
}

TEST(Tatqa, DerivationUsesBoundValues) {
  auto conv = convert_tatqa({margin_example()});
  ASSERT_EQ(conv.records.size(), 1u);
  const auto& q = conv.records[0]["questions"][0];
  EXPECT_EQ(q["derivation"], "2449.9 / 15191.5");
  EXPECT_EQ(q["answer_type"], "arithmetic");
  EXPECT_EQ(q["answer_from"], "text");
  EXPECT_EQ(q["answer"], 0.16127);
  EXPECT_EQ(conv.records[0]["paragraphs"].size(), 3u);
  EXPECT_EQ(conv.records[0]["table"]["table"][1][1], "15191.5");
}

TEST(Tatqa, SharedReportsGroupAndBooleansSkip) {
  auto a = margin_example();
  auto b = margin_example();
  b.id = "other/1";
  auto c = margin_example();
  c.id = "yesno/0";
  c.program = dsl::parse_program("greater(gross_profit_2019, revenue_2019)");
  c.exe_ans = dsl::Value::boolean(false);
  auto conv = convert_tatqa({a, b, c});
  ASSERT_EQ(conv.records.size(), 1u);
  EXPECT_EQ(conv.records[0]["questions"].size(), 2u);
  EXPECT_EQ(conv.records[0]["questions"][1]["order"], 2);
  EXPECT_EQ(conv.skipped, 1u);
  ASSERT_EQ(conv.log.size(), 1u);
  EXPECT_NE(conv.log[0].find("UnsupportedAnswer"), std::string::npos);
}

TEST(Split, SizesFollowFractions) {
  auto s = split_sizes(15361, {});
  EXPECT_EQ(s.train, 11521u);
  EXPECT_EQ(s.dev, 1536u);
  EXPECT_EQ(s.test, 2304u);
  auto small = split_sizes(3, {});
  EXPECT_EQ(small.train + small.dev + small.test, 3u);
  EXPECT_EQ(dataset_code([] { split_sizes(2, {}); }), Errc::too_few_examples);
  EXPECT_THROW(split_sizes(10, {0.5, 0.5, 0.5, 0}), std::invalid_argument);
}

TEST(Split, PartitionIsExactAndSeeded) {
  for (std::size_t n : {3u, 10u, 101u, 1000u}) {
    SplitSpec spec;
    spec.seed = n;
    auto idx = split_indices(n, spec);
    std::vector<std::size_t> all = idx.train;
    all.insert(all.end(), idx.dev.begin(), idx.dev.end());
    all.insert(all.end(), idx.test.begin(), idx.test.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> want(n);
    std::iota(want.begin(), want.end(), 0);
    EXPECT_EQ(all, want);
    auto again = split_indices(n, spec);
    EXPECT_EQ(again.train, idx.train);
    EXPECT_EQ(again.test, idx.test);
  }
}

TEST(Split, IndependentOfInputOrder) {
  std::vector<QAExample> examples;
  for (int i = 0; i < 20; ++i) {
    auto ex = margin_example();
    ex.id = "ex/" + std::to_string(100 + i);
    examples.push_back(ex);
  }
  auto a = split(examples, {});
  std::reverse(examples.begin(), examples.end());
  auto b = split(examples, {});
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.dev, b.dev);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.train.size() + a.dev.size() + a.test.size(), 20u);
}

TEST(Merge, CollidingIdsArePrefixed) {
  auto x = margin_example();
  auto y = margin_example();
  y.id = "unique/0";
  auto merged = merge({x}, {x, y});
  ASSERT_EQ(merged.size(), 3u);
  EXPECT_EQ(merged[0].id, "a/gross_margins/0");
  EXPECT_EQ(merged[1].id, "b/gross_margins/0");
  EXPECT_EQ(merged[2].id, "unique/0");
}

TEST(Stats, HistogramsFromExamples) {
  auto one = margin_example();
  auto two = margin_example();
  two.id = "b";
  two.support_kind = SupportKind::table;
  two.gold_inds = {{FactRef::Kind::table_row, 1}};
  auto s = dataset_stats({one, two});
  EXPECT_EQ(s.total, 2u);
  EXPECT_EQ(s.gold_inds.counts.at("1"), 1u);
  EXPECT_EQ(s.gold_inds.counts.at("2"), 1u);
  EXPECT_EQ(s.steps.counts.at("1"), 2u);
  EXPECT_EQ(s.support_kind.counts.at("text"), 1u);
  EXPECT_DOUBLE_EQ(s.support_kind.percent.at("table"), 50.0);
}

TEST(Stats, LenientJsonAgreesWithTypedStats) {
  const auto& examples = mock_examples();
  auto typed = dataset_stats(examples);
  auto lenient = dataset_stats_json(json::parse(dump_dataset(examples)));
  EXPECT_EQ(lenient.gold_inds.counts, typed.gold_inds.counts);
  EXPECT_EQ(lenient.steps.counts, typed.steps.counts);
  EXPECT_EQ(lenient.support_kind.counts, typed.support_kind.counts);

  // Without meta, support kind falls back to the gold keys.
  json bare = json::array({{{"qa", {{"program", "add(1, 2), divide(#0, 3)"},
                                    {"gold_inds", {{"text_0", "a"}, {"table_1", "b"}}}}}},
                           {{"qa", {{"program", "add(1, 2)"}, {"gold_inds", {{"table_2", "b"}}}}}}});
  auto s = dataset_stats_json(bare);
  EXPECT_EQ(s.support_kind.counts.at("text"), 1u);
  EXPECT_EQ(s.support_kind.counts.at("table"), 1u);
  EXPECT_EQ(s.steps.counts.at("2"), 1u);
}

}  // namespace
}  // namespace finsynth::datasetio
