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

#include "finsynth/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "finsynth/dataset.hpp"
#include "finsynth/genpipe.hpp"
#include "finsynth/live_backend.hpp"
#include "finsynth/metrics.hpp"
#include "finsynth/mock_backend.hpp"
#include "finsynth/seed_file.hpp"

namespace finsynth::cli {
namespace {

namespace fs = std::filesystem;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run needs, resolved from defaults, the config file and flags.
struct RunConfig {
  std::string seeds = "data/seed_formulas.txt";
  std::string templates = "data/templates.txt";
  std::string exemplars = "data/exemplars.txt";
  std::vector<std::string> slices{"t1", "t2"};
  bool temporal = true;
  graph::ExtensionFilter filter;
  genpipe::GenConfig gen;
  std::string backend = "mock";
  backend::BackendConfig live;
  std::string output = "dataset.json";
  std::string log = "generation.log";
};

const std::set<std::string> kPathKeys = {"seeds", "templates", "exemplars", "output", "log"};

template <typename T>
T parse_as(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  if (!(in >> out) || !(in >> std::ws).eof()) {
    throw ConfigError("config key '" + key + "': cannot read '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "': expected true or false");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char c : s + ",") {
    if (c == ',' || c == '|') {
      auto b = item.find_first_not_of(' ');
      if (b != std::string::npos) out.push_back(item.substr(b, item.find_last_not_of(' ') - b + 1));
      item.clear();
    } else {
      item += c;
    }
  }
  return out;
}

void apply(RunConfig& rc, const std::string& key, const std::string& value) {
  if (key == "seeds") rc.seeds = value;
  else if (key == "templates") rc.templates = value;
  else if (key == "exemplars") rc.exemplars = value;
  else if (key == "slices") rc.slices = split_list(value);
  else if (key == "temporal") rc.temporal = parse_bool(key, value);
  else if (key == "max_steps") rc.filter.max_steps = parse_as<int>(key, value);
  else if (key == "max_vars") rc.filter.max_vars = parse_as<int>(key, value);
  else if (key == "iterations") rc.filter.iterations = parse_as<int>(key, value);
  else if (key == "examples_per_node") rc.gen.examples_per_node = parse_as<std::size_t>(key, value);
  else if (key == "seed") rc.gen.seed = parse_as<std::uint64_t>(key, value);
  else if (key == "distractor_rows") rc.gen.distractor_rows = parse_as<std::size_t>(key, value);
  else if (key == "max_attempts") rc.gen.max_attempts = parse_as<int>(key, value);
  else if (key == "shot_mode") {
    auto m = backend::shot_mode_from_name(value);
    if (!m) throw ConfigError("shot_mode must be zero, one or few");
    rc.gen.shot_mode = *m;
  } else if (key == "backend") {
    if (value != "mock" && value != "live") throw ConfigError("backend must be mock or live");
    rc.backend = value;
  } else if (key == "endpoint") rc.live.endpoint = value;
  else if (key == "model") rc.live.model = value;
  else if (key == "api_key_env") rc.live.api_key_env = value;
  else if (key == "max_retries") rc.live.max_retries = parse_as<int>(key, value);
  else if (key == "backoff_ms") rc.live.backoff_ms = parse_as<int>(key, value);
  else if (key == "timeout_s") rc.live.timeout_s = parse_as<int>(key, value);
  else if (key == "max_concurrency") {
    rc.live.max_concurrency = parse_as<int>(key, value);
    if (rc.live.max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
    rc.gen.max_concurrency = static_cast<std::size_t>(rc.live.max_concurrency);
  } else if (key == "temperature") {
    rc.live.temperature = rc.gen.temperature = parse_as<double>(key, value);
  } else if (key == "output") rc.output = value;
  else if (key == "log") rc.log = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

RunConfig resolve(const std::string& config_path, const std::map<std::string, std::string>& flags) {
  RunConfig rc;
  rc.gen.max_concurrency = static_cast<std::size_t>(rc.live.max_concurrency);
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
    std::map<std::string, std::string> rest;
    try {
      rest = genpipe::apply_vocabulary_config(in, rc.gen);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(config_path + ": " + e.what());
    }
    const fs::path base = fs::path(config_path).parent_path();
    for (auto [key, value] : rest) {
      if (kPathKeys.count(key) && fs::path(value).is_relative()) value = (base / value).string();
      apply(rc, key, value);
    }
  }
  for (const auto& [key, value] : flags) apply(rc, key, value);
  if (rc.filter.max_steps < 1 || rc.filter.max_vars < 1 || rc.filter.iterations < 0) {
    throw ConfigError("filter needs max_steps >= 1, max_vars >= 1 and iterations >= 0");
  }
  return rc;
}

graph::FormulaGraph extended_graph(const RunConfig& rc, const SeedSet& seeds,
                                   std::vector<std::size_t>* counts) {
  auto g = graph::build_graph(seeds.nodes);
  if (counts) counts->push_back(g.size());
  if (rc.temporal && rc.slices.size() >= 2) g = graph::add_temporal(g, rc.slices);
  if (counts) counts->push_back(g.size());
  return graph::extend(g, rc.filter, counts);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw datasetio::DatasetError(datasetio::Errc::io_error, "cannot write '" + path + "'");
  }
}

/// Registers a flag whose value, when given, lands in `flags[key]`.
void flag(CLI::App* app, std::map<std::string, std::string>& flags, const std::string& name,
          const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
}

void run_flags(CLI::App* app, std::map<std::string, std::string>& flags) {
  flag(app, flags, "--seeds", "seeds", "Seed formula file");
  flag(app, flags, "--slices", "slices", "Time slice labels, comma separated (default t1,t2)");
  flag(app, flags, "--temporal", "temporal", "Add the temporal dimension (true/false)");
  flag(app, flags, "--max-steps", "max_steps", "Step budget for composed formulas (default 4)");
  flag(app, flags, "--max-vars", "max_vars", "Variable budget for composed formulas (default 5)");
  flag(app, flags, "--iterations", "iterations", "Extension rounds (default 6)");
}

int cmd_compile(const std::string& path, bool dump, std::ostream& out) {
  auto seeds = load_seed_file(path);
  auto g = graph::build_graph(seeds.nodes);
  out << graph::format_stats(graph::graph_stats(g));
  if (dump) out << graph::dump(g);
  return kExitOk;
}

int cmd_extend(const RunConfig& rc, const std::string& dump_path, std::ostream& out) {
  auto seeds = load_seed_file(rc.seeds);
  std::vector<std::size_t> counts;
  auto g = extended_graph(rc, seeds, &counts);
  out << "stage\tnodes\n";
  out << "seed\t" << counts[0] << '\n';
  out << "temporal\t" << counts[1] << '\n';
  for (std::size_t i = 2; i < counts.size(); ++i) out << "round " << (i - 1) << '\t' << counts[i] << '\n';
  out << graph::format_stats(graph::graph_stats(g));
  if (!dump_path.empty()) write_text(dump_path, graph::dump(g));
  return kExitOk;
}

int cmd_generate(RunConfig rc, std::ostream& out, std::ostream& err) {
  auto seeds = load_seed_file(rc.seeds);
  try {
    rc.gen.templates = genpipe::Templates::load(rc.templates);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (rc.gen.shot_mode != backend::ShotMode::zero) {
    rc.gen.exemplars = backend::load_exemplars_file(rc.exemplars);
  }
  auto g = extended_graph(rc, seeds, nullptr);

  std::unique_ptr<backend::TextGenerator> gen;
  if (rc.backend == "live") {
    gen = std::make_unique<backend::LiveBackend>(rc.live);
  } else {
    gen = std::make_unique<backend::MockBackend>(genpipe::make_value_model(seeds, rc.gen));
  }
  auto result = genpipe::generate_dataset(g, rc.gen, *gen);

  std::string log = "backend " + gen->name() + "\nnodes " + std::to_string(g.size()) + "\n" +
                    genpipe::format_summary(result.summary);
  for (const auto& line : result.summary.log) log += line + '\n';
  write_text(rc.log, log);

  std::string text;
  try {
    text = datasetio::dump_dataset(result.examples);
  } catch (const datasetio::DatasetError& e) {
    err << "error: generated dataset failed validation: " << e.what() << '\n';
    return kExitValidation;
  }
  write_text(rc.output, text);
  out << genpipe::format_summary(result.summary);
  out << "wrote " << result.examples.size() << " examples to " << rc.output << '\n';
  if (result.summary.audit_passed != result.summary.emitted) {
    err << "error: " << (result.summary.emitted - result.summary.audit_passed)
        << " example(s) failed the self-consistency audit; see " << rc.log << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_split(const std::string& path, const std::string& out_dir, std::uint64_t seed,
              std::ostream& out) {
  auto examples = datasetio::read_dataset(path);
  datasetio::SplitSpec spec;
  spec.seed = seed;
  auto parts = datasetio::split(examples, spec);
  fs::create_directories(out_dir);
  datasetio::write_dataset(parts.train, (fs::path(out_dir) / "train.json").string());
  datasetio::write_dataset(parts.dev, (fs::path(out_dir) / "dev.json").string());
  datasetio::write_dataset(parts.test, (fs::path(out_dir) / "test.json").string());
  out << "train " << parts.train.size() << "\ndev " << parts.dev.size() << "\ntest "
      << parts.test.size() << '\n';
  return kExitOk;
}

int cmd_convert(const std::string& path, const std::string& out_path, std::ostream& out) {
  auto conv = datasetio::convert_tatqa(datasetio::read_dataset(path));
  write_text(out_path, conv.records.dump(2) + "\n");
  out << "reports " << conv.records.size() << "\nskipped " << conv.skipped << '\n';
  for (const auto& line : conv.log) out << line << '\n';
  return kExitOk;
}

int cmd_stats(const std::string& path, bool lenient, std::ostream& out) {
  if (lenient) {
    std::ifstream in(path);
    if (!in) throw datasetio::DatasetError(datasetio::Errc::io_error, "cannot read '" + path + "'");
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw datasetio::DatasetError(datasetio::Errc::schema_error, "not JSON");
    out << datasetio::format_stats(datasetio::dataset_stats_json(j));
  } else {
    out << datasetio::format_stats(datasetio::dataset_stats(datasetio::read_dataset(path)));
  }
  return kExitOk;
}

int cmd_eval(const std::string& pred_path, const std::string& gold_path, double tol,
             std::ostream& out) {
  auto result = metrics::evaluate(metrics::read_predictions(pred_path),
                                  datasetio::read_dataset(gold_path), tol);
  out << metrics::format_result(result);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthesizes financial numerical-reasoning QA datasets from seed formulas."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "finsynth 0.1.0");

  std::map<std::string, std::string> flags;
  std::string config_path;

  auto* compile = app.add_subcommand("compile", "Compile a seed file and print graph statistics");
  std::string formulas;
  bool dump = false;
  compile->add_option("formulas", formulas, "Seed formula file")->required();
  compile->add_flag("--dump", dump, "Also print the node and edge dump");

  auto* extend = app.add_subcommand("extend", "Add time slices and extend the graph");
  extend->add_option("-c,--config", config_path, "Config file (key = value lines)");
  run_flags(extend, flags);
  std::string dump_path;
  extend->add_option("--dump", dump_path, "Write the extended graph dump here");

  auto* generate = app.add_subcommand("generate", "Generate a dataset");
  generate->add_option("-c,--config", config_path, "Config file (key = value lines)");
  run_flags(generate, flags);
  flag(generate, flags, "--templates", "templates", "Question template file");
  flag(generate, flags, "--exemplars", "exemplars", "Prompt exemplar file");
  flag(generate, flags, "--examples-per-node", "examples_per_node", "Examples per formula node");
  flag(generate, flags, "--seed", "seed", "Global seed");
  flag(generate, flags, "--backend", "backend", "mock or live");
  flag(generate, flags, "--endpoint", "endpoint", "Chat-completions base URL");
  flag(generate, flags, "--model", "model", "Model name for the live backend");
  flag(generate, flags, "--api-key-env", "api_key_env",
       "Environment variable holding the API key (default FINSYNTH_API_KEY)");
  flag(generate, flags, "--max-retries", "max_retries", "Retries on 429/5xx/timeouts");
  flag(generate, flags, "--backoff-ms", "backoff_ms", "Base backoff in milliseconds");
  flag(generate, flags, "--timeout", "timeout_s", "Request timeout in seconds");
  flag(generate, flags, "--max-concurrency", "max_concurrency", "Parallel examples (default 4)");
  flag(generate, flags, "--temperature", "temperature", "Sampling temperature for reports");
  flag(generate, flags, "--shot-mode", "shot_mode", "zero, one or few");
  flag(generate, flags, "-o,--output", "output", "Dataset output path");
  flag(generate, flags, "--log", "log", "Generation log path");

  auto* split = app.add_subcommand("split", "Split a dataset 75/10/15 into train, dev and test");
  std::string split_in, split_dir = ".";
  std::uint64_t split_seed = 0;
  split->add_option("dataset", split_in, "Dataset file")->required();
  split->add_option("--out-dir", split_dir, "Output directory");
  split->add_option("--seed", split_seed, "Shuffle seed");

  auto* convert = app.add_subcommand("convert", "Convert a dataset to the TAT-QA layout");
  std::string convert_in, convert_out = "tatqa.json";
  convert->add_option("dataset", convert_in, "Dataset file")->required();
  convert->add_option("-o,--output", convert_out, "Output path");

  auto* stats = app.add_subcommand("stats", "Print dataset distribution statistics");
  std::string stats_in;
  bool lenient = false;
  stats->add_option("dataset", stats_in, "Dataset file")->required();
  stats->add_flag("--lenient", lenient, "Count any FinQA-shaped file without full validation");

  auto* eval = app.add_subcommand("eval", "Score predictions: execution and program accuracy");
  std::string pred_in, gold_in;
  double tol = metrics::kDefaultTolerance;
  eval->add_option("predictions", pred_in, "Prediction file")->required();
  eval->add_option("gold", gold_in, "Gold dataset file")->required();
  eval->add_option("--tolerance", tol, "Absolute tolerance after rounding");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*compile) return cmd_compile(formulas, dump, out);
    if (*extend) return cmd_extend(resolve(config_path, flags), dump_path, out);
    if (*generate) return cmd_generate(resolve(config_path, flags), out, err);
    if (*split) return cmd_split(split_in, split_dir, split_seed, out);
    if (*convert) return cmd_convert(convert_in, convert_out, out);
    if (*stats) return cmd_stats(stats_in, lenient, out);
    if (*eval) return cmd_eval(pred_in, gold_in, tol, out);
  } catch (const SeedFileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const backend::BackendError& e) {
    err << "error: " << backend::errc_name(e.code()) << ": " << e.what() << '\n';
    return e.code() == backend::Errc::config_error ? kExitInput : kExitBackend;
  } catch (const datasetio::DatasetError& e) {
    err << "error: " << datasetio::errc_name(e.code()) << ": " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace finsynth::cli
