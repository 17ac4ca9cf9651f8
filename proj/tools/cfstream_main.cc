// Copyright 2026 The Authors.
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

// cfstream: run streams, experiment suites, the exhaustive oracle and the
// synthetic generator.
//
// Exit codes: 0 success, 2 usage, 3 infeasible constraints or stream,
// 4 data error, 1 anything else.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "cfstream/bench.h"
#include "cfstream/csv.h"
#include "cfstream/domain.h"
#include "cfstream/error.h"
#include "cfstream/eval.h"
#include "cfstream/ingest.h"
#include "cfstream/json_io.h"
#include "cfstream/session.h"
#include "cfstream/similarity.h"
#include "cfstream/synth.h"

namespace cfstream {
namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitData = 4;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInfeasibleConstraints:
    case ErrorCode::kInfeasibleStream:
      return kExitInfeasible;
    case ErrorCode::kMalformedSpec:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInstanceTooLarge:
      return kExitUsage;
    case ErrorCode::kSchemaMismatch:
    case ErrorCode::kParseError:
    case ErrorCode::kUnknownLabel:
    case ErrorCode::kIoError:
    case ErrorCode::kEmptyExplanation:
      return kExitData;
    default:
      return kExitFailure;
  }
}

// ---------------------------------------------------------------------------
// Data sources.

struct SourceFlags {
  std::string data;
  std::string synth;
  std::string schema;
  std::string label_column;
  std::string query;
};

void AddSourceFlags(CLI::App* cmd, SourceFlags& f, bool allow_synth) {
  auto* data = cmd->add_option("--data", f.data, "Input CSV (RFC 4180)")
                   ->check(CLI::ExistingFile);
  if (allow_synth) {
    auto* synth = cmd->add_option(
        "--synth", f.synth,
        "Synthetic stream: key=value list (n, labels, continuous, "
        "categorical, levels, feature, label, drift, seed, sigma) or a "
        "JSON file with the same keys");
    data->excludes(synth);
    synth->excludes(data);
  }
  cmd->add_option("--schema", f.schema, "Schema JSON for --data")
      ->check(CLI::ExistingFile);
  cmd->add_option("--label-column", f.label_column,
                  "Infer the schema from --data with this label column");
  cmd->add_option("--query", f.query,
                  "Query: a CSV file (header + one row) or the id of a "
                  "stream item");
}

SynthConfig ParseSynthSpec(const std::string& text, std::uint64_t seed) {
  SynthConfig c;
  c.seed = seed;
  std::map<std::string, std::string> kv;
  if (std::filesystem::is_regular_file(text)) {
    std::ifstream in(text);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw Error(ErrorCode::kParseError, "'" + text + "' is not a JSON object");
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      kv[it.key()] = it.value().is_string() ? it.value().get<std::string>()
                                            : it.value().dump();
    }
  } else {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part.empty()) continue;
      const std::size_t eq = part.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::kInvalidArgument,
                    "--synth expects key=value pairs, got '" + part + "'");
      }
      kv[part.substr(0, eq)] = part.substr(eq + 1);
    }
  }
  auto as_size = [](const std::string& v) {
    return static_cast<std::size_t>(ParseNumber(v));
  };
  for (const auto& [key, value] : kv) {
    if (key == "n") {
      c.n = as_size(value);
    } else if (key == "labels") {
      c.labels = static_cast<int>(ParseNumber(value));
    } else if (key == "continuous") {
      c.continuous = static_cast<int>(ParseNumber(value));
    } else if (key == "categorical") {
      c.categorical = static_cast<int>(ParseNumber(value));
    } else if (key == "levels") {
      c.levels = static_cast<int>(ParseNumber(value));
    } else if (key == "feature") {
      c.feature_mode = ParseDriftMode(value);
    } else if (key == "label") {
      c.label_mode = ParseDriftMode(value);
    } else if (key == "drift") {
      c.drift_point = as_size(value);
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(ParseNumber(value));
    } else if (key == "sigma") {
      c.sigma = ParseNumber(value);
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown --synth key '" + key + "'");
    }
  }
  ValidateSynthConfig(c);
  return c;
}

// Resolved dataset: either a CSV file or a generator, plus the schema and
// the categorical dictionary shared by every pass over it.
class Dataset {
 public:
  Dataset(const SourceFlags& flags, std::uint64_t seed) {
    if (!flags.synth.empty()) {
      synth_ = ParseSynthSpec(flags.synth, seed);
      schema_ = SynthSchema(*synth_);
      dictionary_ = SynthDictionary(*synth_);
      return;
    }
    if (flags.data.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--data or --synth is required");
    }
    path_ = flags.data;
    if (!flags.schema.empty()) {
      schema_ = std::make_shared<const Schema>(LoadSchemaFile(flags.schema));
    } else if (!flags.label_column.empty()) {
      schema_ = std::make_shared<const Schema>(
          InferSchema(flags.data, flags.label_column));
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "--data needs --schema or --label-column");
    }
    dictionary_ = CategoryDictionary(schema_->categorical_count());
  }

  std::unique_ptr<ItemSource> Open() {
    if (synth_) return std::make_unique<SynthStream>(*synth_);
    return std::make_unique<CsvItemSource>(path_, schema_, &dictionary_);
  }

  std::vector<Item> LoadAll() {
    std::vector<Item> items;
    std::unique_ptr<ItemSource> source = Open();
    while (std::optional<Item> item = source->Next()) {
      items.push_back(std::move(*item));
    }
    return items;
  }

  bool is_synth() const { return synth_.has_value(); }
  const std::optional<SynthConfig>& synth() const { return synth_; }
  const std::shared_ptr<const Schema>& schema() const { return schema_; }
  CategoryDictionary& dictionary() { return dictionary_; }

 private:
  std::optional<SynthConfig> synth_;
  std::string path_;
  std::shared_ptr<const Schema> schema_;
  CategoryDictionary dictionary_;
};

bool IsUnsigned(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return c >= '0' && c <= '9';
  });
}

// The query and, when it was taken from the stream, its id (excluded from
// the candidates).
struct ResolvedQuery {
  Item item;
  std::optional<ItemId> stream_id;
};

ResolvedQuery ResolveQuery(const std::string& flag, Dataset& dataset) {
  ResolvedQuery out;
  if (flag.empty()) {
    if (!dataset.is_synth()) {
      throw Error(ErrorCode::kInvalidArgument, "--query is required with --data");
    }
    out.item = SynthQuery(*dataset.synth());
    return out;
  }
  if (IsUnsigned(flag) && !std::filesystem::exists(flag)) {
    const ItemId id = std::stoull(flag);
    std::unique_ptr<ItemSource> source = dataset.Open();
    while (std::optional<Item> item = source->Next()) {
      if (item->id == id) {
        out.item = std::move(*item);
        out.stream_id = id;
        out.item.id = kQueryItemId;
        return out;
      }
    }
    throw Error(ErrorCode::kInvalidArgument,
                "no stream item with id " + flag);
  }
  CsvItemSource source(flag, dataset.schema(), &dataset.dictionary());
  std::optional<Item> item = source.Next();
  if (!item) {
    throw Error(ErrorCode::kParseError, "query file '" + flag + "' is empty");
  }
  out.item = std::move(*item);
  out.item.id = kQueryItemId;
  return out;
}

class ExcludingSource : public ItemSource {
 public:
  ExcludingSource(ItemSource& inner, std::optional<ItemId> skip)
      : inner_(inner), skip_(skip) {}

  std::optional<Item> Next() override {
    while (std::optional<Item> item = inner_.Next()) {
      if (skip_ && item->id == *skip_) continue;
      return item;
    }
    return std::nullopt;
  }

 private:
  ItemSource& inner_;
  std::optional<ItemId> skip_;
};

// ---------------------------------------------------------------------------
// Constraint and utility flags.

struct ConstraintFlags {
  int k = 10;
  std::vector<int> alpha;
  std::vector<int> beta;
  std::optional<double> auto_bounds;
};

void AddConstraintFlags(CLI::App* cmd, ConstraintFlags& f,
                        bool with_auto_bounds) {
  cmd->add_option("--k", f.k, "Explanation size bound")->capture_default_str();
  auto* alpha = cmd->add_option("--alpha", f.alpha, "Lower bounds a,b,...")
                    ->delimiter(',');
  auto* beta =
      cmd->add_option("--beta", f.beta, "Upper bounds a,b,...")->delimiter(',');
  alpha->needs(beta);
  beta->needs(alpha);
  if (with_auto_bounds) {
    auto* ab = cmd->add_option(
        "--auto-bounds", f.auto_bounds,
        "Proportional bounds from the label histogram with slack s "
        "(multipliers 1-s and 1+s)");
    ab->excludes(alpha);
    ab->excludes(beta);
  }
}

ConstraintSpec ResolveConstraints(const ConstraintFlags& f, Dataset& dataset) {
  const int labels = dataset.schema()->label_count();
  ConstraintSpec spec;
  if (f.auto_bounds) {
    std::unique_ptr<ItemSource> source = dataset.Open();
    const DatasetProfile profile = ProfileItems(*source, *dataset.schema());
    std::vector<double> histogram(profile.label_counts.begin(),
                                  profile.label_counts.end());
    spec = InferBounds(histogram, f.k, 1.0 - *f.auto_bounds,
                       1.0 + *f.auto_bounds);
  } else if (!f.alpha.empty()) {
    spec = {f.k, f.alpha, f.beta};
  } else {
    spec = {f.k, std::vector<int>(static_cast<std::size_t>(labels), 0),
            std::vector<int>(static_cast<std::size_t>(labels), f.k)};
  }
  ValidateConstraints(spec, *dataset.schema());
  return spec;
}

struct UtilityFlags {
  std::string mode = "hybrid";
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  double lambda3 = 0.5;
  std::string swap_lambda = "auto";
};

void AddUtilityFlags(CLI::App* cmd, UtilityFlags& f, bool with_swap) {
  cmd->add_option("--utility", f.mode, "hybrid|content|sampling|clustering")
      ->check(CLI::IsMember({"hybrid", "content", "sampling", "clustering"}))
      ->capture_default_str();
  cmd->add_option("--lambda1", f.lambda1)->capture_default_str();
  cmd->add_option("--lambda2", f.lambda2)->capture_default_str();
  cmd->add_option("--lambda3", f.lambda3)->capture_default_str();
  if (with_swap) {
    cmd->add_option("--swap-lambda", f.swap_lambda,
                    "Swap threshold: a number or 'auto' (from the estimated "
                    "curvature of the first items)")
        ->capture_default_str();
  }
}

UtilityConfig ResolveUtility(const UtilityFlags& f, std::uint64_t seed) {
  UtilityConfig config;
  config.mode = ParseUtilityMode(f.mode);
  config.lambda1 = f.lambda1;
  config.lambda2 = f.lambda2;
  config.lambda3 = f.lambda3;
  config.seed = seed;
  if (f.swap_lambda != "auto") {
    try {
      config.swap_threshold = ParseNumber(f.swap_lambda);
    } catch (const Error&) {
      throw Error(ErrorCode::kInvalidArgument,
                  "--swap-lambda must be a number or 'auto'");
    }
  }
  ValidateUtilityConfig(config);
  return config;
}

void WriteJsonFile(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  }
  out << doc.dump(2) << '\n';
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// run

struct RunFlags {
  SourceFlags source;
  ConstraintFlags constraints;
  UtilityFlags utility;
  std::string algo = "ours";
  std::uint64_t seed = 1;
  std::string out = ".";
};

void WriteStatsCsv(const std::filesystem::path& path, const RunStats& stats,
                   const ViolationCounts& violations) {
  std::ofstream out = OpenOut(path);
  const std::vector<std::string> header = {
      "items",         "accepted",       "swaps",
      "rejects",       "utility_calls",  "total_nanos",
      "stream_upper",  "final_violations", "swap_threshold",
      "curvature"};
  WriteCsvRow(out, header);
  const std::vector<std::string> row = {
      std::to_string(stats.items),
      std::to_string(stats.accepted),
      std::to_string(stats.swaps),
      std::to_string(stats.rejects),
      std::to_string(stats.utility_calls),
      std::to_string(stats.total_nanos),
      std::to_string(violations.stream_upper),
      std::to_string(violations.final_total),
      FormatNumber(stats.swap_threshold),
      stats.curvature ? FormatNumber(*stats.curvature) : std::string()};
  WriteCsvRow(out, row);
}

int RunCommand(const RunFlags& f) {
  const Algorithm algorithm = ParseAlgorithm(f.algo);
  Dataset dataset(f.source, f.seed);
  if (algorithm == Algorithm::kOffline && dataset.is_synth()) {
    throw Error(ErrorCode::kInvalidArgument,
                "--algo offline needs a materialized file (--data)");
  }
  const ResolvedQuery query = ResolveQuery(f.source.query, dataset);
  const ConstraintSpec spec = ResolveConstraints(f.constraints, dataset);
  const UtilityConfig config = ResolveUtility(f.utility, f.seed);
  const SimilarityMeasure sim(dataset.schema());

  RunResult result;
  if (algorithm == Algorithm::kOurs) {
    std::unique_ptr<ItemSource> source = dataset.Open();
    ExcludingSource candidates(*source, query.stream_id);
    result = RunStream(candidates, sim, query.item, spec, config);
  } else {
    std::vector<Item> items = dataset.LoadAll();
    if (query.stream_id) {
      std::erase_if(items, [&](const Item& it) {
        return it.id == *query.stream_id;
      });
    }
    result = RunAlgorithm(algorithm, items, query.item, sim, spec, config, {},
                          f.seed);
  }

  const std::filesystem::path out_dir(f.out);
  std::filesystem::create_directories(out_dir);
  json doc = ExplanationToJson(result.explanation, query.item, sim,
                               dataset.dictionary());
  doc["algorithm"] = f.algo;
  doc["query"] = ItemToJson(query.item, *dataset.schema(),
                            dataset.dictionary());
  doc["spec"] = SpecToJson(spec);
  doc["swapLambda"] = result.stats.swap_threshold;
  doc["transportCost"] =
      result.explanation.members.empty()
          ? json(nullptr)
          : json(TransportCost(result.explanation, query.item, sim));
  WriteJsonFile(out_dir / "explanation.json", doc);
  WriteStatsCsv(out_dir / "stats.csv", result.stats,
                CountViolations(result.stats, result.explanation, spec));
  std::cout << "wrote " << (out_dir / "explanation.json").string() << " ("
            << result.explanation.members.size() << " members, utility "
            << FormatNumber(result.explanation.utility) << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchFlags {
  std::vector<std::string> suites = {"end2end"};
  std::vector<int> k_grid = {5, 10, 25};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t n = 10000;
  std::vector<std::size_t> scaling_n = {1000000, 2000000, 3000000, 4000000,
                                        5000000};
  int scaling_k = 1000;
  std::vector<std::size_t> windows = {1, 5, 10};
  std::size_t window_n = 2000;
  int window_k = 5;
  int drift_k = 10;
  std::string label_mode = "skewed";
  std::string feature_mode = "normal";
  UtilityFlags utility;
  int jobs = 1;
  std::string out = "bench_out";
};

void WriteRunRows(const std::filesystem::path& path,
                  const std::vector<RunRow>& rows) {
  std::ofstream out = OpenOut(path);
  WriteCsvRow(out, RunRowHeader());
  for (const RunRow& row : rows) WriteCsvRow(out, RunRowFields(row));
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

json SummarizeRows(const std::vector<RunRow>& rows,
                   bool by_variant) {
  std::map<std::string, std::map<std::string, std::vector<double>>> acc;
  for (const RunRow& row : rows) {
    const std::string key =
        (by_variant ? row.variant : row.algorithm) + "@k=" +
        std::to_string(row.k);
    acc[key]["utility"].push_back(row.utility);
    if (!std::isnan(row.cost)) acc[key]["cost"].push_back(row.cost);
    acc[key]["violations"].push_back(
        static_cast<double>(row.stream_violations) + row.final_violations);
    acc[key]["nanos"].push_back(static_cast<double>(row.nanos));
  }
  json out = json::object();
  for (const auto& [key, metrics] : acc) {
    json entry = json::object();
    for (const auto& [metric, values] : metrics) {
      entry[metric] = Mean(values);
    }
    entry["runs"] = metrics.at("utility").size();
    out[key] = std::move(entry);
  }
  return out;
}

int BenchCommand(const BenchFlags& f) {
  SuiteOptions options;
  options.k_grid = f.k_grid;
  options.seeds = f.seeds;
  options.n = f.n;
  options.scaling_n = f.scaling_n;
  options.scaling_k = f.scaling_k;
  options.windows = f.windows;
  options.window_n = f.window_n;
  options.window_k = f.window_k;
  options.drift_k = f.drift_k;
  options.label_mode = ParseDriftMode(f.label_mode);
  options.feature_mode = ParseDriftMode(f.feature_mode);
  options.config = ResolveUtility(f.utility, 0);
  options.jobs = f.jobs;

  std::vector<std::string> suites = f.suites;
  if (std::find(suites.begin(), suites.end(), "all") != suites.end()) {
    suites = {"end2end", "ablation", "windows", "drift", "scaling"};
  }
  const std::filesystem::path out_dir(f.out);
  std::filesystem::create_directories(out_dir);
  json summary = json::object();
  std::vector<RunRow> runtime_rows;
  for (const std::string& suite : suites) {
    std::cerr << "suite " << suite << "...\n";
    if (suite == "end2end") {
      const std::vector<RunRow> rows = RunEndToEnd(options);
      WriteRunRows(out_dir / "fig2_cost.csv", rows);
      WriteRunRows(out_dir / "fig3_violations.csv", rows);
      runtime_rows.insert(runtime_rows.end(), rows.begin(), rows.end());
      summary["end2end"] = SummarizeRows(rows, false);
    } else if (suite == "ablation") {
      const std::vector<RunRow> rows = RunAblation(options);
      WriteRunRows(out_dir / "table2_ablation.csv", rows);
      json s = SummarizeRows(rows, true);
      // Relative changes against the full algorithm at the same k.
      for (auto& [key, entry] : s.items()) {
        const std::string k_part = key.substr(key.find("@k="));
        const json& full = s["full" + k_part];
        for (const char* metric : {"utility", "nanos"}) {
          const double base = full[metric].get<double>();
          entry[std::string(metric) + "Delta"] =
              base != 0.0 ? (entry[metric].get<double>() - base) /
                                std::abs(base)
                          : 0.0;
        }
      }
      summary["ablation"] = std::move(s);
    } else if (suite == "windows") {
      const std::vector<WindowRow> rows = RunWindows(options);
      std::ofstream out = OpenOut(out_dir / "fig5_windows.csv");
      const std::vector<std::string> header = {"window", "seed", "fraction",
                                               "utility"};
      WriteCsvRow(out, header);
      std::map<std::size_t, std::map<double, std::vector<double>>> acc;
      for (const WindowRow& r : rows) {
        const std::vector<std::string> fields = {
            std::to_string(r.window), std::to_string(r.seed),
            FormatNumber(r.fraction), FormatNumber(r.utility)};
        WriteCsvRow(out, fields);
        acc[r.window][r.fraction].push_back(r.utility);
      }
      json s = json::object();
      for (const auto& [window, series] : acc) {
        json points = json::array();
        for (const auto& [fraction, values] : series) {
          points.push_back({fraction, Mean(values)});
        }
        s[std::to_string(window)] = std::move(points);
      }
      summary["windows"] = std::move(s);
    } else if (suite == "drift") {
      const DriftTable table = RunDrift(options);
      std::ofstream out = OpenOut(out_dir / "table3_drift.csv");
      const std::vector<std::string> header = {
          "feature_mode", "label_mode", "algorithm", "mean_utility", "delta"};
      WriteCsvRow(out, header);
      json s = {{"baseline", table.baseline}, {"cells", json::array()}};
      for (const DriftCell& c : table.cells) {
        const std::vector<std::string> fields = {
            std::string(DriftModeName(c.feature_mode)),
            std::string(DriftModeName(c.label_mode)), c.algorithm,
            FormatNumber(c.mean_utility), FormatNumber(c.delta)};
        WriteCsvRow(out, fields);
        s["cells"].push_back({{"feature", DriftModeName(c.feature_mode)},
                              {"label", DriftModeName(c.label_mode)},
                              {"algorithm", c.algorithm},
                              {"meanUtility", c.mean_utility},
                              {"delta", c.delta}});
      }
      WriteRunRows(out_dir / "table3_drift_runs.csv", table.rows);
      summary["drift"] = std::move(s);
    } else if (suite == "scaling") {
      const std::vector<RunRow> rows = RunScaling(options);
      runtime_rows.insert(runtime_rows.end(), rows.begin(), rows.end());
      json s = json::object();
      std::map<std::size_t, std::vector<double>> per_item;
      for (const RunRow& r : rows) {
        per_item[r.n].push_back(static_cast<double>(r.nanos) /
                                static_cast<double>(r.n));
      }
      for (const auto& [n, values] : per_item) {
        s[std::to_string(n)] = {{"meanNanosPerItem", Mean(values)}};
      }
      summary["scaling"] = std::move(s);
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown suite '" + suite + "'");
    }
  }
  if (!runtime_rows.empty()) {
    WriteRunRows(out_dir / "fig4_runtime.csv", runtime_rows);
  }
  WriteJsonFile(out_dir / "summary.json", summary);
  std::cout << "wrote results to " << out_dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleFlags {
  SourceFlags source;
  ConstraintFlags constraints;
  UtilityFlags utility;
  std::uint64_t seed = 1;
};

int OracleCommand(const OracleFlags& f) {
  Dataset dataset(f.source, f.seed);
  const ResolvedQuery query = ResolveQuery(f.source.query, dataset);
  std::vector<Item> items = dataset.LoadAll();
  if (query.stream_id) {
    std::erase_if(items,
                  [&](const Item& it) { return it.id == *query.stream_id; });
  }
  const ConstraintSpec spec = ResolveConstraints(f.constraints, dataset);
  UtilityConfig config = ResolveUtility(f.utility, f.seed);
  const SimilarityMeasure sim(dataset.schema());
  const OracleResult opt = BruteForceOracle(items, query.item, sim, spec,
                                            config);
  json doc = {{"ids", opt.ids},
              {"value", opt.value},
              {"feasibleSets", opt.feasible_sets},
              {"explanation", ExplanationToJson(opt.explanation, query.item,
                                                sim, dataset.dictionary())}};
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthFlags {
  SynthConfig config;
  std::size_t drift_point = 0;
  std::string feature_mode = "normal";
  std::string label_mode = "normal";
  std::string out;
  std::string schema_out;
  std::string query_out;
};

int SynthCommand(SynthFlags f) {
  f.config.feature_mode = ParseDriftMode(f.feature_mode);
  f.config.label_mode = ParseDriftMode(f.label_mode);
  if (f.drift_point > 0) f.config.drift_point = f.drift_point;
  ValidateSynthConfig(f.config);
  const std::shared_ptr<const Schema> schema = SynthSchema(f.config);
  const CategoryDictionary dict = SynthDictionary(f.config);
  const std::vector<Item> items = GenerateSynth(f.config);
  if (f.out.empty() || f.out == "-") {
    WriteItemsCsv(std::cout, *schema, items, dict);
  } else {
    std::ofstream out = OpenOut(f.out);
    WriteItemsCsv(out, *schema, items, dict);
  }
  if (!f.schema_out.empty()) SaveSchemaFile(*schema, f.schema_out);
  if (!f.query_out.empty()) {
    std::ofstream out = OpenOut(f.query_out);
    const Item query = SynthQuery(f.config);
    WriteItemsCsv(out, *schema, std::span<const Item>(&query, 1), dict);
  }
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Streaming counterfactual explanations under label bounds"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 2 usage, 3 infeasible, 4 data error.\n"
      "run writes explanation.json and stats.csv (one row: items, accepted,\n"
      "swaps, rejects, utility_calls, total_nanos, stream_upper,\n"
      "final_violations, swap_threshold, curvature). bench writes\n"
      "fig2_cost.csv, fig3_violations.csv, fig4_runtime.csv (one row per run:\n"
      "suite, algorithm, variant, dataset, n, k, seed, utility, cost,\n"
      "stream_violations, final_violations, violations, nanos, utility_calls,\n"
      "swap_threshold), table2_ablation.csv (same columns), fig5_windows.csv\n"
      "(window, seed, fraction, utility), table3_drift.csv (feature_mode,\n"
      "label_mode, algorithm, mean_utility, delta) and summary.json.");

  RunFlags run;
  CLI::App* run_cmd = app.add_subcommand("run", "Select an explanation");
  AddSourceFlags(run_cmd, run.source, true);
  AddConstraintFlags(run_cmd, run.constraints, true);
  AddUtilityFlags(run_cmd, run.utility, true);
  run_cmd->add_option("--algo", run.algo, "ours|relaxed|random|sieve|offline|knn")
      ->check(CLI::IsMember({"ours", "relaxed", "random", "sieve", "offline",
                             "knn"}))
      ->capture_default_str();
  run_cmd->add_option("--seed", run.seed)->capture_default_str();
  run_cmd->add_option("--out", run.out, "Output directory")
      ->capture_default_str();

  BenchFlags bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Run experiment suites");
  bench_cmd
      ->add_option("--suite", bench.suites,
                   "end2end|ablation|windows|drift|scaling|all (comma list)")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--k-grid", bench.k_grid)->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--seeds", bench.seeds)->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--n", bench.n, "Stream length")->capture_default_str();
  bench_cmd->add_option("--scaling-n", bench.scaling_n)->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--scaling-k", bench.scaling_k)->capture_default_str();
  bench_cmd->add_option("--windows", bench.windows)->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--window-n", bench.window_n)->capture_default_str();
  bench_cmd->add_option("--window-k", bench.window_k)->capture_default_str();
  bench_cmd->add_option("--drift-k", bench.drift_k)->capture_default_str();
  bench_cmd->add_option("--label-mode", bench.label_mode)
      ->check(CLI::IsMember({"normal", "skewed"}))
      ->capture_default_str();
  bench_cmd->add_option("--feature-mode", bench.feature_mode)
      ->check(CLI::IsMember({"normal", "skewed"}))
      ->capture_default_str();
  AddUtilityFlags(bench_cmd, bench.utility, true);
  bench_cmd->add_option("--jobs", bench.jobs)->capture_default_str();
  bench_cmd->add_option("--out", bench.out)->capture_default_str();

  OracleFlags oracle;
  CLI::App* oracle_cmd = app.add_subcommand(
      "oracle", "Exhaustive optimum (at most 15 items, k <= 5)");
  AddSourceFlags(oracle_cmd, oracle.source, false);
  AddConstraintFlags(oracle_cmd, oracle.constraints, false);
  AddUtilityFlags(oracle_cmd, oracle.utility, false);
  oracle_cmd->add_option("--seed", oracle.seed)->capture_default_str();

  SynthFlags synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Write a synthetic stream as CSV");
  synth_cmd->add_option("--n", synth.config.n)->capture_default_str();
  synth_cmd->add_option("--labels", synth.config.labels)->capture_default_str();
  synth_cmd->add_option("--continuous", synth.config.continuous)
      ->capture_default_str();
  synth_cmd->add_option("--categorical", synth.config.categorical)
      ->capture_default_str();
  synth_cmd->add_option("--levels", synth.config.levels)->capture_default_str();
  synth_cmd->add_option("--feature-mode", synth.feature_mode)
      ->check(CLI::IsMember({"normal", "skewed"}))
      ->capture_default_str();
  synth_cmd->add_option("--label-mode", synth.label_mode)
      ->check(CLI::IsMember({"normal", "skewed"}))
      ->capture_default_str();
  synth_cmd->add_option("--drift-point", synth.drift_point,
                        "Default n/2");
  synth_cmd->add_option("--seed", synth.config.seed)->capture_default_str();
  synth_cmd->add_option("--sigma", synth.config.sigma)->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "CSV path, '-' for stdout");
  synth_cmd->add_option("--schema-out", synth.schema_out, "Schema JSON path");
  synth_cmd->add_option("--query-out", synth.query_out,
                        "Write the generator's query as a one-row CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return RunCommand(run);
    if (bench_cmd->parsed()) return BenchCommand(bench);
    if (oracle_cmd->parsed()) return OracleCommand(oracle);
    if (synth_cmd->parsed()) return SynthCommand(synth);
  } catch (const Error& e) {
    std::cerr << ErrorToJson(e).dump() << "\n";
    if (run_cmd->parsed()) {
      std::error_code ec;
      std::filesystem::create_directories(run.out, ec);
      if (!ec) {
        std::ofstream(std::filesystem::path(run.out) / "error.json")
            << ErrorToJson(e).dump(2) << "\n";
      }
    }
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << json{{"code", "Internal"}, {"message", e.what()}}.dump()
              << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace cfstream

int main(int argc, char** argv) { return cfstream::Main(argc, argv); }
