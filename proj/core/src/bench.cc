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

#include "cfstream/bench.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "cfstream/baselines.h"
#include "cfstream/error.h"
#include "cfstream/eval.h"
#include "cfstream/ingest.h"

namespace cfstream {
namespace {

struct AlgorithmEntry {
  Algorithm algorithm;
  std::string_view name;
};

constexpr AlgorithmEntry kAlgorithms[] = {
    {Algorithm::kOurs, "ours"},       {Algorithm::kRelaxed, "relaxed"},
    {Algorithm::kRandom, "random"},   {Algorithm::kSieve, "sieve"},
    {Algorithm::kOffline, "offline"}, {Algorithm::kKnn, "knn"},
};

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  return FormatNumber(v);
}

SynthConfig SuiteSynth(const SuiteOptions& options, std::size_t n,
                       std::uint64_t seed) {
  SynthConfig synth;
  synth.n = n;
  synth.seed = seed;
  synth.feature_mode = options.feature_mode;
  synth.label_mode = options.label_mode;
  return synth;
}

UtilityConfig Seeded(UtilityConfig config, std::uint64_t seed) {
  config.seed = seed;
  return config;
}

}  // namespace

std::string_view AlgorithmName(Algorithm algorithm) {
  for (const AlgorithmEntry& e : kAlgorithms) {
    if (e.algorithm == algorithm) return e.name;
  }
  return "?";
}

Algorithm ParseAlgorithm(std::string_view name) {
  for (const AlgorithmEntry& e : kAlgorithms) {
    if (e.name == name) return e.algorithm;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown algorithm '" + std::string(name) + "'");
}

const std::vector<Algorithm>& AllAlgorithms() {
  static const std::vector<Algorithm> all = {
      Algorithm::kOurs,  Algorithm::kRelaxed, Algorithm::kRandom,
      Algorithm::kSieve, Algorithm::kOffline, Algorithm::kKnn};
  return all;
}

Instance MakeSyntheticInstance(const SynthConfig& synth, int k,
                               double lower_slack, double upper_slack) {
  Instance instance{synth, SimilarityMeasure(SynthSchema(synth)),
                    GenerateSynth(synth), SynthQuery(synth), {}};
  std::vector<double> histogram(static_cast<std::size_t>(synth.labels), 0.0);
  for (const Item& item : instance.items) histogram[LabelIndex(item.label)]++;
  instance.spec = InferBounds(histogram, k, lower_slack, upper_slack);
  return instance;
}

RunResult RunAlgorithm(Algorithm algorithm, std::span<const Item> items,
                       const Item& query, const SimilarityMeasure& sim,
                       const ConstraintSpec& spec, const UtilityConfig& config,
                       const SessionOptions& options, std::uint64_t seed) {
  switch (algorithm) {
    case Algorithm::kOurs:
      return RunStream(items, sim, query, spec, config, options);
    case Algorithm::kRelaxed:
      return RelaxedStreaming(items, query, sim, spec, config, options);
    case Algorithm::kRandom:
      return RandomSwap(items, query, sim, spec, config, seed);
    case Algorithm::kSieve:
      return SieveNoConstraint(items, query, sim, spec, config);
    case Algorithm::kOffline:
      return OfflineGreedy(items, query, sim, spec, config);
    case Algorithm::kKnn:
      return KnnRotation(items, query, sim, spec, config);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown algorithm");
}

RunResult RunAlgorithm(Algorithm algorithm, const Instance& instance,
                       const UtilityConfig& config,
                       const SessionOptions& options, std::uint64_t seed) {
  return RunAlgorithm(algorithm, instance.items, instance.query, instance.sim,
                      instance.spec, config, options, seed);
}

std::vector<std::string> RunRowHeader() {
  return {"suite",    "algorithm",        "variant",          "dataset",
          "n",        "k",                "seed",             "utility",
          "cost",     "stream_violations", "final_violations", "violations",
          "nanos",    "utility_calls",    "swap_threshold"};
}

std::vector<std::string> RunRowFields(const RunRow& row) {
  return {row.suite,
          row.algorithm,
          row.variant,
          row.dataset,
          std::to_string(row.n),
          std::to_string(row.k),
          std::to_string(row.seed),
          Num(row.utility),
          Num(row.cost),
          std::to_string(row.stream_violations),
          std::to_string(row.final_violations),
          std::to_string(row.stream_violations +
                         static_cast<std::uint64_t>(row.final_violations)),
          std::to_string(row.nanos),
          std::to_string(row.utility_calls),
          Num(row.swap_threshold)};
}

RunRow MakeRunRow(std::string suite, Algorithm algorithm, std::string variant,
                  const Instance& instance, std::uint64_t seed,
                  const RunResult& result) {
  RunRow row;
  row.suite = std::move(suite);
  row.algorithm = std::string(AlgorithmName(algorithm));
  row.variant = std::move(variant);
  row.dataset = "synthetic";
  row.n = instance.items.size();
  row.k = instance.spec.k;
  row.seed = seed;
  row.utility = result.explanation.utility;
  row.cost = result.explanation.members.empty()
                 ? std::numeric_limits<double>::quiet_NaN()
                 : TransportCost(result.explanation, instance.query,
                                 instance.sim);
  const ViolationCounts v =
      CountViolations(result.stats, result.explanation, instance.spec);
  row.stream_violations = v.stream_upper;
  row.final_violations = v.final_total;
  row.nanos = result.stats.total_nanos;
  row.utility_calls = result.stats.utility_calls;
  row.swap_threshold = result.stats.swap_threshold;
  return row;
}

void ParallelFor(std::size_t count, int jobs,
                 const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(
      count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<RunRow> RunEndToEnd(const SuiteOptions& options) {
  struct Task {
    int k;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (int k : options.k_grid) {
    for (std::uint64_t seed : options.seeds) tasks.push_back({k, seed});
  }
  const std::vector<Algorithm>& algorithms = AllAlgorithms();
  std::vector<RunRow> rows(tasks.size() * algorithms.size());
  ParallelFor(tasks.size(), options.jobs, [&](std::size_t t) {
    const Task& task = tasks[t];
    const Instance instance = MakeSyntheticInstance(
        SuiteSynth(options, options.n, task.seed), task.k);
    const UtilityConfig config = Seeded(options.config, task.seed);
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      rows[t * algorithms.size() + a] = MakeRunRow(
          "end2end", algorithms[a], "default", instance, task.seed,
          RunAlgorithm(algorithms[a], instance, config, {}, task.seed));
    }
  });
  return rows;
}

std::vector<RunRow> RunAblation(const SuiteOptions& options) {
  struct Variant {
    std::string name;
    SessionOptions session;
    std::optional<double> lambda;
  };
  std::vector<Variant> variants;
  variants.push_back({"full", {}, std::nullopt});
  variants.push_back({"w/o sketch", {}, std::nullopt});
  variants.back().session.use_sketch = false;
  variants.push_back({"w/o lower-bound", {}, std::nullopt});
  variants.back().session.drop_lower_bounds = true;
  variants.push_back({"w/o upper-bound", {}, std::nullopt});
  variants.back().session.drop_upper_bounds = true;
  for (double lambda : {0.5, 1.0, 2.0}) {
    variants.push_back({"lambda=" + Num(lambda), {}, lambda});
  }

  struct Task {
    int k;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (int k : options.k_grid) {
    for (std::uint64_t seed : options.seeds) tasks.push_back({k, seed});
  }
  std::vector<RunRow> rows(tasks.size() * variants.size());
  ParallelFor(tasks.size(), options.jobs, [&](std::size_t t) {
    const Task& task = tasks[t];
    const Instance instance = MakeSyntheticInstance(
        SuiteSynth(options, options.n, task.seed), task.k);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      UtilityConfig config = Seeded(options.config, task.seed);
      if (variants[v].lambda) config.swap_threshold = variants[v].lambda;
      rows[t * variants.size() + v] = MakeRunRow(
          "ablation", Algorithm::kOurs, variants[v].name, instance, task.seed,
          RunStream(instance.items, instance.sim, instance.query,
                    instance.spec, config, variants[v].session));
    }
  });
  return rows;
}

std::vector<WindowRow> RunWindows(const SuiteOptions& options) {
  struct Task {
    std::size_t window;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t w : options.windows) {
    for (std::uint64_t seed : options.seeds) tasks.push_back({w, seed});
  }
  std::vector<std::vector<WindowRow>> per_task(tasks.size());
  ParallelFor(tasks.size(), options.jobs, [&](std::size_t t) {
    const Task& task = tasks[t];
    const Instance instance = MakeSyntheticInstance(
        SuiteSynth(options, options.window_n, task.seed), options.window_k);
    WindowOptions wopt;
    wopt.window = task.window;
    const WindowTrajectory trajectory = SlidingWindowRun(
        instance.items, instance.query, instance.sim, instance.spec,
        Seeded(options.config, task.seed), wopt);
    for (std::size_t i = 0; i < trajectory.fraction.size(); ++i) {
      per_task[t].push_back({task.window, task.seed, trajectory.fraction[i],
                             trajectory.utility[i]});
    }
  });
  std::vector<WindowRow> rows;
  for (auto& part : per_task) {
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

DriftTable RunDrift(const SuiteOptions& options,
                    const std::vector<Algorithm>& algorithms) {
  const DriftMode modes[] = {DriftMode::kNormal, DriftMode::kSkewed};
  struct Task {
    DriftMode feature;
    DriftMode label;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (DriftMode f : modes) {
    for (DriftMode l : modes) {
      for (std::uint64_t seed : options.seeds) tasks.push_back({f, l, seed});
    }
  }
  DriftTable table;
  table.rows.resize(tasks.size() * algorithms.size());
  ParallelFor(tasks.size(), options.jobs, [&](std::size_t t) {
    const Task& task = tasks[t];
    SynthConfig synth;
    synth.n = options.n;
    synth.seed = task.seed;
    synth.feature_mode = task.feature;
    synth.label_mode = task.label;
    const Instance instance = MakeSyntheticInstance(synth, options.drift_k);
    const UtilityConfig config = Seeded(options.config, task.seed);
    const std::string variant = std::string(DriftModeName(task.feature)) +
                                "/" + std::string(DriftModeName(task.label));
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      table.rows[t * algorithms.size() + a] = MakeRunRow(
          "drift", algorithms[a], variant, instance, task.seed,
          RunAlgorithm(algorithms[a], instance, config, {}, task.seed));
    }
  });

  auto mean_of = [&](const std::string& variant, std::string_view algorithm) {
    double sum = 0.0;
    int count = 0;
    for (const RunRow& row : table.rows) {
      if (row.variant == variant && row.algorithm == algorithm) {
        sum += row.utility;
        ++count;
      }
    }
    return count > 0 ? sum / count : 0.0;
  };
  table.baseline = mean_of("normal/normal", AlgorithmName(Algorithm::kOurs));
  const double scale = std::abs(table.baseline);
  for (DriftMode f : modes) {
    for (DriftMode l : modes) {
      const std::string variant = std::string(DriftModeName(f)) + "/" +
                                  std::string(DriftModeName(l));
      for (Algorithm a : algorithms) {
        DriftCell cell{f, l, std::string(AlgorithmName(a)), 0.0, 0.0};
        cell.mean_utility = mean_of(variant, cell.algorithm);
        cell.delta = scale > 0.0 ? (cell.mean_utility - table.baseline) / scale
                                 : 0.0;
        table.cells.push_back(std::move(cell));
      }
    }
  }
  return table;
}

std::vector<RunRow> RunScaling(const SuiteOptions& options) {
  struct Task {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t n : options.scaling_n) {
    for (std::uint64_t seed : options.seeds) tasks.push_back({n, seed});
  }
  std::vector<RunRow> rows(tasks.size());
  ParallelFor(tasks.size(), options.jobs, [&](std::size_t t) {
    const Task& task = tasks[t];
    SynthConfig synth = SuiteSynth(options, task.n, task.seed);
    synth.label_mode = DriftMode::kNormal;
    const SimilarityMeasure sim(SynthSchema(synth));
    const Item query = SynthQuery(synth);
    const ConstraintSpec spec =
        InferBounds(SynthLabelPrior(synth), options.scaling_k);
    UtilityConfig config = Seeded(options.config, task.seed);
    config.mode = UtilityMode::kClustering;
    SynthStream stream(synth);
    const RunResult result = RunStream(stream, sim, query, spec, config);

    RunRow& row = rows[t];
    row.suite = "scaling";
    row.algorithm = std::string(AlgorithmName(Algorithm::kOurs));
    row.variant = "clustering";
    row.dataset = "synthetic";
    row.n = task.n;
    row.k = spec.k;
    row.seed = task.seed;
    row.utility = result.explanation.utility;
    row.cost = result.explanation.members.empty()
                   ? std::numeric_limits<double>::quiet_NaN()
                   : TransportCost(result.explanation, query, sim);
    const ViolationCounts v =
        CountViolations(result.stats, result.explanation, spec);
    row.stream_violations = v.stream_upper;
    row.final_violations = v.final_total;
    row.nanos = result.stats.total_nanos;
    row.utility_calls = result.stats.utility_calls;
    row.swap_threshold = result.stats.swap_threshold;
  });
  return rows;
}

}  // namespace cfstream
