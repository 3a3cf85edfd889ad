#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabrecon/metrics.hpp"
#include "tabrecon/pipeline.hpp"

namespace tabrecon {

enum class DatasetFormat { html, csv, paired_text };

/// "html", "csv", "paired-text".
std::optional<DatasetFormat> parse_dataset_format(std::string_view text);

struct Task {
  std::string id;
  SourceText source;
  Table gold;
  std::filesystem::path provenance;  // relative to the dataset dir
};

/// html/csv: every *.html|*.htm or *.csv file in `dir` is a gold table and
/// the source is its OCR-style flattening. paired-text: every subdirectory
/// holding input.txt plus gold.html or gold.csv. Sorted by id.
std::vector<Task> ingest_dataset(const std::filesystem::path& dir, DatasetFormat format);

struct TaskOutcome {
  std::string task_id;
  std::string provenance;
  MetricReport metrics;
  std::size_t iterations_used = 0;
  bool converged = false;
  std::optional<std::string> error;
  std::optional<PipelineResult> result;
};

struct BenchAggregates {
  std::size_t tasks = 0;
  std::size_t errored = 0;
  std::size_t converged = 0;
  double em = 0.0;  // percentage of tasks with em = 1
  double ted = 0.0;
  double cvm = 0.0;
  double colvm = 0.0;
  double coverage = 0.0;
  double hallucination = 0.0;
  double mean_iterations = 0.0;
};

struct BenchReport {
  std::vector<TaskOutcome> per_task;  // in task order
  BenchAggregates aggregates;
  std::size_t generator_calls = 0;
  std::size_t critic_calls = 0;
};

/// Runs every task on a pool of `parallelism` workers. Task failures are
/// recorded in the outcome (scored as an empty prediction) and never stop
/// the batch.
BenchReport run_bench(const std::vector<Task>& tasks, const PipelineConfig& cfg,
                      std::shared_ptr<ChatBackend> generator, std::shared_ptr<ChatBackend> critic,
                      std::size_t parallelism);

BenchAggregates aggregate(const std::vector<TaskOutcome>& outcomes);

inline constexpr int kBenchSchemaVersion = 1;

nlohmann::json to_json(const BenchReport& report);
/// Header line plus one metrics row per task.
std::string to_tsv(const BenchReport& report);

}  // namespace tabrecon
