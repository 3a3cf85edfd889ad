#include "tabrecon/bench.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "tabrecon/error.hpp"

namespace tabrecon {

using nlohmann::json;
namespace fs = std::filesystem;

std::optional<DatasetFormat> parse_dataset_format(std::string_view text) {
  if (text == "html") return DatasetFormat::html;
  if (text == "csv") return DatasetFormat::csv;
  if (text == "paired-text") return DatasetFormat::paired_text;
  return std::nullopt;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::unreadable_file, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::unreadable_file, path.string());
  return buf.str();
}

Table load_gold(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    const std::string ext = path.extension().string();
    return normalize_rectangular(ext == ".csv" ? parse_csv_table(text) : parse_html_table(text));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

bool is_gold_file(const fs::path& path, DatasetFormat format) {
  const std::string ext = path.extension().string();
  if (format == DatasetFormat::csv) return ext == ".csv";
  return ext == ".html" || ext == ".htm";
}

}  // namespace

std::vector<Task> ingest_dataset(const fs::path& dir, DatasetFormat format) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(Errc::unreadable_file, dir.string() + " is not a directory");
  std::vector<fs::path> entries;
  for (const auto& entry : fs::directory_iterator(dir, ec)) entries.push_back(entry.path());
  if (ec) throw Error(Errc::unreadable_file, dir.string() + ": " + ec.message());

  std::vector<Task> tasks;
  for (const fs::path& path : entries) {
    if (format == DatasetFormat::paired_text) {
      if (!fs::is_directory(path, ec) || !fs::exists(path / "input.txt", ec)) continue;
      fs::path gold = path / "gold.html";
      if (!fs::exists(gold, ec)) gold = path / "gold.csv";
      if (!fs::exists(gold, ec)) throw Error(Errc::unreadable_file, (path / "gold.html").string() + " is missing");
      tasks.push_back(Task{path.filename().string(), SourceText(read_file(path / "input.txt")), load_gold(gold),
                           fs::relative(path, dir)});
    } else {
      if (!fs::is_regular_file(path, ec) || !is_gold_file(path, format)) continue;
      Table gold = load_gold(path);
      SourceText source = flatten_table(gold, FlattenStyle::ocr);
      tasks.push_back(Task{path.stem().string(), std::move(source), std::move(gold), fs::relative(path, dir)});
    }
  }
  if (tasks.empty()) throw Error(Errc::no_tasks_found, "no tasks under " + dir.string());
  std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < tasks.size(); ++i) {
    if (tasks[i].id == tasks[i - 1].id) throw Error(Errc::invalid_config, "duplicate task id " + tasks[i].id);
  }
  return tasks;
}

namespace {

TaskOutcome run_task(const Task& task, const PipelineConfig& cfg, ChatBackend& generator, ChatBackend& critic) {
  TaskOutcome out;
  out.task_id = task.id;
  out.provenance = task.provenance.generic_string();
  try {
    PipelineResult result = explicitize(task.source, cfg, generator, critic);
    out.metrics = evaluate(result.final, task.gold, task.source);
    out.iterations_used = result.iterations_used;
    out.converged = result.converged;
    out.result = std::move(result);
  } catch (const std::exception& e) {
    out.error = e.what();
    out.metrics = evaluate(Table{}, task.gold, task.source);
  }
  return out;
}

}  // namespace

BenchAggregates aggregate(const std::vector<TaskOutcome>& outcomes) {
  BenchAggregates agg;
  agg.tasks = outcomes.size();
  if (outcomes.empty()) return agg;
  std::size_t em_hits = 0;
  std::size_t iterations = 0;
  for (const TaskOutcome& o : outcomes) {
    em_hits += o.metrics.em == 1 ? 1 : 0;
    agg.errored += o.error ? 1 : 0;
    agg.converged += o.converged ? 1 : 0;
    agg.ted += o.metrics.ted;
    agg.cvm += o.metrics.cvm;
    agg.colvm += o.metrics.colvm;
    agg.coverage += o.metrics.coverage;
    agg.hallucination += o.metrics.hallucination;
    iterations += o.iterations_used;
  }
  const auto n = static_cast<double>(outcomes.size());
  agg.em = 100.0 * static_cast<double>(em_hits) / n;
  agg.ted /= n;
  agg.cvm /= n;
  agg.colvm /= n;
  agg.coverage /= n;
  agg.hallucination /= n;
  agg.mean_iterations = static_cast<double>(iterations) / n;
  return agg;
}

BenchReport run_bench(const std::vector<Task>& tasks, const PipelineConfig& cfg,
                      std::shared_ptr<ChatBackend> generator, std::shared_ptr<ChatBackend> critic,
                      std::size_t parallelism) {
  validate(cfg);
  if (parallelism < 1) throw Error(Errc::invalid_config, "parallelism must be >= 1");
  CountingBackend gen(std::move(generator));
  CountingBackend crit(std::move(critic));

  BenchReport report;
  report.per_task.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> workers;
    const std::size_t count = std::min(parallelism, std::max<std::size_t>(tasks.size(), 1));
    for (std::size_t w = 0; w < count; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
          report.per_task[i] = run_task(tasks[i], cfg, gen, crit);
        }
      });
    }
  }
  report.aggregates = aggregate(report.per_task);
  report.generator_calls = gen.calls();
  report.critic_calls = crit.calls();
  return report;
}

json to_json(const BenchReport& report) {
  json per_task = json::array();
  for (const TaskOutcome& o : report.per_task) {
    per_task.push_back(json{{"task_id", o.task_id},
                            {"provenance", o.provenance},
                            {"converged", o.converged},
                            {"iterations_used", o.iterations_used},
                            {"metrics", to_json(o.metrics)},
                            {"error", o.error ? json(*o.error) : json(nullptr)}});
  }
  const BenchAggregates& a = report.aggregates;
  return json{{"schema_version", kBenchSchemaVersion},
              {"per_task", std::move(per_task)},
              {"aggregates",
               {{"tasks", a.tasks},
                {"errored", a.errored},
                {"converged", a.converged},
                {"em", a.em},
                {"ted", a.ted},
                {"cvm", a.cvm},
                {"colvm", a.colvm},
                {"coverage", a.coverage},
                {"hallucination", a.hallucination},
                {"mean_iterations", a.mean_iterations}}},
              {"runtime", {{"generator_calls", report.generator_calls}, {"critic_calls", report.critic_calls}}}};
}

std::string to_tsv(const BenchReport& report) {
  std::string out = "task_id\tem\tted\tcvm\tcolvm\tcoverage\thallucination\n";
  for (const TaskOutcome& o : report.per_task) {
    out += to_tsv_row(o.task_id, o.metrics);
    out += '\n';
  }
  return out;
}

}  // namespace tabrecon
