#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tabrecon/bench.hpp"
#include "tabrecon/config.hpp"
#include "tabrecon/error.hpp"
#include "tabrecon/metrics.hpp"
#include "tabrecon/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tabrecon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTaskFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::unreadable_file, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(Errc::store_write_failure, "cannot write " + path.string());
}

Table load_table(const fs::path& path, std::size_t csv_header_rows) {
  const std::string text = read_file(path);
  return path.extension() == ".csv" ? parse_csv_table(text, csv_header_rows) : parse_html_table(text);
}

struct RunOptions {
  std::string config_path;
  std::string cache_dir;
  bool replay = false;
  bool record = false;
  std::string endpoint;
  std::string model;
  std::size_t max_iterations = 0;
  bool last_iteration = false;
  std::string prompt;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config_path, "Pipeline config JSON")->check(CLI::ExistingFile);
  cmd->add_option("--cache-dir", o.cache_dir, "Transcript store directory (default: $TEN_CACHE_DIR)");
  auto* replay = cmd->add_flag("--replay", o.replay, "Serve responses from the transcript store only");
  auto* record = cmd->add_flag("--record", o.record, "Call the live backend and record into the store");
  replay->excludes(record);
  cmd->add_option("--endpoint", o.endpoint, "Chat completions URL");
  cmd->add_option("--model", o.model, "Model id");
  cmd->add_option("--max-iterations", o.max_iterations, "Iteration budget N")->check(CLI::PositiveNumber);
  cmd->add_flag("--last-iteration", o.last_iteration, "Return the last candidate instead of the best one");
  cmd->add_option("--prompt", o.prompt, "Generation prompt: sd, base or cot")
      ->check(CLI::IsMember({"sd", "base", "cot"}));
}

PipelineConfig build_config(const RunOptions& o) {
  PipelineConfig cfg = o.config_path.empty() ? PipelineConfig{} : load_pipeline_config(o.config_path);
  apply_env_overrides(cfg, [](const char* name) { return std::getenv(name); });
  if (!o.endpoint.empty()) cfg.generator_backend.endpoint = cfg.critic_backend.endpoint = o.endpoint;
  if (!o.model.empty()) cfg.generator_backend.model_id = cfg.critic_backend.model_id = o.model;
  if (o.max_iterations > 0) cfg.max_iterations = o.max_iterations;
  if (o.last_iteration) cfg.last_iteration = true;
  if (!o.prompt.empty()) cfg.generation_prompt = *parse_prompt_kind(o.prompt);
  if (!o.replay && !cfg.task_timeout) cfg.task_timeout = std::chrono::seconds(120);
  if (o.replay) cfg.task_timeout.reset();
  validate(cfg);
  return cfg;
}

struct Backends {
  std::shared_ptr<ChatBackend> generator;
  std::shared_ptr<ChatBackend> critic;
};

Backends build_backends(const RunOptions& o, const PipelineConfig& cfg) {
  std::string cache_dir = o.cache_dir;
  if (cache_dir.empty()) {
    if (const char* env = std::getenv("TEN_CACHE_DIR")) cache_dir = env;
  }
  if ((o.replay || o.record) && cache_dir.empty()) throw UsageError("--replay/--record need --cache-dir or TEN_CACHE_DIR");
  if (o.replay) {
    auto store = std::make_shared<const TranscriptStore>(cache_dir);
    return {std::make_shared<ReplayBackend>(store, cfg.generator_backend),
            std::make_shared<ReplayBackend>(store, cfg.critic_backend)};
  }
  auto gen_live = std::make_shared<HttpBackend>(cfg.generator_backend);
  auto crit_live = std::make_shared<HttpBackend>(cfg.critic_backend);
  if (o.record) {
    auto store = std::make_shared<TranscriptStore>(cache_dir);
    return {std::make_shared<RecordingBackend>(gen_live, store, cfg.generator_backend),
            std::make_shared<RecordingBackend>(crit_live, store, cfg.critic_backend)};
  }
  return {gen_live, crit_live};
}

// ---------------------------------------------------------------------------

struct ExtractOptions {
  RunOptions run;
  std::string input;
  std::string out = "html";
  std::string trace;
};

int run_extract(const ExtractOptions& o) {
  const PipelineConfig cfg = build_config(o.run);
  const Backends backends = build_backends(o.run, cfg);
  const SourceText source(read_file(o.input));
  const PipelineResult result = explicitize(source, cfg, *backends.generator, *backends.critic);
  const std::string task_id = fs::path(o.input).stem().string();
  if (!o.trace.empty()) write_file(o.trace, to_json(result, task_id).dump(2) + "\n");
  if (o.out == "csv") {
    std::cout << serialize_csv(result.final) << "\r\n";
  } else if (o.out == "json") {
    std::cout << to_json(result, task_id).dump(2) << '\n';
  } else {
    std::cout << serialize_html(result.final) << '\n';
  }
  return kExitOk;
}

struct CheckOptions {
  std::string table;
  std::string source;
  std::string config_path;
  std::size_t csv_header_rows = 1;
};

int run_check(const CheckOptions& o) {
  CheckerOptions checker;
  if (!o.config_path.empty()) checker = load_pipeline_config(o.config_path).checker;
  const Table t = normalize_rectangular(load_table(o.table, o.csv_header_rows));
  const SourceText source(read_file(o.source));
  std::cout << to_json(run_sanity_check(source, t, checker)).dump(2) << '\n';
  return kExitOk;
}

struct EvalOptions {
  std::string pred;
  std::string gold;
  std::string source;
  bool json = false;
  std::size_t csv_header_rows = 1;
};

int run_eval(const EvalOptions& o) {
  const Table pred = load_table(o.pred, o.csv_header_rows);
  const Table gold = load_table(o.gold, o.csv_header_rows);
  const SourceText source =
      o.source.empty() ? flatten_table(normalize_rectangular(gold), FlattenStyle::ocr) : SourceText(read_file(o.source));
  const MetricReport m = evaluate(pred, gold, source);
  if (o.json) {
    std::cout << to_json(m).dump(2) << '\n';
  } else {
    char buf[200];
    std::snprintf(buf, sizeof buf, "em=%d ted=%.6f cvm=%.2f colvm=%.2f coverage=%.6f hallucination=%.6f", m.em, m.ted,
                  m.cvm, m.colvm, m.coverage, m.hallucination);
    std::cout << buf << '\n';
  }
  return kExitOk;
}

struct BenchOptions {
  RunOptions run;
  std::string dir;
  std::string format = "html";
  std::size_t parallel = 1;
  std::string report;
  std::string tsv;
  std::string trace_dir;
};

int run_bench_cmd(const BenchOptions& o) {
  const PipelineConfig cfg = build_config(o.run);
  const Backends backends = build_backends(o.run, cfg);
  const std::vector<Task> tasks = ingest_dataset(o.dir, *parse_dataset_format(o.format));

  const auto start = std::chrono::steady_clock::now();
  const BenchReport report = run_bench(tasks, cfg, backends.generator, backends.critic, o.parallel);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  const std::string json_text = to_json(report).dump(2) + "\n";
  if (o.report.empty()) {
    std::cout << json_text;
  } else {
    write_file(o.report, json_text);
  }
  if (!o.tsv.empty()) write_file(o.tsv, to_tsv(report));
  if (!o.trace_dir.empty()) {
    for (const TaskOutcome& t : report.per_task) {
      if (!t.result) continue;
      const fs::path base = fs::path(o.trace_dir) / t.task_id;
      write_file(base.string() + ".json", to_json(*t.result, t.task_id).dump(2) + "\n");
      write_file(base.string() + ".html", serialize_html(t.result->final) + "\n");
      write_file(base.string() + ".csv", serialize_csv(t.result->final) + "\r\n");
    }
  }
  const BenchAggregates& a = report.aggregates;
  std::cerr << "bench: " << a.tasks << " tasks, " << a.errored << " errored, " << a.converged << " converged in "
            << elapsed.count() << " s\n";
  for (const TaskOutcome& t : report.per_task) {
    if (t.error) std::cerr << "  " << t.task_id << ": " << *t.error << '\n';
  }
  return a.errored > 0 ? kExitTaskFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstruct tables from flattened text and score them against gold tables."};
  app.require_subcommand(1);

  ExtractOptions extract;
  auto* extract_cmd = app.add_subcommand("extract", "Run the generate/check/critique loop on one text file");
  extract_cmd->add_option("input", extract.input, "Flattened text")->required()->check(CLI::ExistingFile);
  extract_cmd->add_option("--out", extract.out, "Output format")->check(CLI::IsMember({"html", "csv", "json"}));
  extract_cmd->add_option("--trace", extract.trace, "Write the iteration trace JSON here");
  add_run_options(extract_cmd, extract.run);

  CheckOptions check;
  auto* check_cmd = app.add_subcommand("check", "Run the rule checks on a table");
  check_cmd->add_option("table", check.table, "Table (.html or .csv)")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--source", check.source, "Source text")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--config", check.config_path, "Pipeline config JSON")->check(CLI::ExistingFile);
  check_cmd->add_option("--csv-header-rows", check.csv_header_rows, "Header rows in CSV input");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a predicted table against a gold table");
  eval_cmd->add_option("pred", eval.pred, "Predicted table")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("gold", eval.gold, "Gold table")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--source", eval.source, "Source text (default: gold flattened)")->check(CLI::ExistingFile);
  eval_cmd->add_flag("--json", eval.json, "Print JSON");
  eval_cmd->add_option("--csv-header-rows", eval.csv_header_rows, "Header rows in CSV input");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run the pipeline over a dataset directory");
  bench_cmd->add_option("dir", bench.dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  bench_cmd->add_option("--format", bench.format, "Dataset layout")
      ->check(CLI::IsMember({"html", "csv", "paired-text"}));
  bench_cmd->add_option("--parallel", bench.parallel, "Concurrent tasks")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--report", bench.report, "Report JSON path (default: stdout)");
  bench_cmd->add_option("--tsv", bench.tsv, "Per-task TSV path");
  bench_cmd->add_option("--trace-dir", bench.trace_dir, "Per-task trace JSON and final tables");
  add_run_options(bench_cmd, bench.run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*extract_cmd) return run_extract(extract);
    if (*check_cmd) return run_check(check);
    if (*eval_cmd) return run_eval(eval);
    if (*bench_cmd) return run_bench_cmd(bench);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::invalid_config ? kExitUsage : kExitTaskFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTaskFailure;
  }
  return kExitUsage;
}
