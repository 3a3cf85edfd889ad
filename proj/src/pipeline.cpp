#include "tabrecon/pipeline.hpp"

#include "tabrecon/error.hpp"

namespace tabrecon {

using nlohmann::json;

void validate(const PipelineConfig& cfg) {
  if (cfg.max_iterations < 1) throw Error(Errc::invalid_config, "max_iterations must be >= 1");
  if (cfg.generation_prompt == PromptKind::critique || cfg.generation_prompt == PromptKind::regeneration) {
    throw Error(Errc::invalid_config, "generation prompt must be StructuralDecomposition, Baseline or ChainOfThought");
  }
  if (cfg.task_timeout && cfg.task_timeout->count() <= 0) {
    throw Error(Errc::invalid_config, "task timeout must be positive");
  }
  const double c = cfg.checker.consistency_threshold;
  if (!(c > 0.0 && c <= 1.0)) throw Error(Errc::invalid_config, "consistency_threshold must be in (0, 1]");
  validate(cfg.generator_backend);
  validate(cfg.critic_backend);
}

namespace {

std::optional<Table> try_parse(const std::string& raw) {
  try {
    return normalize_rectangular(concat_partial_tables(parse_extraction_json(raw)));
  } catch (const Error&) {
    return std::nullopt;
  }
}

class Deadline {
 public:
  explicit Deadline(std::optional<std::chrono::milliseconds> budget) {
    if (budget) end_ = std::chrono::steady_clock::now() + *budget;
  }
  void check() const {
    if (end_ && std::chrono::steady_clock::now() >= *end_) throw Error(Errc::task_timeout, "task deadline exceeded");
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> end_;
};

double candidate_score(const ValidationReport& r) { return r.goodness_score - r.badness_score; }

}  // namespace

ParseOutcome parse_candidate(std::string raw, std::size_t retry_budget, ChatBackend& backend,
                             const std::string& prompt) {
  ParseOutcome out;
  for (std::size_t attempt = 0;; ++attempt) {
    out.table = try_parse(raw);
    out.raw = std::move(raw);
    if (out.table || attempt >= retry_budget) break;
    ++out.failures;
    raw = backend.complete(prompt, attempt + 1);
  }
  if (!out.table) ++out.failures;
  return out;
}

std::string render_findings(const ValidationReport& report) {
  std::string out;
  for (const Violation& v : report.violations) {
    out += "- [";
    out += rule_name(v.rule);
    out += "] ";
    out += v.detail;
    out += '\n';
  }
  return out;
}

std::string request_critique(const Table& candidate, const ValidationReport& report, ChatBackend& critic) {
  const std::string prompt =
      render_prompt(PromptKind::critique, {{"table_rows", render_rows(candidate)}, {"findings", render_findings(report)}});
  return critic.complete(prompt);
}

PipelineResult explicitize(const SourceText& source, const PipelineConfig& cfg, ChatBackend& generator,
                           ChatBackend& critic) {
  validate(cfg);
  const Deadline deadline(cfg.task_timeout);
  PipelineResult result;
  // Reserved so the pointers below stay valid.
  result.traces.reserve(cfg.max_iterations);
  const Table* last_candidate = nullptr;
  const std::string* last_critique = nullptr;

  for (std::size_t k = 1; k <= cfg.max_iterations; ++k) {
    IterationTrace trace;
    trace.index = k;
    if (last_candidate != nullptr && last_critique != nullptr) {
      trace.prompt_kind = PromptKind::regeneration;
      trace.prompt = render_prompt(PromptKind::regeneration,
                                   {{"critique", *last_critique}, {"original_table", serialize_html(*last_candidate)}});
    } else {
      trace.prompt_kind = cfg.generation_prompt;
      trace.prompt = render_prompt(cfg.generation_prompt, {{"input_text", source.raw()}});
    }

    deadline.check();
    std::string raw = generator.complete(trace.prompt);
    ParseOutcome parsed = parse_candidate(std::move(raw), cfg.parse_retry_limit, generator, trace.prompt);
    trace.raw_response = std::move(parsed.raw);
    trace.parse_failures = parsed.failures;
    trace.candidate = std::move(parsed.table);

    bool converged = false;
    if (trace.candidate) {
      trace.report = run_sanity_check(source, *trace.candidate, cfg.checker);
      converged = is_converged(*trace.report, cfg.thresholds);
      if (!converged && k < cfg.max_iterations) {
        deadline.check();
        trace.critique = request_critique(*trace.candidate, *trace.report, critic);
      }
    }
    result.traces.push_back(std::move(trace));
    const IterationTrace& stored = result.traces.back();
    if (stored.candidate) {
      last_candidate = &*stored.candidate;
      last_critique = stored.critique ? &*stored.critique : nullptr;
    }
    if (converged) {
      result.converged = true;
      break;
    }
  }
  result.iterations_used = result.traces.size();

  const IterationTrace* chosen = nullptr;
  for (const IterationTrace& t : result.traces) {
    if (!t.candidate) continue;
    if (result.converged || cfg.last_iteration || chosen == nullptr ||
        candidate_score(*t.report) >= candidate_score(*chosen->report)) {
      chosen = &t;
    }
  }
  if (chosen == nullptr) {
    throw Error(Errc::no_candidate_produced,
                "no parseable table after " + std::to_string(result.iterations_used) + " iterations");
  }
  result.final = *chosen->candidate;
  return result;
}

json to_json(const IterationTrace& trace) {
  return json{{"index", trace.index},
              {"prompt_kind", prompt_kind_name(trace.prompt_kind)},
              {"prompt", trace.prompt},
              {"raw_response", trace.raw_response},
              {"candidate_html", trace.candidate ? json(serialize_html(*trace.candidate)) : json(nullptr)},
              {"report", trace.report ? to_json(*trace.report) : json(nullptr)},
              {"critique", trace.critique ? json(*trace.critique) : json(nullptr)},
              {"parse_failures", trace.parse_failures}};
}

json to_json(const PipelineResult& result, const std::string& task_id) {
  json traces = json::array();
  for (const IterationTrace& t : result.traces) traces.push_back(to_json(t));
  return json{{"task_id", task_id},
              {"converged", result.converged},
              {"iterations", result.iterations_used},
              {"final_html", serialize_html(result.final)},
              {"traces", std::move(traces)}};
}

}  // namespace tabrecon
