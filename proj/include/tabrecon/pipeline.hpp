#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabrecon/checker.hpp"
#include "tabrecon/llm.hpp"
#include "tabrecon/table.hpp"

namespace tabrecon {

struct PipelineConfig {
  std::size_t max_iterations = 5;
  ConvergenceThresholds thresholds;
  PromptKind generation_prompt = PromptKind::structural_decomposition;
  BackendConfig generator_backend;
  BackendConfig critic_backend;
  std::size_t parse_retry_limit = 1;
  /// Return the last parsed candidate on exhaustion instead of the best one.
  bool last_iteration = false;
  CheckerOptions checker;
  /// Wall-clock budget per run; checked before every backend call.
  std::optional<std::chrono::milliseconds> task_timeout;
};

/// Throws InvalidConfig.
void validate(const PipelineConfig& cfg);

struct IterationTrace {
  std::size_t index = 0;  // 1-based
  PromptKind prompt_kind = PromptKind::structural_decomposition;
  std::string prompt;
  std::string raw_response;  // last response received in this iteration
  std::optional<Table> candidate;
  std::optional<ValidationReport> report;
  std::optional<std::string> critique;
  std::size_t parse_failures = 0;
};

struct PipelineResult {
  Table final;
  std::vector<IterationTrace> traces;
  bool converged = false;
  std::size_t iterations_used = 0;
};

nlohmann::json to_json(const IterationTrace& trace);
/// {task_id, converged, iterations, final_html, traces: [...]}
nlohmann::json to_json(const PipelineResult& result, const std::string& task_id);

struct ParseOutcome {
  std::optional<Table> table;
  std::size_t failures = 0;
  std::string raw;  // the response that parsed, or the last one tried
};

/// Parses `raw`; on failure re-asks `backend` with the same prompt up to
/// `retry_budget` times.
ParseOutcome parse_candidate(std::string raw, std::size_t retry_budget, ChatBackend& backend,
                             const std::string& prompt);

/// Violations as "- [Rule Name] detail" lines; empty for a clean report.
std::string render_findings(const ValidationReport& report);

std::string request_critique(const Table& candidate, const ValidationReport& report, ChatBackend& critic);

/// Generate, check, critique, regenerate until the candidate passes the
/// thresholds or the iteration budget runs out. Throws NoCandidateProduced
/// when nothing ever parses, TaskTimeout, and backend errors.
PipelineResult explicitize(const SourceText& source, const PipelineConfig& cfg, ChatBackend& generator,
                           ChatBackend& critic);

}  // namespace tabrecon
