#include "tabrecon/config.hpp"

#include <fstream>
#include <initializer_list>

#include "tabrecon/error.hpp"

namespace tabrecon {

using nlohmann::json;

namespace {

void reject_unknown(const json& section, std::string_view name, std::initializer_list<std::string_view> known) {
  if (!section.is_object()) throw Error(Errc::invalid_config, "section \"" + std::string(name) + "\" must be an object");
  for (const auto& [key, _] : section.items()) {
    bool ok = false;
    for (std::string_view k : known) ok = ok || key == k;
    if (!ok) throw Error(Errc::invalid_config, "unknown key \"" + key + "\" in section \"" + std::string(name) + "\"");
  }
}

template <typename T>
void read(const json& section, const char* key, T& out) {
  const auto it = section.find(key);
  if (it == section.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::invalid_config, std::string("bad value for \"") + key + "\"");
  }
}

void read_ms(const json& section, const char* key, std::chrono::milliseconds& out) {
  long long ms = out.count();
  read(section, key, ms);
  out = std::chrono::milliseconds(ms);
}

void read_backend(const json& section, std::string_view name, BackendConfig& cfg) {
  reject_unknown(section, name,
                 {"endpoint", "model_id", "temperature", "max_output_tokens", "timeout_ms", "retries", "backoff_ms",
                  "api_key_env", "max_in_flight"});
  read(section, "endpoint", cfg.endpoint);
  read(section, "model_id", cfg.model_id);
  read(section, "temperature", cfg.temperature);
  read(section, "max_output_tokens", cfg.max_output_tokens);
  read_ms(section, "timeout_ms", cfg.timeout);
  read(section, "retries", cfg.retries);
  read_ms(section, "backoff_ms", cfg.backoff);
  read(section, "api_key_env", cfg.api_key_env);
  read(section, "max_in_flight", cfg.max_in_flight);
}

json backend_json(const BackendConfig& b) {
  return json{{"endpoint", b.endpoint},
              {"model_id", b.model_id},
              {"temperature", b.temperature},
              {"max_output_tokens", b.max_output_tokens},
              {"timeout_ms", b.timeout.count()},
              {"retries", b.retries},
              {"backoff_ms", b.backoff.count()},
              {"api_key_env", b.api_key_env},
              {"max_in_flight", b.max_in_flight}};
}

}  // namespace

PipelineConfig pipeline_config_from_json(const json& doc) {
  reject_unknown(doc, "(top level)", {"pipeline", "thresholds", "generator", "critic", "checker"});
  PipelineConfig cfg;

  if (auto it = doc.find("pipeline"); it != doc.end()) {
    const json& p = *it;
    reject_unknown(p, "pipeline",
                   {"max_iterations", "parse_retry_limit", "generation_prompt", "last_iteration", "task_timeout_ms"});
    read(p, "max_iterations", cfg.max_iterations);
    read(p, "parse_retry_limit", cfg.parse_retry_limit);
    read(p, "last_iteration", cfg.last_iteration);
    if (auto prompt = p.find("generation_prompt"); prompt != p.end()) {
      const auto kind = prompt->is_string() ? parse_prompt_kind(prompt->get<std::string>()) : std::nullopt;
      if (!kind) throw Error(Errc::invalid_config, "unknown generation_prompt");
      cfg.generation_prompt = *kind;
    }
    if (auto t = p.find("task_timeout_ms"); t != p.end() && !t->is_null()) {
      std::chrono::milliseconds ms{0};
      read_ms(p, "task_timeout_ms", ms);
      cfg.task_timeout = ms;
    }
  }
  if (auto it = doc.find("thresholds"); it != doc.end()) {
    reject_unknown(*it, "thresholds", {"min_coverage", "max_hallucination", "max_badness", "min_goodness"});
    read(*it, "min_coverage", cfg.thresholds.min_coverage);
    read(*it, "max_hallucination", cfg.thresholds.max_hallucination);
    read(*it, "max_badness", cfg.thresholds.max_badness);
    read(*it, "min_goodness", cfg.thresholds.min_goodness);
  }
  if (auto it = doc.find("generator"); it != doc.end()) read_backend(*it, "generator", cfg.generator_backend);
  cfg.critic_backend = cfg.generator_backend;
  if (auto it = doc.find("critic"); it != doc.end()) read_backend(*it, "critic", cfg.critic_backend);
  if (auto it = doc.find("checker"); it != doc.end()) {
    reject_unknown(*it, "checker", {"consistency_threshold", "entity_patterns"});
    read(*it, "consistency_threshold", cfg.checker.consistency_threshold);
    if (auto pat = it->find("entity_patterns"); pat != it->end()) {
      cfg.checker.patterns = EntityPatterns::from_json(*pat);
    }
  }
  validate(cfg);
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::unreadable_file, path.string());
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::invalid_config, path.string() + " is not valid JSON");
  return pipeline_config_from_json(doc);
}

void apply_env_overrides(PipelineConfig& cfg, const EnvLookup& env) {
  if (const char* v = env("TEN_ENDPOINT"); v != nullptr && *v != '\0') {
    cfg.generator_backend.endpoint = v;
    cfg.critic_backend.endpoint = v;
  }
  if (const char* v = env("TEN_MODEL"); v != nullptr && *v != '\0') {
    cfg.generator_backend.model_id = v;
    cfg.critic_backend.model_id = v;
  }
}

json to_json(const PipelineConfig& cfg) {
  return json{{"pipeline",
               {{"max_iterations", cfg.max_iterations},
                {"parse_retry_limit", cfg.parse_retry_limit},
                {"generation_prompt", prompt_kind_name(cfg.generation_prompt)},
                {"last_iteration", cfg.last_iteration},
                {"task_timeout_ms", cfg.task_timeout ? json(cfg.task_timeout->count()) : json(nullptr)}}},
              {"thresholds",
               {{"min_coverage", cfg.thresholds.min_coverage},
                {"max_hallucination", cfg.thresholds.max_hallucination},
                {"max_badness", cfg.thresholds.max_badness},
                {"min_goodness", cfg.thresholds.min_goodness}}},
              {"generator", backend_json(cfg.generator_backend)},
              {"critic", backend_json(cfg.critic_backend)},
              {"checker", {{"consistency_threshold", cfg.checker.consistency_threshold}}}};
}

}  // namespace tabrecon
