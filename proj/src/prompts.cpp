#include <algorithm>

#include "resources.hpp"
#include "tabrecon/error.hpp"
#include "tabrecon/llm.hpp"

namespace tabrecon {
namespace {

constexpr std::string_view kStepSlot = "step_by_step";
constexpr std::string_view kStepSentence = "4. Let's think step by step.";

std::string_view resource_name(PromptKind kind) {
  switch (kind) {
    case PromptKind::structural_decomposition: return "prompts/structural_decomposition.txt";
    case PromptKind::critique: return "prompts/critique.txt";
    case PromptKind::regeneration: return "prompts/regeneration.txt";
    case PromptKind::baseline:
    case PromptKind::chain_of_thought: return "prompts/baseline.txt";
  }
  return {};
}

struct Placeholder {
  std::size_t begin;
  std::size_t end;
  std::string_view name;
};

std::vector<Placeholder> placeholders(std::string_view text) {
  std::vector<Placeholder> out;
  for (std::size_t pos = text.find("{{"); pos != std::string_view::npos; pos = text.find("{{", pos)) {
    const std::size_t close = text.find("}}", pos + 2);
    if (close == std::string_view::npos) break;
    out.push_back(Placeholder{pos, close + 2, text.substr(pos + 2, close - pos - 2)});
    pos = close + 2;
  }
  return out;
}

}  // namespace

std::string_view prompt_kind_name(PromptKind kind) noexcept {
  switch (kind) {
    case PromptKind::structural_decomposition: return "StructuralDecomposition";
    case PromptKind::critique: return "Critique";
    case PromptKind::regeneration: return "Regeneration";
    case PromptKind::baseline: return "Baseline";
    case PromptKind::chain_of_thought: return "ChainOfThought";
  }
  return "Unknown";
}

std::optional<PromptKind> parse_prompt_kind(std::string_view text) {
  for (PromptKind k : {PromptKind::structural_decomposition, PromptKind::critique, PromptKind::regeneration,
                       PromptKind::baseline, PromptKind::chain_of_thought}) {
    if (text == prompt_kind_name(k)) return k;
  }
  if (text == "sd") return PromptKind::structural_decomposition;
  if (text == "base") return PromptKind::baseline;
  if (text == "cot") return PromptKind::chain_of_thought;
  return std::nullopt;
}

std::string_view prompt_template(PromptKind kind) {
  const auto text = detail::find_resource(resource_name(kind));
  if (!text) throw std::logic_error("prompt template missing from build");
  return *text;
}

std::vector<std::string> prompt_slots(PromptKind kind) {
  std::vector<std::string> out;
  for (const Placeholder& p : placeholders(prompt_template(kind))) {
    if (p.name == kStepSlot) continue;
    if (std::find(out.begin(), out.end(), p.name) == out.end()) out.emplace_back(p.name);
  }
  return out;
}

std::string render_prompt(PromptKind kind, const Slots& slots) {
  const std::string_view text = prompt_template(kind);
  std::string out;
  out.reserve(text.size() + 256);
  std::size_t last = 0;
  for (const Placeholder& p : placeholders(text)) {
    out.append(text.substr(last, p.begin - last));
    last = p.end;
    if (p.name == kStepSlot) {
      if (kind == PromptKind::chain_of_thought) out.append(kStepSentence);
      continue;
    }
    const auto it = slots.find(p.name);
    if (it == slots.end()) throw Error(Errc::missing_slot, std::string(p.name));
    if (kind == PromptKind::critique && p.name == "findings" && it->second.empty()) {
      out.append(kNoFindings);
    } else {
      out.append(it->second);
    }
  }
  out.append(text.substr(last));
  return out;
}

}  // namespace tabrecon
