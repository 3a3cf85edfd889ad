#include "tabrecon/checker.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/regex.hpp>

#include "resources.hpp"
#include "tabrecon/error.hpp"
#include "text_util.hpp"

namespace tabrecon {

using nlohmann::json;

std::string_view entity_name(EntityKind kind) noexcept {
  switch (kind) {
    case EntityKind::email: return "email";
    case EntityKind::url: return "url";
    case EntityKind::date: return "date";
    case EntityKind::time: return "time";
    case EntityKind::number: return "number";
    case EntityKind::word: return "word";
  }
  return "unknown";
}

std::string_view rule_name(Rule rule) noexcept {
  switch (rule) {
    case Rule::empty_row: return "Empty Row";
    case Rule::inconsistent_column: return "Inconsistent Column";
    case Rule::merged_cell: return "Merged Cell";
    case Rule::unbalanced_brackets: return "Unbalanced Brackets";
    case Rule::delimiter_error: return "Delimiter Error";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Entity patterns

struct EntityPatterns::Impl {
  std::array<std::string, 6> text;
  std::array<boost::regex, 6> compiled;
};

EntityPatterns::EntityPatterns(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
EntityPatterns::~EntityPatterns() = default;

namespace {

std::size_t kind_index(EntityKind kind) { return static_cast<std::size_t>(kind); }

json default_pattern_json() {
  const auto data = detail::find_resource("entity_patterns.json");
  return json::parse(data.value());
}

}  // namespace

std::shared_ptr<const EntityPatterns> EntityPatterns::from_json(const json& config) {
  if (!config.is_object()) throw Error(Errc::invalid_config, "entity patterns must be a JSON object");
  const json defaults = default_pattern_json();
  auto impl = std::make_unique<Impl>();
  for (EntityKind kind : kEntityPriority) {
    const std::string name(entity_name(kind));
    const json& source = config.contains(name) ? config.at(name) : defaults.at(name);
    if (!source.is_string()) throw Error(Errc::invalid_config, "pattern for " + name + " must be a string");
    const std::size_t i = kind_index(kind);
    impl->text[i] = source.get<std::string>();
    try {
      impl->compiled[i] = boost::regex(impl->text[i], boost::regex::perl | boost::regex::optimize);
    } catch (const boost::regex_error& e) {
      throw Error(Errc::invalid_config, "pattern for " + name + " does not compile: " + e.what());
    }
  }
  for (const auto& [key, _] : config.items()) {
    const bool known = std::any_of(kEntityPriority.begin(), kEntityPriority.end(),
                                   [&key](EntityKind k) { return entity_name(k) == key; });
    if (!known) throw Error(Errc::invalid_config, "unknown entity kind \"" + key + "\"");
  }
  return std::shared_ptr<const EntityPatterns>(new EntityPatterns(std::move(impl)));
}

std::shared_ptr<const EntityPatterns> EntityPatterns::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::unreadable_file, path.string());
  json config = json::parse(in, nullptr, false);
  if (config.is_discarded()) throw Error(Errc::invalid_config, path.string() + " is not valid JSON");
  return from_json(config);
}

std::shared_ptr<const EntityPatterns> EntityPatterns::defaults() {
  static const std::shared_ptr<const EntityPatterns> instance = from_json(json::object());
  return instance;
}

bool EntityPatterns::matches(EntityKind kind, std::string_view text) const {
  text = detail::trim(text);
  if (text.empty()) return false;
  try {
    return boost::regex_match(text.begin(), text.end(), impl_->compiled[kind_index(kind)]);
  } catch (const std::runtime_error&) {
    // Boost gives up on pathological backtracking; treat as no match.
    return false;
  }
}

EntityType EntityPatterns::type(EntityKind kind) const {
  return EntityType{kind, impl_->text[kind_index(kind)]};
}

// ---------------------------------------------------------------------------
// Signatures

Signature compute_signature(std::string_view text) noexcept {
  Signature sig;
  for (char c : detail::trim(text)) {
    if (detail::is_digit(c)) {
      sig.has_digits = true;
    } else if (detail::is_alpha(c)) {
      sig.has_letters = true;
    } else if (detail::is_space(c)) {
      sig.has_whitespace = true;
    } else {
      sig.has_punct = true;
    }
  }
  return sig;
}

namespace {

int signature_key(const Signature& s) {
  return (s.has_digits ? 1 : 0) | (s.has_letters ? 2 : 0) | (s.has_punct ? 4 : 0) | (s.has_whitespace ? 8 : 0);
}

std::string signature_label(const Signature& s) {
  std::string out;
  auto add = [&out](bool on, std::string_view name) {
    if (!on) return;
    if (!out.empty()) out += '+';
    out += name;
  };
  add(s.has_digits, "digits");
  add(s.has_letters, "letters");
  add(s.has_punct, "punctuation");
  add(s.has_whitespace, "whitespace");
  return out.empty() ? "empty" : out;
}

std::string quote_cell(std::string_view s) { return "\"" + detail::normalize_ws(s) + "\""; }

std::string join_rows(const std::vector<CellRef>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(cells[i].row + 1);
  }
  return out;
}

/// Body column view: element i is the text of the cell starting at grid
/// column `col` in body row i, or "" when no cell starts there.
struct Column {
  std::size_t col = 0;
  std::vector<std::string> texts;
  std::vector<bool> has_cell;
};

std::vector<Column> body_columns(const Table& t) {
  std::vector<Column> cols(t.width);
  for (std::size_t c = 0; c < t.width; ++c) {
    cols[c].col = c;
    cols[c].texts.assign(t.body_rows.size(), std::string{});
    cols[c].has_cell.assign(t.body_rows.size(), false);
  }
  for (std::size_t r = 0; r < t.body_rows.size(); ++r) {
    for (const Cell& cell : t.body_rows[r]) {
      if (cell.col >= cols.size()) continue;
      cols[cell.col].texts[r] = cell.text;
      cols[cell.col].has_cell[r] = true;
    }
  }
  return cols;
}

struct SignatureOutcome {
  std::vector<Violation> violations;
  std::vector<std::size_t> consistent_rows;
};

SignatureOutcome analyze_signatures(std::span<const std::string> column, std::size_t col,
                                    const CheckerOptions& options) {
  SignatureOutcome out;
  std::map<int, std::size_t> counts;
  std::vector<std::optional<Signature>> sigs(column.size());
  std::size_t non_empty = 0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (detail::is_blank(column[i])) continue;
    sigs[i] = compute_signature(column[i]);
    ++counts[signature_key(*sigs[i])];
    ++non_empty;
  }
  if (non_empty == 0) return out;
  const auto best = std::max_element(counts.begin(), counts.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
  const double share = static_cast<double>(best->second) / static_cast<double>(non_empty);
  if (share < options.consistency_threshold) return out;

  std::vector<CellRef> odd;
  Signature majority;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!sigs[i]) continue;
    if (signature_key(*sigs[i]) == best->first) {
      out.consistent_rows.push_back(i);
      majority = *sigs[i];
    } else {
      odd.push_back(CellRef{i, col});
    }
  }
  if (!odd.empty()) {
    Violation v{Rule::inconsistent_column, std::nullopt, col, {}, odd};
    v.detail = "column " + std::to_string(col + 1) + ": rows " + join_rows(odd) +
               " deviate from the majority signature (" + signature_label(majority) + ")";
    out.violations.push_back(std::move(v));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Rule families

std::vector<Violation> detect_empty_rows(const Table& t) {
  std::vector<Violation> out;
  for (std::size_t r = 0; r < t.body_rows.size(); ++r) {
    const Row& row = t.body_rows[r];
    const bool empty = std::all_of(row.begin(), row.end(), [](const Cell& c) { return detail::is_blank(c.text); });
    if (!empty) continue;
    Violation v{Rule::empty_row, r, std::nullopt, "row " + std::to_string(r + 1) + " has only empty or whitespace cells", {}};
    for (const Cell& cell : row) v.cells.push_back(CellRef{r, cell.col});
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<EntityType> detect_entity_type(std::span<const std::string> column,
                                             const CheckerOptions& options) {
  std::size_t non_empty = 0;
  std::array<std::size_t, 6> hits{};
  for (const std::string& text : column) {
    if (detail::is_blank(text)) continue;
    ++non_empty;
    for (EntityKind kind : kEntityPriority) {
      if (options.patterns->matches(kind, text)) ++hits[kind_index(kind)];
    }
  }
  if (non_empty == 0) return std::nullopt;
  std::optional<EntityKind> best;
  std::size_t best_hits = 0;
  for (EntityKind kind : kEntityPriority) {
    const std::size_t h = hits[kind_index(kind)];
    const double share = static_cast<double>(h) / static_cast<double>(non_empty);
    if (share + 1e-12 < options.consistency_threshold) continue;
    if (!best || h > best_hits) {
      best = kind;
      best_hits = h;
    }
  }
  if (!best) return std::nullopt;
  return options.patterns->type(*best);
}

std::vector<Violation> signature_analysis(std::span<const std::string> column, std::size_t col,
                                          const CheckerOptions& options) {
  return analyze_signatures(column, col, options).violations;
}

ConsistencyResult check_entity_consistency(const Table& t, const CheckerOptions& options) {
  ConsistencyResult out;
  for (const Column& column : body_columns(t)) {
    const auto type = detect_entity_type(column.texts, options);
    if (!type) {
      auto sig = analyze_signatures(column.texts, column.col, options);
      for (std::size_t r : sig.consistent_rows) out.consistent.push_back(CellRef{r, column.col});
      for (auto& v : sig.violations) out.violations.push_back(std::move(v));
      continue;
    }
    std::vector<CellRef> odd;
    for (std::size_t r = 0; r < column.texts.size(); ++r) {
      if (!column.has_cell[r] || detail::is_blank(column.texts[r])) continue;
      if (options.patterns->matches(type->kind, column.texts[r])) {
        out.consistent.push_back(CellRef{r, column.col});
      } else {
        odd.push_back(CellRef{r, column.col});
      }
    }
    if (!odd.empty()) {
      Violation v{Rule::inconsistent_column, std::nullopt, column.col, {}, odd};
      v.detail = "column " + std::to_string(column.col + 1) + " (" + std::string(entity_name(type->kind)) +
                 "): rows " + join_rows(odd) + " do not match";
      out.violations.push_back(std::move(v));
    }
  }
  std::sort(out.consistent.begin(), out.consistent.end());
  out.consistent_cells = out.consistent.size();
  return out;
}

namespace {

std::string_view strip_token(std::string_view tok) {
  while (!tok.empty() && std::string_view("([{$").find(tok.front()) != std::string_view::npos) tok.remove_prefix(1);
  while (!tok.empty() && std::string_view(")]},;:.").find(tok.back()) != std::string_view::npos) tok.remove_suffix(1);
  return tok;
}

bool is_plus_minus(std::string_view tok) { return tok == "\xC2\xB1" || tok == "+/-"; }

/// Whitespace tokens with "a ± b" sequences folded into one token.
std::vector<std::string> value_tokens(std::string_view text) {
  auto raw = detail::split_tokens(text);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i + 2 < raw.size() && is_plus_minus(raw[i + 1])) {
      out.push_back(raw[i] + raw[i + 1] + raw[i + 2]);
      i += 2;
    } else {
      out.push_back(raw[i]);
    }
  }
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return detail::is_digit(c); });
}

}  // namespace

std::vector<Violation> detect_merged_cells(const Table& t, const CheckerOptions& options) {
  std::vector<bool> numeric_column(t.width, false);
  for (const Column& column : body_columns(t)) {
    const auto type = detect_entity_type(column.texts, options);
    numeric_column[column.col] = type && type->kind == EntityKind::number;
  }
  const EntityPatterns& patterns = *options.patterns;
  std::vector<Violation> out;
  for (std::size_t r = 0; r < t.body_rows.size(); ++r) {
    for (const Cell& cell : t.body_rows[r]) {
      if (detail::is_blank(cell.text)) continue;
      if (patterns.matches(EntityKind::date, cell.text) || patterns.matches(EntityKind::time, cell.text)) continue;
      std::size_t numeric = 0;
      std::size_t alphabetic = 0;
      for (const std::string& tok : value_tokens(cell.text)) {
        const std::string_view core = strip_token(tok);
        if (core.empty()) continue;
        if (patterns.matches(EntityKind::number, core)) {
          ++numeric;
        } else if (std::any_of(core.begin(), core.end(), detail::is_alpha) &&
                   std::none_of(core.begin(), core.end(), detail::is_digit)) {
          ++alphabetic;
        }
      }
      const bool numeric_col = cell.col < numeric_column.size() && numeric_column[cell.col];
      std::string why;
      if (numeric >= 2) {
        why = "holds " + std::to_string(numeric) + " numeric tokens";
      } else if (numeric == 1 && alphabetic >= 1 && numeric_col) {
        why = "mixes text with a number in a numeric column";
      } else {
        continue;
      }
      Violation v{Rule::merged_cell, r, cell.col, {}, {CellRef{r, cell.col}}};
      v.detail = "row " + std::to_string(r + 1) + ", column " + std::to_string(cell.col + 1) + ": cell " +
                 quote_cell(cell.text) + " " + why;
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<Violation> detect_delimiter_errors(const Table& t) {
  // A split number pushes its tail into a column most rows leave empty.
  std::vector<std::size_t> filled(t.width, 0);
  std::size_t content_rows = 0;
  for (const Row& row : t.body_rows) {
    bool any = false;
    for (const Cell& cell : row) {
      if (detail::is_blank(cell.text)) continue;
      any = true;
      if (cell.col < filled.size()) ++filled[cell.col];
    }
    content_rows += any ? 1 : 0;
  }
  auto overflow = [&](std::size_t col) { return col < filled.size() && 2 * filled[col] <= content_rows; };

  std::vector<Violation> out;
  for (std::size_t r = 0; r < t.body_rows.size(); ++r) {
    const Row& row = t.body_rows[r];
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      const std::string_view left = detail::trim(row[i].text);
      const std::string_view right = detail::trim(row[i + 1].text);
      if (left.empty() || right.empty()) continue;
      const bool dangling = left.size() >= 2 && (left.back() == ',' || left.back() == '.') &&
                            detail::is_digit(left[left.size() - 2]) && detail::is_digit(right.front());
      const bool fragment = all_digits(left) && left.size() <= 3 && all_digits(right) && right.size() == 3 &&
                            overflow(row[i + 1].col);
      if (!dangling && !fragment) continue;
      Violation v{Rule::delimiter_error, r, row[i].col, {}, {CellRef{r, row[i].col}}};
      v.detail = "row " + std::to_string(r + 1) + ", column " + std::to_string(row[i].col + 1) + ": cells " +
                 quote_cell(left) + " | " + quote_cell(right) + " look like one number split by a delimiter";
      out.push_back(std::move(v));
    }
  }
  return out;
}

namespace {

bool brackets_balanced(std::string_view text) {
  std::string stack;
  for (char c : text) {
    switch (c) {
      case '(': case '[': case '{':
        stack.push_back(c);
        break;
      case ')': case ']': case '}': {
        const char open = c == ')' ? '(' : c == ']' ? '[' : '{';
        if (stack.empty() || stack.back() != open) return false;
        stack.pop_back();
        break;
      }
      default:
        break;
    }
  }
  return stack.empty();
}

}  // namespace

std::vector<Violation> detect_unbalanced_brackets(const Table& t) {
  std::vector<Violation> out;
  for (std::size_t r = 0; r < t.body_rows.size(); ++r) {
    for (const Cell& cell : t.body_rows[r]) {
      if (brackets_balanced(cell.text)) continue;
      Violation v{Rule::unbalanced_brackets, r, cell.col, {}, {CellRef{r, cell.col}}};
      v.detail = "row " + std::to_string(r + 1) + ", column " + std::to_string(cell.col + 1) + ": cell " +
                 quote_cell(cell.text) + " has unbalanced brackets";
      out.push_back(std::move(v));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

ValidationReport run_sanity_check(const SourceText& source, const Table& t, const CheckerOptions& options) {
  ValidationReport report;
  report.violations = detect_empty_rows(t);
  ConsistencyResult consistency = check_entity_consistency(t, options);
  for (auto& v : consistency.violations) report.violations.push_back(std::move(v));

  // Cell-level rules interleave per cell: merged, brackets, delimiter.
  std::vector<Violation> cell_level;
  auto merged = detect_merged_cells(t, options);
  auto brackets = detect_unbalanced_brackets(t);
  auto delimiters = detect_delimiter_errors(t);
  for (auto* group : {&merged, &brackets, &delimiters}) {
    for (auto& v : *group) cell_level.push_back(std::move(v));
  }
  auto rank = [](Rule r) { return r == Rule::merged_cell ? 0 : r == Rule::unbalanced_brackets ? 1 : 2; };
  std::stable_sort(cell_level.begin(), cell_level.end(), [&rank](const Violation& a, const Violation& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return rank(a.rule) < rank(b.rule);
  });
  for (auto& v : cell_level) report.violations.push_back(std::move(v));

  std::set<CellRef> violating;
  for (const Violation& v : report.violations) violating.insert(v.cells.begin(), v.cells.end());

  // Scored cells: everything except blank padding in rows that carry content.
  // Cells of an empty row stay in so that the row's violation has weight.
  std::vector<std::size_t> per_col_total(t.width, 0);
  for (const Row& row : t.body_rows) {
    const bool empty_row = std::all_of(row.begin(), row.end(), [](const Cell& c) { return detail::is_blank(c.text); });
    for (const Cell& cell : row) {
      if (!empty_row && detail::is_blank(cell.text)) continue;
      ++report.total_cells;
      if (cell.col < per_col_total.size()) ++per_col_total[cell.col];
    }
  }
  report.violating_cells = violating.size();
  report.consistent_cells = static_cast<std::size_t>(
      std::count_if(consistency.consistent.begin(), consistency.consistent.end(),
                    [&violating](const CellRef& c) { return !violating.contains(c); }));
  if (report.total_cells > 0) {
    const auto total = static_cast<double>(report.total_cells);
    report.goodness_score = static_cast<double>(report.consistent_cells) / total;
    report.badness_score = static_cast<double>(report.violating_cells) / total;
  }

  std::vector<std::size_t> per_col_bad(t.width, 0);
  for (const CellRef& c : violating) {
    if (c.col < per_col_bad.size()) ++per_col_bad[c.col];
  }
  for (std::size_t c = 0; c < t.width; ++c) {
    if (per_col_total[c] == 0) continue;
    report.max_column_badness = std::max(report.max_column_badness,
                                         static_cast<double>(per_col_bad[c]) / static_cast<double>(per_col_total[c]));
  }

  report.coverage = compute_coverage(source, t);
  report.hallucination_rate = compute_hallucination(source, t);
  return report;
}

bool is_converged(const ValidationReport& report, const ConvergenceThresholds& thresholds) {
  return report.coverage >= thresholds.min_coverage && report.hallucination_rate <= thresholds.max_hallucination &&
         report.badness_score <= thresholds.max_badness && report.goodness_score >= thresholds.min_goodness;
}

json to_json(const Violation& v) {
  json cells = json::array();
  for (const CellRef& c : v.cells) cells.push_back({c.row, c.col});
  return json{{"rule", rule_name(v.rule)},
              {"row", v.row ? json(*v.row) : json(nullptr)},
              {"col", v.col ? json(*v.col) : json(nullptr)},
              {"detail", v.detail},
              {"cells", std::move(cells)}};
}

json to_json(const ValidationReport& report) {
  json violations = json::array();
  for (const Violation& v : report.violations) violations.push_back(to_json(v));
  return json{{"violations", std::move(violations)},
              {"coverage", report.coverage},
              {"hallucination_rate", report.hallucination_rate},
              {"goodness_score", report.goodness_score},
              {"badness_score", report.badness_score},
              {"max_column_badness", report.max_column_badness},
              {"consistent_cells", report.consistent_cells},
              {"violating_cells", report.violating_cells},
              {"total_cells", report.total_cells}};
}

}  // namespace tabrecon
