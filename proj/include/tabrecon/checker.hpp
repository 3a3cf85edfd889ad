#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tabrecon/table.hpp"

namespace tabrecon {

enum class EntityKind { email, url, date, time, number, word };

/// Priority order used to break voting ties.
inline constexpr std::array<EntityKind, 6> kEntityPriority{
    EntityKind::email, EntityKind::url,    EntityKind::date,
    EntityKind::time,  EntityKind::number, EntityKind::word};

std::string_view entity_name(EntityKind kind) noexcept;

struct EntityType {
  EntityKind kind;
  std::string pattern;
};

/// Compiled entity regular expressions. Matching is whole-string against the
/// trimmed cell text and never throws.
class EntityPatterns {
 public:
  /// The embedded default set, compiled once.
  static std::shared_ptr<const EntityPatterns> defaults();
  /// Object of name -> pattern text. Names missing from `config` keep their
  /// default pattern.
  static std::shared_ptr<const EntityPatterns> from_json(const nlohmann::json& config);
  static std::shared_ptr<const EntityPatterns> from_file(const std::filesystem::path& path);

  ~EntityPatterns();
  EntityPatterns(const EntityPatterns&) = delete;
  EntityPatterns& operator=(const EntityPatterns&) = delete;

  bool matches(EntityKind kind, std::string_view text) const;
  EntityType type(EntityKind kind) const;

 private:
  struct Impl;
  explicit EntityPatterns(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

struct Signature {
  bool has_digits = false;
  bool has_letters = false;
  bool has_punct = false;
  bool has_whitespace = false;

  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Signature of the trimmed text. Non-ASCII bytes count as punctuation.
Signature compute_signature(std::string_view text) noexcept;

enum class Rule { empty_row, inconsistent_column, merged_cell, unbalanced_brackets, delimiter_error };

/// "Empty Row", "Inconsistent Column", ...
std::string_view rule_name(Rule rule) noexcept;

struct CellRef {
  std::size_t row = 0;  // body row index
  std::size_t col = 0;  // grid column

  friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

/// Location kind follows the rule: EmptyRow -> row, InconsistentColumn ->
/// column, everything else -> cell. `cells` lists every body cell the
/// violation implicates. Indices are zero-based; `detail` uses one-based
/// row/column numbers for readers.
struct Violation {
  Rule rule;
  std::optional<std::size_t> row;
  std::optional<std::size_t> col;
  std::string detail;
  std::vector<CellRef> cells;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  double coverage = 1.0;
  double hallucination_rate = 0.0;
  double goodness_score = 0.0;
  double badness_score = 0.0;
  /// Highest per-column share of violating body cells.
  double max_column_badness = 0.0;
  std::size_t consistent_cells = 0;
  std::size_t violating_cells = 0;
  /// Body cells that are scored: blank padding inside a row with content is
  /// left out; cells of an empty row count.
  std::size_t total_cells = 0;
};

nlohmann::json to_json(const Violation& v);
nlohmann::json to_json(const ValidationReport& report);

struct CheckerOptions {
  std::shared_ptr<const EntityPatterns> patterns = EntityPatterns::defaults();
  double consistency_threshold = 0.8;
};

struct ConvergenceThresholds {
  double min_coverage = 0.90;
  double max_hallucination = 0.20;
  double max_badness = 0.30;
  double min_goodness = 0.50;
};

// Rule families. All of them look at body rows only; headers are exempt.

std::vector<Violation> detect_empty_rows(const Table& t);

/// Entity type matched by at least the threshold share of non-empty cells.
/// The highest share wins; ties go to the earlier kind in kEntityPriority.
std::optional<EntityType> detect_entity_type(std::span<const std::string> column,
                                             const CheckerOptions& options = {});

struct ConsistencyResult {
  std::vector<Violation> violations;
  std::size_t consistent_cells = 0;
  /// Cells consistent with their column's entity type or majority signature.
  std::vector<CellRef> consistent;
};

/// Entity voting per body column; columns without an entity type fall
/// through to signature analysis.
ConsistencyResult check_entity_consistency(const Table& t, const CheckerOptions& options = {});

/// Flags cells whose signature differs from a signature shared by at least
/// the threshold share of non-empty cells. `col` labels the violation.
std::vector<Violation> signature_analysis(std::span<const std::string> column, std::size_t col = 0,
                                          const CheckerOptions& options = {});

std::vector<Violation> detect_merged_cells(const Table& t, const CheckerOptions& options = {});
/// Adjacent cells that read as one number: a left cell ending in digit plus
/// ',' or '.' before a digit, or 1-3 digits followed by exactly 3 digits in
/// a column that at most half of the content rows fill.
std::vector<Violation> detect_delimiter_errors(const Table& t);
std::vector<Violation> detect_unbalanced_brackets(const Table& t);

/// 1 - |uncovered alphanumerics| / |source alphanumerics|; source tokens are
/// covered by equal table tokens with multiset consumption.
double compute_coverage(const SourceText& source, const Table& t);

/// Mean over rows of the mean per-cell uncovered share. A cell occurring
/// verbatim in the source is fully covered; otherwise its coverage is the
/// alphanumeric share of its tokens found in the source token multiset.
double compute_hallucination(const SourceText& source, const Table& t);

ValidationReport run_sanity_check(const SourceText& source, const Table& t,
                                  const CheckerOptions& options = {});

bool is_converged(const ValidationReport& report, const ConvergenceThresholds& thresholds = {});

}  // namespace tabrecon
