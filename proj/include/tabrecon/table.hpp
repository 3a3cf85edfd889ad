#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tabrecon {

/// The unstructured input. Derived views are computed once at construction.
class SourceText {
 public:
  SourceText() = default;
  explicit SourceText(std::string raw);

  const std::string& raw() const noexcept { return raw_; }
  /// Alphanumeric bytes of raw(), order preserved.
  const std::string& alnum() const noexcept { return alnum_; }
  /// Whitespace-delimited tokens of raw().
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::string raw_;
  std::string alnum_;
  std::vector<std::string> tokens_;
};

struct Span {
  std::size_t rows = 1;
  std::size_t cols = 1;

  bool is_unit() const noexcept { return rows == 1 && cols == 1; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Cell {
  std::string text;  // verbatim, never trimmed at parse time
  std::size_t row = 0;  // index within its section (header or body)
  std::size_t col = 0;  // grid column of the cell's left edge
  Span span;

  friend bool operator==(const Cell&, const Cell&) = default;
};

using Row = std::vector<Cell>;

struct Table {
  std::vector<Row> header_rows;
  std::vector<Row> body_rows;
  std::size_t width = 0;

  bool empty() const noexcept { return header_rows.empty() && body_rows.empty(); }
  std::size_t row_count() const noexcept { return header_rows.size() + body_rows.size(); }
  std::size_t cell_count() const noexcept;
  std::size_t body_cell_count() const noexcept;

  friend bool operator==(const Table&, const Table&) = default;
};

/// Builds a table from plain cell texts; every cell has a unit span.
Table make_table(const std::vector<std::vector<std::string>>& header,
                 const std::vector<std::vector<std::string>>& body);

struct PartialTable {
  std::optional<std::string> starting_token;
  Table table;
};

struct ExtractionResult {
  std::vector<PartialTable> tables;
  std::optional<std::string> row_delimiter;
};

enum class FlattenStyle { ocr, csv };

/// Parses the JSON returned by the extraction/regeneration prompts. Code
/// fences and prose around the first balanced object are ignored.
ExtractionResult parse_extraction_json(std::string_view text);

/// Parses the first <table> element of the supported HTML dialect. Cells get
/// grid coordinates; rows are not padded.
Table parse_html_table(std::string_view html);

/// Pads every row on the right with empty unit cells up to the widest row.
/// Widths count colspans and slots covered by rowspans from earlier rows.
Table normalize_rectangular(Table t);

/// Joins partial tables into one normalized table. The first table's header
/// is kept; each starting token becomes a one-cell label row unless the table
/// body already opens with exactly that label.
Table concat_partial_tables(const ExtractionResult& r);

/// Starting tokens that do not occur verbatim in `source`.
std::vector<std::string> unverified_starting_tokens(const ExtractionResult& r,
                                                    const SourceText& source);

std::string serialize_html(const Table& t);

/// RFC 4180 CSV. The first `header_rows` records become header rows.
Table parse_csv_table(std::string_view csv, std::size_t header_rows = 1);
std::string serialize_csv(const Table& t);

SourceText flatten_table(const Table& t, FlattenStyle style);

/// Structural equality after normalization, ignoring trailing '\r' in cell
/// texts. This is the comparison used for format round-trips.
bool equivalent(const Table& a, const Table& b);

/// Human-readable rows joined by " | ", one line per row (headers first).
std::string render_rows(const Table& t);

}  // namespace tabrecon
