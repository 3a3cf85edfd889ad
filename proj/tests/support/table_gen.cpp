#include "table_gen.hpp"

#include <array>

namespace tabrecon::testing {

namespace {

using Grid = std::vector<std::vector<std::string>>;

// All strings of length n over {a, b}.
std::vector<std::vector<std::string>> words(std::size_t n) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::string> w;
    for (std::size_t i = 0; i < n; ++i) w.push_back((mask >> i) & 1 ? "b" : "a");
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

std::vector<Table> small_table_pool() {
  std::vector<Table> pool;
  pool.push_back(Table{});
  for (std::size_t n = 1; n <= 3; ++n) {
    for (auto& w : words(n)) pool.push_back(make_table({}, {w}));
  }
  for (std::size_t n = 2; n <= 3; ++n) {
    for (auto& w : words(n)) {
      Grid g;
      for (auto& s : w) g.push_back({s});
      pool.push_back(make_table({}, g));
    }
  }
  for (auto& w : words(4)) pool.push_back(make_table({}, {{w[0], w[1]}, {w[2], w[3]}}));
  pool.push_back(make_table({}, {{"a", "b", "a"}, {"b", "a", "b"}}));
  pool.push_back(make_table({}, {{"a", "a", "b"}, {"a", "b", "b"}}));
  pool.push_back(make_table({}, {{"a", "b"}, {"b", "a"}, {"a", "a"}}));
  pool.push_back(make_table({}, {{"b", "b"}, {"a", "b"}, {"b", "a"}}));
  pool.push_back(make_table({}, {{"a", "b", "a"}, {"b", "a", "b"}, {"a", "b", "a"}}));
  pool.push_back(make_table({}, {{"a"}, {"a", "b"}}));
  pool.push_back(make_table({}, {{"b", "a"}, {"a"}, {"b"}}));
  pool.push_back(make_table({{"a"}}, {{"b"}}));
  pool.push_back(make_table({{"a", "b"}}, {{"b", "a"}}));
  return pool;
}

std::string random_cell_text(std::mt19937& rng) {
  static const std::array<const char*, 34> vocab{
      "12",        "3.5",      "1,200",     "-",          "45%",        "0.25",     "2024-03-31", "March 31, 2024",
      "10:30",     "a@b.com",  "http://x.io", "Revenue",  "Cost",       "Total",    "alpha",      "beta",
      "(a)",       "(see",     "note)",     "[x]",        "1 & 2",      "12 345",   "Revenue 750", "1,",
      ",5",        "3 ± 1",    "",          "  ",         "S1",         "AB-12",    "x y z",      "n/a",
      "<0.001",    "GO:0006412"};
  return vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)];
}

Table random_table(std::mt19937& rng, const RandomTableOptions& opts) {
  std::uniform_int_distribution<std::size_t> rows_d(0, opts.max_rows);
  std::uniform_int_distribution<std::size_t> cols_d(1, opts.max_cols);
  std::bernoulli_distribution header_d(opts.header_probability);
  std::bernoulli_distribution span_d(opts.colspan_probability);
  std::bernoulli_distribution ragged_d(0.2);

  const std::size_t rows = rows_d(rng);
  const std::size_t cols = cols_d(rng);
  const bool header = rows > 0 && header_d(rng);
  Table t;
  for (std::size_t r = 0; r < rows; ++r) {
    const bool in_header = header && r == 0;
    Row row;
    std::size_t width = cols;
    if (opts.ragged && ragged_d(rng)) width = std::uniform_int_distribution<std::size_t>(0, cols)(rng);
    for (std::size_t c = 0; c < width;) {
      Cell cell;
      cell.text = random_cell_text(rng);
      cell.row = in_header ? 0 : r - (header ? 1 : 0);
      cell.col = c;
      if (c + 1 < width && span_d(rng)) cell.span.cols = 2;
      c += cell.span.cols;
      row.push_back(std::move(cell));
    }
    (in_header ? t.header_rows : t.body_rows).push_back(std::move(row));
  }
  t.width = cols;
  return opts.ragged ? t : normalize_rectangular(std::move(t));
}

SourceText random_source(std::mt19937& rng, const Table& t) {
  std::bernoulli_distribution keep(0.85);
  std::bernoulli_distribution noise(0.1);
  std::string out;
  auto emit = [&](const std::string& s) {
    if (s.empty()) return;
    if (!out.empty()) out += ' ';
    out += s;
  };
  for (const auto* section : {&t.header_rows, &t.body_rows}) {
    for (const Row& row : *section) {
      for (const Cell& c : row) {
        if (keep(rng)) emit(c.text);
        if (noise(rng)) emit(random_cell_text(rng));
      }
      out += "\r\n";
    }
  }
  return SourceText(out);
}

}  // namespace tabrecon::testing
