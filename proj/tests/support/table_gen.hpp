#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "tabrecon/table.hpp"

namespace tabrecon::testing {

/// Every table with at most 3 rows and 3 columns in a fixed enumeration
/// over the alphabet {a, b}: the empty table, all single rows, all single
/// columns, all 2x2 grids, a few 2x3, 3x2 and 3x3 grids, plus ragged and
/// header-row shapes.
std::vector<Table> small_table_pool();

struct RandomTableOptions {
  std::size_t max_rows = 8;
  std::size_t max_cols = 6;
  double header_probability = 0.3;
  double colspan_probability = 0.05;
  bool ragged = false;  // skip normalization
};

Table random_table(std::mt19937& rng, const RandomTableOptions& opts = {});

/// Text that contains most of the table's tokens, some noise words and
/// some dropped cells.
SourceText random_source(std::mt19937& rng, const Table& t);

/// Random cell text drawn from numbers, words, dates, emails, brackets,
/// blanks and multi-token mixes.
std::string random_cell_text(std::mt19937& rng);

}  // namespace tabrecon::testing
