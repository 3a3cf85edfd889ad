#pragma once

#include <cstddef>
#include <vector>

#include "tabrecon/table.hpp"

namespace tabrecon::detail {

struct SectionLayout {
  std::vector<std::size_t> occupied;  // grid slots used per row, spans included
  std::size_t extent = 0;             // rightmost used slot + 1 over all rows
};

/// Assigns row/col coordinates following HTML grid rules within one section.
SectionLayout layout_section(std::vector<Row>& rows);

/// Lays out both sections and updates t.width. Returns the width.
std::size_t layout_table(Table& t);

}  // namespace tabrecon::detail
