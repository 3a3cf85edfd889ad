#pragma once

#include <cstddef>

#include "tabrecon/metrics.hpp"

namespace tabrecon::testing {

/// Zhang-Shasha ordered tree edit distance, unit costs. A second opinion
/// for trees too large for the exhaustive oracle.
std::size_t zhang_shasha(const TableTree& a, const TableTree& b);

}  // namespace tabrecon::testing
