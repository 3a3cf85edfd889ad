#pragma once

#include <optional>
#include <string_view>

namespace tabrecon::detail {

/// Data files compiled into the library (prompt templates, entity patterns),
/// keyed by path relative to data/.
std::optional<std::string_view> find_resource(std::string_view name);

}  // namespace tabrecon::detail
