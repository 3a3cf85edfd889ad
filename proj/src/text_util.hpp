#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tabrecon::detail {

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
inline bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
inline bool is_alpha(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_alnum(char c) noexcept { return is_digit(c) || is_alpha(c); }

std::string_view trim(std::string_view s) noexcept;
bool is_blank(std::string_view s) noexcept;
std::vector<std::string> split_tokens(std::string_view s);
std::size_t alnum_count(std::string_view s) noexcept;
/// trim + collapse every whitespace run to one space.
std::string normalize_ws(std::string_view s);
std::string to_lower(std::string_view s);

}  // namespace tabrecon::detail
