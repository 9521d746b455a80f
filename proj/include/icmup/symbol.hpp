#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "icmup/error.hpp"

namespace icmup {

/// Role of a symbol inside a stored pattern. Roles come from the
/// class-marker convention and the store context, never from the symbol text
/// alone, so two symbols compare equal whenever their texts do.
enum class Role {
  content,
  id,
  boundary,
};

inline constexpr char boundary_sigil = '#';

inline bool is_valid_symbol_text(std::string_view text) {
  if (text.empty()) return false;
  return std::none_of(text.begin(), text.end(), [](unsigned char c) {
    return std::isspace(c) != 0;
  });
}

struct Symbol {
  std::string text;
  Role role = Role::content;

  friend bool operator==(const Symbol& a, const Symbol& b) {
    return a.text == b.text;
  }
};

using Sequence = std::vector<std::string>;

inline Sequence split_symbols(std::string_view line) {
  Sequence out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Range>
std::string join_symbols(const Range& symbols, std::string_view sep = " ") {
  std::string out;
  bool first = true;
  for (const auto& s : symbols) {
    if (!first) out += sep;
    out += s;
    first = false;
  }
  return out;
}

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_bits(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf, end);
}

inline double parse_double(std::string_view text, std::size_t line) {
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ParseError(line, "expected a number, got '" + std::string(text) + "'");
  return value;
}

inline std::size_t parse_count(std::string_view text, std::size_t line) {
  std::size_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw ParseError(line, "expected a non-negative integer, got '" + std::string(text) + "'");
  return value;
}

/// Prefix for freshly minted code symbols (`@1`, `@2`, ...). Grows to `@@`,
/// `@@@`, ... until no symbol of `alphabet` starts with it, so a minted code
/// can never collide with a source symbol.
template <typename Range>
std::string fresh_code_prefix(const Range& alphabet) {
  std::string prefix = "@";
  for (;;) {
    bool clash = false;
    for (const auto& s : alphabet) {
      if (std::string_view(s).substr(0, prefix.size()) == prefix) {
        clash = true;
        break;
      }
    }
    if (!clash) return prefix;
    prefix += '@';
  }
}

/// True if `text` is `prefix` followed by one or more digits.
inline bool is_code_symbol(std::string_view text, std::string_view prefix) {
  if (text.size() <= prefix.size() || text.substr(0, prefix.size()) != prefix) return false;
  return std::all_of(text.begin() + static_cast<std::ptrdiff_t>(prefix.size()), text.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace icmup
