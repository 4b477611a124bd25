#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hfpath/error.hpp"

namespace hfpath {

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv_line(std::string_view line);
// Quotes a field when it contains a separator or quote.
std::string csv_field(std::string_view value);

// Shortest round-trip representation.
std::string format_double(double v);
// Fixed notation with `digits` decimals; NaN renders as "NA".
std::string format_fixed(double v, int digits);

template <typename Int>
Int parse_int(std::string_view text, std::string_view what) {
  text = trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

double parse_double(std::string_view text, std::string_view what);

}  // namespace hfpath
