#pragma once

#include <cstddef>
#include <string_view>

#include "hfpath/rational.hpp"

namespace hfpath {

// Minimum number of single-character insertions, deletions and
// substitutions turning `a` into `b`.
std::size_t levenshtein(std::string_view a, std::string_view b);

// levenshtein(a, b) / max(|a|, |b|). Throws NumericError when both are empty.
Rational lev_ratio(std::string_view a, std::string_view b);

}  // namespace hfpath
