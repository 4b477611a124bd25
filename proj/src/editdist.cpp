#include "hfpath/editdist.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "hfpath/error.hpp"

namespace hfpath {

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();

  // Single rolling row over the shorter string.
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row[b.size()];
}

Rational lev_ratio(std::string_view a, std::string_view b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) throw NumericError("lev_ratio: both strings are empty");
  return {static_cast<std::int64_t>(levenshtein(a, b)), static_cast<std::int64_t>(longest)};
}

}  // namespace hfpath
