#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hfpath {

// One item per hospitalization (a rendered code or "Death").
using Item = std::string;
using Sequence = std::vector<Item>;

struct SequenceDatabase {
  std::vector<Sequence> sequences;

  std::size_t size() const noexcept { return sequences.size(); }
};

struct PatternWithSupport {
  Sequence pattern;
  std::size_t support = 0;

  friend bool operator==(const PatternWithSupport&, const PatternWithSupport&) = default;
};

struct MiningConfig {
  std::size_t min_support = 1;
  std::size_t min_len = 1;
  std::size_t max_len = 3;
  std::optional<std::size_t> top_k;
};

// Number of sequences containing `pattern` as a (gapped) subsequence.
std::size_t support(const SequenceDatabase& db, std::span<const Item> pattern);

// All patterns with support >= min_support and length in [min_len, max_len],
// mined by prefix-projected recursion. Sorted by support descending, then
// pattern lexicographically ascending; truncated to top_k when set.
std::vector<PatternWithSupport> frequent_patterns(const SequenceDatabase& db,
                                                  const MiningConfig& cfg);

// The k highest-support patterns of length in [min_len, max_len].
std::vector<PatternWithSupport> topk(const SequenceDatabase& db, std::size_t k,
                                     std::size_t min_len, std::size_t max_len = 3);

// "['05M09_', 'Death']"
std::string format_pattern(std::span<const Item> pattern);

// Orders by support descending, then pattern ascending.
bool pattern_order(const PatternWithSupport& a, const PatternWithSupport& b);

}  // namespace hfpath
