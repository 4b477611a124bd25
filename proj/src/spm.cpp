#include "hfpath/spm.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace hfpath {
namespace {

// A suffix of sequence `seq` starting at `start` (pseudo-projection).
struct Suffix {
  std::uint32_t seq;
  std::uint32_t start;
};

class PrefixSpan {
 public:
  PrefixSpan(const SequenceDatabase& db, const MiningConfig& cfg) : cfg_(cfg) {
    // Items are interned in sorted order so integer order matches string order.
    std::map<Item, std::uint32_t> ids;
    for (const auto& s : db.sequences) {
      for (const auto& item : s) ids.emplace(item, 0);
    }
    std::uint32_t next = 0;
    for (auto& [item, id] : ids) {
      id = next++;
      names_.push_back(item);
    }
    encoded_.reserve(db.size());
    for (const auto& s : db.sequences) {
      auto& e = encoded_.emplace_back();
      e.reserve(s.size());
      for (const auto& item : s) e.push_back(ids.at(item));
    }
  }

  std::vector<PatternWithSupport> run() {
    std::vector<Suffix> root;
    root.reserve(encoded_.size());
    for (std::uint32_t i = 0; i < encoded_.size(); ++i) root.push_back({i, 0});
    std::vector<std::uint32_t> prefix;
    grow(root, prefix);
    return std::move(out_);
  }

 private:
  void grow(const std::vector<Suffix>& projected, std::vector<std::uint32_t>& prefix) {
    if (prefix.size() >= cfg_.max_len) return;

    // Per-item support within the projected database, counted once per sequence.
    std::vector<std::uint32_t> counts(names_.size(), 0);
    std::vector<std::uint32_t> last_seen(names_.size(), UINT32_MAX);
    for (const auto& [seq, start] : projected) {
      const auto& s = encoded_[seq];
      for (std::size_t p = start; p < s.size(); ++p) {
        if (last_seen[s[p]] != seq) {
          last_seen[s[p]] = seq;
          ++counts[s[p]];
        }
      }
    }

    for (std::uint32_t item = 0; item < names_.size(); ++item) {
      if (counts[item] < cfg_.min_support) continue;
      prefix.push_back(item);
      if (prefix.size() >= cfg_.min_len) emit(prefix, counts[item]);
      if (prefix.size() < cfg_.max_len) {
        std::vector<Suffix> next;
        next.reserve(counts[item]);
        for (const auto& [seq, start] : projected) {
          const auto& s = encoded_[seq];
          for (std::size_t p = start; p < s.size(); ++p) {
            if (s[p] == item) {
              next.push_back({seq, static_cast<std::uint32_t>(p + 1)});
              break;
            }
          }
        }
        grow(next, prefix);
      }
      prefix.pop_back();
    }
  }

  void emit(const std::vector<std::uint32_t>& prefix, std::size_t support) {
    PatternWithSupport p;
    p.support = support;
    p.pattern.reserve(prefix.size());
    for (auto id : prefix) p.pattern.push_back(names_[id]);
    out_.push_back(std::move(p));
  }

  const MiningConfig& cfg_;
  std::vector<Item> names_;
  std::vector<std::vector<std::uint32_t>> encoded_;
  std::vector<PatternWithSupport> out_;
};

bool contains_subsequence(const Sequence& seq, std::span<const Item> pattern) {
  std::size_t matched = 0;
  for (std::size_t i = 0; i < seq.size() && matched < pattern.size(); ++i) {
    if (seq[i] == pattern[matched]) ++matched;
  }
  return matched == pattern.size();
}

}  // namespace

bool pattern_order(const PatternWithSupport& a, const PatternWithSupport& b) {
  if (a.support != b.support) return a.support > b.support;
  return a.pattern < b.pattern;
}

std::size_t support(const SequenceDatabase& db, std::span<const Item> pattern) {
  return static_cast<std::size_t>(
      std::count_if(db.sequences.begin(), db.sequences.end(),
                    [&](const Sequence& s) { return contains_subsequence(s, pattern); }));
}

std::vector<PatternWithSupport> frequent_patterns(const SequenceDatabase& db,
                                                  const MiningConfig& cfg) {
  if (cfg.min_support < 1) throw std::invalid_argument("min_support must be >= 1");
  if (cfg.min_len < 1 || cfg.min_len > cfg.max_len) {
    throw std::invalid_argument("pattern length bounds must satisfy 1 <= min_len <= max_len");
  }
  auto patterns = PrefixSpan(db, cfg).run();
  std::sort(patterns.begin(), patterns.end(), pattern_order);
  if (cfg.top_k && patterns.size() > *cfg.top_k) patterns.resize(*cfg.top_k);
  return patterns;
}

std::vector<PatternWithSupport> topk(const SequenceDatabase& db, std::size_t k,
                                     std::size_t min_len, std::size_t max_len) {
  if (k == 0) return {};
  MiningConfig cfg;
  cfg.min_support = 1;
  cfg.min_len = std::max<std::size_t>(min_len, 1);
  cfg.max_len = std::max(max_len, cfg.min_len);
  cfg.top_k = k;
  return frequent_patterns(db, cfg);
}

std::string format_pattern(std::span<const Item> pattern) {
  std::string out = "[";
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (i) out += ", ";
    out += '\'';
    out += pattern[i];
    out += '\'';
  }
  out += ']';
  return out;
}

}  // namespace hfpath
