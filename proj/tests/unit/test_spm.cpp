#include <doctest.h>

#include "hfpath/spm.hpp"
#include "../oracles.hpp"

using namespace hfpath;

namespace {

SequenceDatabase abc_db() { return {{{"a", "b", "c"}, {"a", "c"}, {"b", "c"}}}; }

}  // namespace

TEST_CASE("support") {
  const auto db = abc_db();
  CHECK(support(db, Sequence{"a", "c"}) == 2);
  CHECK(support(db, Sequence{}) == 3);
  CHECK(support(db, Sequence{"a", "b", "c", "a"}) == 0);
  CHECK(support(db, Sequence{"c", "a"}) == 0);
}

TEST_CASE("frequent_patterns on the three-sequence fixture") {
  MiningConfig cfg;
  cfg.min_support = 2;
  const std::vector<PatternWithSupport> expected{
      {{"c"}, 3}, {{"a"}, 2}, {{"a", "c"}, 2}, {{"b"}, 2}, {{"b", "c"}, 2}};
  CHECK(frequent_patterns(abc_db(), cfg) == expected);
  CHECK(oracle::brute_force_patterns(abc_db(), 2, 1, 3) == expected);
}

TEST_CASE("frequent_patterns edge cases") {
  MiningConfig cfg;
  CHECK(frequent_patterns({{{"a"}}}, cfg) == std::vector<PatternWithSupport>{{{"a"}, 1}});
  cfg.min_support = 4;
  CHECK(frequent_patterns(abc_db(), cfg).empty());
  cfg.min_support = 0;
  CHECK_THROWS(frequent_patterns(abc_db(), cfg));
  cfg.min_support = 1;
  cfg.min_len = 3;
  cfg.max_len = 2;
  CHECK_THROWS(frequent_patterns(abc_db(), cfg));
}

TEST_CASE("topk") {
  const auto db = abc_db();
  const std::vector<PatternWithSupport> expected{{{"a", "c"}, 2}, {{"b", "c"}, 2}};
  CHECK(topk(db, 2, 2) == expected);
  CHECK(topk(db, 0, 1).empty());
  const auto all = topk(db, 1000, 2);
  MiningConfig cfg;
  cfg.min_len = 2;
  CHECK(all == frequent_patterns(db, cfg));
}

TEST_CASE("mined output equals brute force, supports recompute, anti-monotone") {
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const auto db = oracle::random_database(rng, 8, 6, 5);
    for (std::size_t sigma = 1; sigma <= 4; ++sigma) {
      MiningConfig cfg;
      cfg.min_support = sigma;
      cfg.max_len = 4;
      const auto mined = frequent_patterns(db, cfg);
      CHECK(mined == oracle::brute_force_patterns(db, sigma, 1, 4));
      for (const auto& p : mined) {
        CHECK(p.support == support(db, p.pattern));
        // Every prefix-removed subpattern is at least as frequent.
        for (std::size_t drop = 0; drop < p.pattern.size() && p.pattern.size() > 1; ++drop) {
          Sequence sub = p.pattern;
          sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
          CHECK(support(db, sub) >= p.support);
        }
      }
    }
  }
}

TEST_CASE("format_pattern mirrors the report layout") {
  CHECK(format_pattern(Sequence{"05M09_", "Death"}) == "['05M09_', 'Death']");
}
