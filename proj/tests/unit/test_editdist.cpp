#include <doctest.h>

#include "hfpath/editdist.hpp"
#include "hfpath/error.hpp"
#include "../oracles.hpp"

using hfpath::levenshtein;
using hfpath::lev_ratio;
using hfpath::Rational;

TEST_CASE("levenshtein examples") {
  CHECK(levenshtein("abc", "abc") == 0);
  CHECK(levenshtein("abc", "") == 3);
  CHECK(levenshtein("", "") == 0);
  // Oracle: full DP table by hand, kitten -> sitting needs k->s, e->i, +g.
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(hfpath::oracle::levenshtein_recursive("kitten", "sitting") == 3);
}

TEST_CASE("lev_ratio examples") {
  CHECK(lev_ratio("05", "05") == Rational{0});
  CHECK(lev_ratio("05", "04") == Rational{1, 2});
  CHECK(lev_ratio("M", "F") == Rational{1});
  CHECK(lev_ratio("2", "_") == Rational{1});
  CHECK(lev_ratio("_", "_") == Rational{0});
  CHECK_THROWS_AS(lev_ratio("", ""), hfpath::NumericError);
}

TEST_CASE("levenshtein agrees with the recursive oracle and is a metric") {
  hfpath::Rng rng(2024);
  for (int i = 0; i < 300; ++i) {
    const auto a = hfpath::oracle::random_string(rng, 10, 5);
    const auto b = hfpath::oracle::random_string(rng, 10, 5);
    const auto c = hfpath::oracle::random_string(rng, 10, 5);
    const auto ab = levenshtein(a, b);
    CHECK(ab == hfpath::oracle::levenshtein_recursive(a, b));
    CHECK(ab == levenshtein(b, a));
    CHECK((ab == 0) == (a == b));
    CHECK(levenshtein(a, c) <= ab + levenshtein(b, c));
    if (!a.empty() || !b.empty()) {
      const Rational r = lev_ratio(a, b);
      CHECK(r >= Rational{0});
      CHECK(r <= Rational{1});
    }
  }
}
