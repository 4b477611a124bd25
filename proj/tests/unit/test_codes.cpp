#include <doctest.h>

#include "hfpath/codes.hpp"
#include "hfpath/random.hpp"
#include "../oracles.hpp"

using hfpath::CodeError;
using hfpath::DiagnosisCode;
using hfpath::parse_code;

TEST_CASE("six-character code maps slots positionally") {
  const auto c = parse_code("05M092");
  CHECK(c.category() == "05");
  CHECK(c.care_type() == 'M');
  CHECK(c.counter() == "09");
  CHECK(c.severity() == '2');
  CHECK(c.render() == "05M092");
}

TEST_CASE("five-character code gets a severity placeholder") {
  const auto c = parse_code("05M09");
  CHECK(c.render() == "05M09_");
  CHECK_FALSE(c.has_severity());
  CHECK(parse_code("05m09") == c);
}

TEST_CASE("death sentinel") {
  CHECK(parse_code("Death").is_death());
  CHECK(parse_code("DEATH") == DiagnosisCode::death());
  CHECK(parse_code("death").render() == "Death");
  CHECK(DiagnosisCode::death() != parse_code("05M092"));
}

TEST_CASE("invalid length") {
  auto kind = [](const char* s) {
    try {
      parse_code(s);
    } catch (const CodeError& e) {
      return e.kind();
    }
    FAIL("no error for " << s);
    return CodeError::Kind::kInvalidCharset;
  };
  CHECK(kind("5M09") == CodeError::Kind::kInvalidLength);
  CHECK(kind("05M0921") == CodeError::Kind::kInvalidLength);
  CHECK(kind("05M0-2") == CodeError::Kind::kInvalidCharset);
  CHECK(kind("05_092") == CodeError::Kind::kInvalidCharset);
  CHECK_THROWS_AS(parse_code(""), CodeError);
}

TEST_CASE("parse(render(c)) round-trips") {
  hfpath::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto c = hfpath::oracle::random_code(rng);
    CHECK(parse_code(c.render()) == c);
  }
}
