#include <doctest.h>

#include <sstream>

#include "hfpath/error.hpp"
#include "hfpath/trajmetric.hpp"
#include "../oracles.hpp"

using namespace hfpath;

namespace {

PatientTrajectory traj(const std::string& id, std::initializer_list<const char*> codes) {
  PatientTrajectory t;
  t.patient_id = id;
  for (const char* c : codes) t.codes.push_back(parse_code(c));
  return t;
}

const WeightVector kDefault{85, 75, 55, 40};

}  // namespace

TEST_CASE("weight ordering constraint") {
  CHECK_NOTHROW(WeightVector(100, 100, 0, 0));
  CHECK_THROWS_AS(WeightVector(101, 0, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(WeightVector(10, 20, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(WeightVector(10, 5, 0, -1), std::invalid_argument);
  CHECK(WeightVector::parse("85, 75,55,40") == kDefault);
  CHECK(kDefault.sum() == 255);
}

TEST_CASE("d_icd10 hand evaluations") {
  CHECK(d_icd10(parse_code("05M092"), parse_code("05M092"), kDefault) == Rational{0});
  CHECK(d_icd10(parse_code("05M092"), parse_code("05M091"), kDefault) == Rational{40});
  // 85*(1/2) + 0 + 55*(1/2) + 0
  CHECK(d_icd10(parse_code("05M092"), parse_code("04M052"), kDefault) == Rational{70});
  // care type only
  CHECK(d_icd10(parse_code("05M092"), parse_code("05K092"), kDefault) == Rational{75});
  // placeholder severity against a digit is a full mismatch, against itself equal
  CHECK(d_icd10(parse_code("05M09"), parse_code("05M092"), kDefault) == Rational{40});
  CHECK(d_icd10(parse_code("05M09"), parse_code("05M09"), kDefault) == Rational{0});
}

TEST_CASE("Death sentinel distances") {
  const auto death = DiagnosisCode::death();
  CHECK(d_icd10(death, death, kDefault) == Rational{0});
  CHECK(d_icd10(death, parse_code("05M092"), kDefault) == Rational{255});
  CHECK(d_icd10(parse_code("23Z021"), death, kDefault) == Rational{255});
}

TEST_CASE("d_patient examples") {
  const auto a = traj("a", {"05M092"});
  const auto b = traj("b", {"05M092", "04M052"});
  CHECK(d_patient(a, a, kDefault) == Rational{0});
  CHECK(d_directed(a, b, kDefault) == Rational{0});
  CHECK(d_directed(b, a, kDefault) == Rational{70});
  CHECK(d_patient(a, b, kDefault) == Rational{35});
  CHECK_THROWS(d_patient(a, traj("e", {}), kDefault));
}

TEST_CASE("window is order sensitive") {
  // Same multiset of codes, far-apart positions: the 3-window cannot match.
  const auto a = traj("a", {"05M092", "05M092", "05M092", "04M052"});
  const auto b = traj("b", {"04M052", "05M092", "05M092", "05M092"});
  CHECK(d_patient(a, b, kDefault) > Rational{0});
  CHECK(d_patient(a, b, kDefault) == d_patient(b, a, kDefault));
}

TEST_CASE("metric properties on random pairs") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const auto a = oracle::random_trajectory(rng, "a", 8);
    const auto b = oracle::random_trajectory(rng, "b", 8);
    const auto w = oracle::random_weights(rng);
    const Rational ab = d_patient(a, b, w);
    CHECK(ab == d_patient(b, a, w));
    CHECK(d_patient(a, a, w) == Rational{0});
    CHECK(ab >= Rational{0});
    CHECK(d_patient(a, b, w.scaled_unchecked(3)) == ab * Rational{3});
    CHECK(d_patient(a, b, WeightVector(0, 0, 0, 0)) == Rational{0});
    CHECK(4 % ab.den() == 0);
  }
}

TEST_CASE("distance_matrix matches pairwise d_patient") {
  Rng rng(5);
  std::vector<PatientTrajectory> ps;
  for (int i = 0; i < 12; ++i) ps.push_back(oracle::random_trajectory(rng, "p" + std::to_string(i), 7));
  const auto w = oracle::random_weights(rng);
  const auto m = distance_matrix(ps, w);
  REQUIRE(m.size() == ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(m(i, i) == 0.0);
    for (std::size_t j = 0; j < ps.size(); ++j) {
      CHECK(m(i, j) == m(j, i));
      CHECK(m(i, j) == d_patient(ps[i], ps[j], w).to_double());
    }
  }
}

TEST_CASE("distance_matrix trivial cases and errors") {
  const auto one = std::vector{traj("x", {"05M092", "Death"})};
  CHECK(distance_matrix(one, kDefault).values() == std::vector<double>{0.0});
  const auto twins = std::vector{traj("x", {"05M092"}), traj("y", {"05M092"})};
  CHECK(distance_matrix(twins, kDefault).values() == std::vector<double>(4, 0.0));
  const auto dup = std::vector{traj("x", {"05M092"}), traj("x", {"04M052"})};
  CHECK_THROWS_AS(distance_matrix(dup, kDefault), DataError);
  const auto bad = std::vector{traj("x", {"Death", "05M092"})};
  CHECK_THROWS_AS(distance_matrix(bad, kDefault), DataError);
}

TEST_CASE("matrix exports re-import losslessly") {
  Rng rng(8);
  std::vector<PatientTrajectory> ps;
  for (int i = 0; i < 9; ++i) ps.push_back(oracle::random_trajectory(rng, "id" + std::to_string(i), 6));
  const auto m = distance_matrix(ps, oracle::random_weights(rng));

  std::stringstream csv;
  m.write_csv(csv);
  CHECK(DistanceMatrix::read_csv(csv) == m);

  std::stringstream bin;
  m.write_binary(bin);
  const auto back = DistanceMatrix::read_binary(bin);
  CHECK(back.values() == m.values());

  std::stringstream truncated(bin.str().substr(0, 20));
  CHECK_THROWS_AS(DistanceMatrix::read_binary(truncated), DataError);
}
