#include <doctest.h>

#include "hfpath/synthgen.hpp"

using namespace hfpath;

namespace {

bool same(const Cohort& a, const Cohort& b) {
  if (a.labels != b.labels || a.trajectories.size() != b.trajectories.size()) return false;
  for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
    if (a.trajectories[i].patient_id != b.trajectories[i].patient_id) return false;
    if (a.trajectories[i].codes != b.trajectories[i].codes) return false;
    if (a.records[i].time != b.records[i].time || a.records[i].event != b.records[i].event) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("generation is deterministic per seed") {
  CohortOptions o;
  o.n_per_archetype = 20;
  o.seed = 5;
  const auto a = generate(default_archetypes(), o);
  CHECK(same(a, generate(default_archetypes(), o)));
  o.seed = 6;
  CHECK_FALSE(same(a, generate(default_archetypes(), o)));
  CHECK(a.trajectories.size() == 80);
  CHECK(a.trajectories.front().patient_id == "P00001");
  CHECK(a.labels.back() == 3);
}

TEST_CASE("cohort invariants") {
  CohortOptions o;
  o.n_per_archetype = 60;
  o.seed = 7;
  o.anchor = hf_anchor_code();
  const auto c = generate(default_archetypes(), o);
  for (std::size_t i = 0; i < c.trajectories.size(); ++i) {
    const auto& t = c.trajectories[i];
    const auto& r = c.records[i];
    CHECK_NOTHROW(t.validate());
    CHECK(t.codes.front() == hf_anchor_code());
    CHECK(t.codes.size() <= o.max_len + 1);
    CHECK(r.patient_id == t.patient_id);
    CHECK(r.time >= 0.0);
    CHECK(r.time <= o.horizon_days);
    if (t.died()) CHECK(r.event == 1);
    if (r.event == 0) CHECK(r.time == o.horizon_days);
    CHECK(r.covariates.n_hospitalizations == static_cast<int>(t.codes.size()) - (t.died() ? 1 : 0));
    CHECK(r.covariates.birth_year >= 1920);
    CHECK(r.covariates.birth_year <= 1960);
  }
}

TEST_CASE("certain in-stay death ends after the first stay") {
  auto specs = two_archetypes();
  for (auto& s : specs) {
    s.death_hazard = 1.0;
    s.base_rate = 1e-9;
  }
  CohortOptions o;
  o.n_per_archetype = 10;
  o.seed = 1;
  const auto c = generate(specs, o);
  for (const auto& t : c.trajectories) {
    REQUIRE(t.codes.size() == 2);
    CHECK(t.codes[1].is_death());
  }
}

TEST_CASE("archetype validation") {
  auto spec = default_archetypes()[0];
  spec.stickiness = 1.5;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = default_archetypes()[0];
  spec.code_pool.clear();
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("trajectories are closer within an archetype than across") {
  CohortOptions o;
  o.n_per_archetype = 30;
  o.seed = 2;
  const auto c = generate(two_archetypes(), o);
  const auto m = distance_matrix(c.trajectories, WeightVector::defaults());
  double within = 0, across = 0;
  std::size_t nw = 0, na = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (c.labels[i] == c.labels[j]) {
        within += m(i, j);
        ++nw;
      } else {
        across += m(i, j);
        ++na;
      }
    }
  CHECK(within / nw < across / na);
}
