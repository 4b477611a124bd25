#include <doctest.h>

#include "hfpath/survival_forest.hpp"
#include "hfpath/synthgen.hpp"
#include "../oracles.hpp"

using namespace hfpath;

namespace {

struct Data {
  Eigen::MatrixXd x;
  std::vector<double> t;
  std::vector<int> e;
};

Data strong_signal(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  Data d;
  d.x.resize(static_cast<Eigen::Index>(n), 3);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    d.x(r, 0) = rng.normal();
    d.x(r, 1) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    d.x(r, 2) = rng.normal();
    const double rate = 0.01 * std::exp(1.2 * d.x(r, 0) + 0.8 * d.x(r, 1));
    const double t = rng.exponential(rate);
    const double c = 250.0;
    d.t.push_back(std::round(std::min(t, c)));
    d.e.push_back(t <= c ? 1 : 0);
  }
  return d;
}

}  // namespace

TEST_CASE("log-rank statistic") {
  const std::vector<double> t{1, 2, 3, 4};
  const std::vector<int> e{1, 1, 1, 1};
  const std::vector<char> none{0, 0, 0, 0};
  CHECK(log_rank_statistic(t, e, none) == 0.0);
  const std::vector<double> same{3, 3, 3, 3};
  const std::vector<char> half{1, 1, 0, 0};
  CHECK(log_rank_statistic(same, e, half) == 0.0);
  // Early deaths on the left: positive separation.
  CHECK(log_rank_statistic(t, e, half) > 1.0);
  const std::vector<char> swapped{0, 0, 1, 1};
  CHECK(log_rank_statistic(t, e, swapped) == doctest::Approx(log_rank_statistic(t, e, half)));
}

TEST_CASE("forest fit is deterministic per seed") {
  const auto d = strong_signal(1, 150);
  ForestParams p;
  p.n_estimators = 8;
  p.seed = 17;
  const auto a = SurvivalForest::fit(d.x, d.t, d.e, p);
  const auto b = SurvivalForest::fit(d.x, d.t, d.e, p);
  CHECK(a.serialize() == b.serialize());
  p.seed = 18;
  CHECK(SurvivalForest::fit(d.x, d.t, d.e, p).serialize() != a.serialize());
}

TEST_CASE("forest structure invariants") {
  const auto d = strong_signal(2, 200);
  ForestParams p;
  p.n_estimators = 6;
  p.seed = 3;
  const auto f = SurvivalForest::fit(d.x, d.t, d.e, p);
  CHECK(f.trees().size() == 6);
  for (const auto& tree : f.trees()) {
    CHECK(tree.bootstrap.size() == 200);
    for (const auto& node : tree.nodes)
      if (node.feature < 0) CHECK(node.n_samples >= p.min_samples_leaf);
    for (const auto& leaf : tree.leaves) {
      double prev = leaf.initial();
      for (double v : leaf.values()) {
        CHECK(v >= prev);
        prev = v;
      }
    }
  }
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd row = d.x.row(i);
    const auto pred = f.predict(std::span<const double>(row.data(), 3));
    CHECK(pred.survival.initial() == 1.0);
    CHECK(pred.survival(-1.0) == 1.0);
    double prev = 0.0;
    for (double v : pred.cumulative_hazard.values()) {
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("single-leaf forest reproduces the training Nelson-Aalen curve") {
  const auto d = strong_signal(4, 60);
  ForestParams p;
  p.n_estimators = 3;
  p.min_samples_leaf = 60;
  p.bootstrap = false;
  const auto f = SurvivalForest::fit(d.x, d.t, d.e, p);
  const auto na = nelson_aalen(d.t, d.e);
  for (int i = 0; i < 5; ++i) {
    const Eigen::VectorXd row = d.x.row(i);
    const auto pred = f.predict(std::span<const double>(row.data(), 3));
    for (double s : f.event_times()) CHECK(pred.cumulative_hazard(s) == doctest::Approx(na(s)).epsilon(1e-12));
  }
}

TEST_CASE("ensemble hazard is the mean of per-tree hazards") {
  const auto d = strong_signal(5, 120);
  ForestParams p;
  p.n_estimators = 2;
  p.seed = 9;
  const auto f = SurvivalForest::fit(d.x, d.t, d.e, p);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd row = d.x.row(i);
    const std::span<const double> xs(row.data(), 3);
    const auto pred = f.predict(xs);
    for (double s : f.event_times()) {
      double mean = 0.0;
      for (const auto& tree : f.trees()) mean += tree.leaves[tree.leaf_for(xs)](s);
      mean /= 2.0;
      CHECK(pred.cumulative_hazard(s) == doctest::Approx(mean).epsilon(1e-12));
    }
  }
}

TEST_CASE("forest ranks held-out records") {
  const auto d = strong_signal(6, 500);
  const Eigen::Index n_train = 375;
  ForestParams p;
  p.n_estimators = 30;
  p.seed = 1;
  const auto f = SurvivalForest::fit(d.x.topRows(n_train), std::span(d.t).first(375), std::span(d.e).first(375), p);
  const auto risk = f.predict_risk(d.x.bottomRows(125));
  const std::vector<double> tt(d.t.begin() + 375, d.t.end());
  const std::vector<int> ee(d.e.begin() + 375, d.e.end());
  CHECK(c_index(risk, tt, ee) >= 0.65);
}

TEST_CASE("fit rejects too few records") {
  const auto d = strong_signal(7, 5);
  CHECK_THROWS_AS(SurvivalForest::fit(d.x, d.t, d.e, ForestParams{}), std::invalid_argument);
}

TEST_CASE("scenario curves") {
  const auto d = strong_signal(8, 200);
  ForestParams p;
  p.n_estimators = 10;
  p.seed = 2;
  const auto f = SurvivalForest::fit(d.x, d.t, d.e, p);
  Eigen::MatrixXd same(3, 3);
  same.rowwise() = d.x.row(0);
  const auto s = scenario_curves(f, same);
  CHECK(s.best == s.worst);
  CHECK(s.best_index == 0);

  Eigen::MatrixXd mixed(2, 3);
  mixed << 2.0, 1.0, 0.0, -2.0, 0.0, 0.0;
  const auto m = scenario_curves(f, mixed);
  CHECK(m.best_index == 1);
  CHECK(m.worst_index == 0);
  CHECK(m.best_area >= m.worst_area);
  CHECK(survival_area(StepFunction(1.0, {}, {})) == 0.0);
  CHECK(survival_area(StepFunction(1.0, {2.0}, {0.0})) == doctest::Approx(1.0));
}
