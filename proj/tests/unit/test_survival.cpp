#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "hfpath/error.hpp"
#include "hfpath/survival.hpp"
#include "../oracles.hpp"

using namespace hfpath;

TEST_CASE("Kaplan-Meier hand fixture") {
  const std::vector<double> t{1, 2, 3};
  const std::vector<int> e{1, 0, 1};
  const auto s = kaplan_meier(t, e);
  CHECK(s(0.0) == 1.0);
  CHECK(s(0.999) == 1.0);
  CHECK(s(1.0) == 2.0 / 3.0);
  CHECK(s(2.5) == s(1.0));
  CHECK(s(3.0) == 0.0);
  CHECK(s(100.0) == 0.0);
}

TEST_CASE("Kaplan-Meier edge cases and invariants") {
  const std::vector<double> t{5, 2, 7};
  const std::vector<int> none{0, 0, 0};
  const auto s = kaplan_meier(t, none);
  for (double x : {0.0, 2.0, 100.0}) CHECK(s(x) == 1.0);

  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 40));
    std::vector<double> times(n);
    std::vector<int> ev(n, 1);
    // Distinct integer times: empirical survivor function.
    std::iota(times.begin(), times.end(), 1.0);
    for (std::size_t i = n; i > 1; --i)
      std::swap(times[i - 1], times[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    const auto km = kaplan_meier(times, ev);
    for (std::size_t j = 0; j <= n; ++j) {
      const double expected = static_cast<double>(n - j) / static_cast<double>(n);
      CHECK(km(static_cast<double>(j) + 0.5) == doctest::Approx(expected).epsilon(1e-12));
    }
    // Permutation invariance with censoring and ties.
    std::vector<double> tt(n);
    std::vector<int> ee(n);
    for (std::size_t i = 0; i < n; ++i) {
      tt[i] = static_cast<double>(rng.uniform_int(1, 6));
      ee[i] = rng.bernoulli(0.6) ? 1 : 0;
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::vector<double> tp(n);
    std::vector<int> ep(n);
    for (std::size_t i = 0; i < n; ++i) {
      tp[i] = tt[perm[i]];
      ep[i] = ee[perm[i]];
    }
    CHECK(kaplan_meier(tt, ee) == kaplan_meier(tp, ep));
    const auto k2 = kaplan_meier(tt, ee);
    double prev = 1.0;
    for (double v : k2.values()) {
      CHECK(v <= prev);
      CHECK(v >= 0.0);
      prev = v;
    }
  }
}

TEST_CASE("Nelson-Aalen matches the direct sum") {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 30));
    std::vector<double> t(n);
    std::vector<int> e(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = static_cast<double>(rng.uniform_int(0, 8));
      e[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    const auto na = nelson_aalen(t, e);
    CHECK(na.initial() == 0.0);
    for (double x = -0.5; x < 10.0; x += 0.5)
      CHECK(na(x) == doctest::Approx(oracle::nelson_aalen_at(t, e, x)).epsilon(1e-12));
  }
}

TEST_CASE("C-index fixtures") {
  const std::vector<double> t{1, 2, 3, 4, 5};
  const std::vector<int> e{1, 1, 1, 1, 1};
  const std::vector<double> inverse{5, 4, 3, 2, 1};
  const std::vector<double> flat{1, 1, 1, 1, 1};
  CHECK(c_index(inverse, t, e) == 1.0);
  CHECK(c_index(flat, t, e) == 0.5);
  CHECK(c_index(t, t, e) == 0.0);
  const std::vector<int> censored{0, 0, 0, 0, 0};
  CHECK_THROWS_AS(c_index(inverse, t, censored), NumericError);
}

TEST_CASE("C-index properties on random data") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 60;
    std::vector<double> risk(n), neg(n), mono(n), t(n);
    std::vector<int> e(n);
    for (std::size_t i = 0; i < n; ++i) {
      risk[i] = rng.normal();
      neg[i] = -risk[i];
      mono[i] = std::exp(3.0 * risk[i]) + 7.0;
      t[i] = static_cast<double>(rng.uniform_int(1, 20));
      e[i] = rng.bernoulli(0.7) ? 1 : 0;
    }
    e[0] = 1;
    t[0] = 0.5;
    const double c = c_index(risk, t, e);
    CHECK(c == doctest::Approx(oracle::c_index_pairs(risk, t, e)).epsilon(1e-12));
    CHECK(c + c_index(neg, t, e) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c == c_index(mono, t, e));
  }
}

TEST_CASE("Cox null model") {
  const std::vector<double> t{1, 2, 2, 4, 5, 6};
  const std::vector<int> e{1, 1, 0, 1, 0, 1};
  Eigen::MatrixXd x(6, 1);
  x << 0.3, -1.0, 2.0, 0.5, -0.7, 1.1;
  const double ll0 = cox_log_partial_likelihood(x, t, e, Eigen::VectorXd::Zero(1));
  // Risk-set sizes at the event times 1, 2, 4, 6: 6, 5, 3, 1.
  CHECK(ll0 == doctest::Approx(-(std::log(6.0) + std::log(5.0) + std::log(3.0) + std::log(1.0))));
  const auto m = cox_fit(x, t, e);
  CHECK(m.null_log_partial_likelihood == doctest::Approx(ll0));
  CHECK(m.log_partial_likelihood >= ll0);
  CHECK(cox_aic(m, 1) == 2.0 - 2.0 * m.log_partial_likelihood);

  const auto null_model = cox_fit(Eigen::MatrixXd::Zero(6, 1), t, e);
  CHECK(null_model.beta(0) == 0.0);
  CHECK(null_model.log_partial_likelihood == doctest::Approx(ll0));
  CHECK(cox_aic(null_model, 1) == 2.0 - 2.0 * null_model.log_partial_likelihood);
  Eigen::MatrixXd mixed(6, 2);
  mixed.col(0) = x.col(0);
  mixed.col(1).setConstant(3.0);
  CHECK_THROWS_AS(cox_fit(mixed, t, e), NumericError);
  const std::vector<int> one_event{1, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(cox_fit(x, t, one_event), NumericError);
}

TEST_CASE("Cox detects separation") {
  const std::vector<double> t{1, 2, 3, 4, 5, 6};
  const std::vector<int> e{1, 1, 1, 1, 1, 1};
  Eigen::MatrixXd x(6, 1);
  x << 6, 5, 4, 3, 2, 1;
  CHECK_THROWS_AS(cox_fit(x, t, e), NumericError);
}

TEST_CASE("Cox recovers a known coefficient and the grid-search optimum") {
  Rng rng(24);
  const auto s = oracle::simulate_cox(rng, 500, 0.5, 300.0);
  Eigen::MatrixXd x(500, 1);
  for (std::size_t i = 0; i < 500; ++i) x(static_cast<Eigen::Index>(i), 0) = s.x[i];
  const auto m = cox_fit(x, s.times, s.events);
  CHECK(m.converged);
  CHECK(std::abs(m.beta(0) - 0.5) < 0.2);
  const double grid = oracle::grid_search_beta(s.x, s.times, s.events, -2.0, 2.0);
  CHECK(std::abs(m.beta(0) - grid) < 1e-3);
  CHECK(m.log_partial_likelihood ==
        doctest::Approx(oracle::partial_likelihood_1d(s.x, s.times, s.events, m.beta(0))).epsilon(1e-10));
  // Gradient at the optimum by central differences of the independent likelihood.
  const double h = 1e-5;
  const double g = (oracle::partial_likelihood_1d(s.x, s.times, s.events, m.beta(0) + h) -
                    oracle::partial_likelihood_1d(s.x, s.times, s.events, m.beta(0) - h)) /
                   (2 * h);
  CHECK(std::abs(g) < 1e-4);
}

TEST_CASE("feature matrix layout") {
  std::vector<SurvivalRecord> r(2);
  r[0].covariates = {1950, 2, 3, 1, 20};
  r[1].covariates = {1940, 1, 1, 0, 5};
  const auto x = feature_matrix(r);
  CHECK(x.rows() == 2);
  CHECK(x.cols() == 5);
  CHECK(x(0, 0) == 1950);
  CHECK(x(1, 4) == 5);
  FeatureOptions age;
  age.use_age = true;
  CHECK(feature_matrix(r, age)(0, 0) == 67);
  CHECK(feature_names(age).size() == 5);
}
