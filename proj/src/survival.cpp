#include "hfpath/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hfpath/error.hpp"

namespace hfpath {
namespace {

void check_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": input lengths differ");
}

// Indices sorted by time ascending (stable, so ties keep input order).
std::vector<std::size_t> order_by_time(std::span<const double> times) {
  std::vector<std::size_t> idx(times.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  return idx;
}

struct EventTable {
  std::vector<double> times;
  std::vector<double> deaths;
  std::vector<double> at_risk;
};

// Distinct event times with death counts and risk-set sizes.
EventTable event_table(std::span<const double> times, std::span<const int> events) {
  const auto idx = order_by_time(times);
  EventTable table;
  std::size_t remaining = times.size();
  std::size_t i = 0;
  while (i < idx.size()) {
    const double t = times[idx[i]];
    std::size_t deaths = 0;
    std::size_t group = 0;
    while (i < idx.size() && times[idx[i]] == t) {
      deaths += events[idx[i]] != 0 ? 1 : 0;
      ++group;
      ++i;
    }
    if (deaths > 0) {
      table.times.push_back(t);
      table.deaths.push_back(static_cast<double>(deaths));
      table.at_risk.push_back(static_cast<double>(remaining));
    }
    remaining -= group;
  }
  return table;
}

std::vector<double> record_times(std::span<const SurvivalRecord> records) {
  std::vector<double> t;
  t.reserve(records.size());
  for (const auto& r : records) t.push_back(r.time);
  return t;
}

std::vector<int> record_events(std::span<const SurvivalRecord> records) {
  std::vector<int> e;
  e.reserve(records.size());
  for (const auto& r : records) e.push_back(r.event);
  return e;
}

// Score and information of the Breslow partial likelihood, centered design.
struct CoxState {
  double loglik = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd information;
};

CoxState cox_state(const Eigen::MatrixXd& xc, std::span<const double> times,
                   std::span<const int> events, const std::vector<std::size_t>& desc,
                   const Eigen::VectorXd& beta, bool with_derivatives) {
  const Eigen::Index p = xc.cols();
  CoxState s;
  s.gradient = Eigen::VectorXd::Zero(p);
  s.information = Eigen::MatrixXd::Zero(p, p);
  const Eigen::VectorXd eta = xc * beta;

  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);
  std::size_t i = 0;
  while (i < desc.size()) {
    const double t = times[desc[i]];
    std::size_t group_end = i;
    // The whole tie group joins the risk set before any of its events count.
    while (group_end < desc.size() && times[desc[group_end]] == t) {
      const std::size_t r = desc[group_end];
      const double w = std::exp(eta[static_cast<Eigen::Index>(r)]);
      s0 += w;
      if (with_derivatives) {
        const auto row = xc.row(static_cast<Eigen::Index>(r)).transpose();
        s1 += w * row;
        s2.noalias() += w * row * row.transpose();
      }
      ++group_end;
    }
    for (std::size_t g = i; g < group_end; ++g) {
      const std::size_t r = desc[g];
      if (events[r] == 0) continue;
      s.loglik += eta[static_cast<Eigen::Index>(r)] - std::log(s0);
      if (with_derivatives) {
        const Eigen::VectorXd mean = s1 / s0;
        s.gradient += xc.row(static_cast<Eigen::Index>(r)).transpose() - mean;
        s.information += s2 / s0 - mean * mean.transpose();
      }
    }
    i = group_end;
  }
  return s;
}

std::vector<std::size_t> order_desc(std::span<const double> times) {
  std::vector<std::size_t> idx(times.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return times[a] > times[b]; });
  return idx;
}

}  // namespace

StepFunction::StepFunction(double initial, std::vector<double> times, std::vector<double> values)
    : initial_(initial), times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size()) {
    throw std::invalid_argument("StepFunction: times and values differ in length");
  }
}

double StepFunction::operator()(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return initial_;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

StepFunction kaplan_meier(std::span<const double> times, std::span<const int> events) {
  check_aligned(times.size(), events.size(), "kaplan_meier");
  if (times.empty()) throw std::invalid_argument("kaplan_meier: no records");
  const EventTable table = event_table(times, events);
  std::vector<double> values;
  values.reserve(table.times.size());
  double s = 1.0;
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    s *= (table.at_risk[i] - table.deaths[i]) / table.at_risk[i];
    values.push_back(s);
  }
  return {1.0, table.times, std::move(values)};
}

StepFunction kaplan_meier(std::span<const SurvivalRecord> records) {
  const auto t = record_times(records);
  const auto e = record_events(records);
  return kaplan_meier(t, e);
}

StepFunction nelson_aalen(std::span<const double> times, std::span<const int> events) {
  check_aligned(times.size(), events.size(), "nelson_aalen");
  const EventTable table = event_table(times, events);
  std::vector<double> values;
  values.reserve(table.times.size());
  double h = 0.0;
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    h += table.deaths[i] / table.at_risk[i];
    values.push_back(h);
  }
  return {0.0, table.times, std::move(values)};
}

double c_index(std::span<const double> risks, std::span<const double> times,
               std::span<const int> events) {
  check_aligned(risks.size(), times.size(), "c_index");
  check_aligned(times.size(), events.size(), "c_index");
  double concordant = 0.0;
  double comparable = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (events[i] == 0) continue;
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (!(times[i] < times[j])) continue;
      comparable += 1.0;
      if (risks[i] > risks[j]) {
        concordant += 1.0;
      } else if (risks[i] == risks[j]) {
        concordant += 0.5;
      }
    }
  }
  if (comparable == 0.0) throw NumericError("c_index: no comparable pairs");
  return concordant / comparable;
}

double c_index(std::span<const double> risks, std::span<const SurvivalRecord> records) {
  const auto t = record_times(records);
  const auto e = record_events(records);
  return c_index(risks, t, e);
}

std::vector<std::string> feature_names(const FeatureOptions& options) {
  return {options.use_age ? "age" : "birth_year", "sex", "n_hospitalizations", "shock_flag",
          "total_stay_days"};
}

Eigen::MatrixXd feature_matrix(std::span<const SurvivalRecord> records,
                               const FeatureOptions& options) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(records.size()), 5);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& c = records[i].covariates;
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = options.use_age ? options.reference_year - c.birth_year : c.birth_year;
    x(r, 1) = c.sex;
    x(r, 2) = c.n_hospitalizations;
    x(r, 3) = c.shock_flag;
    x(r, 4) = c.total_stay_days;
  }
  return x;
}

double cox_log_partial_likelihood(const Eigen::MatrixXd& x, std::span<const double> times,
                                  std::span<const int> events, const Eigen::VectorXd& beta) {
  check_aligned(static_cast<std::size_t>(x.rows()), times.size(), "cox_log_partial_likelihood");
  return cox_state(x, times, events, order_desc(times), beta, false).loglik;
}

CoxModel cox_fit(const Eigen::MatrixXd& x, std::span<const double> times,
                 std::span<const int> events, const CoxOptions& options) {
  check_aligned(static_cast<std::size_t>(x.rows()), times.size(), "cox_fit");
  check_aligned(times.size(), events.size(), "cox_fit");
  const auto n_events = std::count_if(events.begin(), events.end(), [](int e) { return e != 0; });
  if (n_events < 2) throw NumericError("cox_fit: fewer than two events");

  const Eigen::Index p = x.cols();
  CoxModel model;
  model.means = x.colwise().mean().transpose();
  const Eigen::MatrixXd xc = x.rowwise() - model.means.transpose();
  const auto desc = order_desc(times);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  CoxState state = cox_state(xc, times, events, desc, beta, true);
  model.null_log_partial_likelihood = state.loglik;

  for (model.iterations = 0; model.iterations < options.max_iter; ++model.iterations) {
    if (p == 0) {
      model.converged = true;
      break;
    }
    const bool flat = state.gradient.cwiseAbs().maxCoeff() < options.gradient_tol;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(state.information);
    const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
    const bool singular = eig.eigenvalues().minCoeff() <= 1e-10 * std::max(largest, 1.0);
    if (flat && singular && model.iterations == 0) {
      // Covariates carry no information (e.g. all zero): the null model.
      model.converged = true;
      break;
    }
    if (singular) throw NumericError("cox_fit: singular information matrix (degenerate covariates)");
    Eigen::VectorXd step = state.information.ldlt().solve(state.gradient);
    // A vanishing gradient with a non-vanishing Newton step is a likelihood
    // still climbing toward infinity, not an optimum.
    if (flat && step.cwiseAbs().maxCoeff() < 1e-6) {
      model.converged = true;
      break;
    }

    // Halve the step until the likelihood does not decrease.
    CoxState next;
    Eigen::VectorXd candidate;
    int halvings = 0;
    while (true) {
      candidate = beta + step;
      next = cox_state(xc, times, events, desc, candidate, true);
      if (std::isfinite(next.loglik) && next.loglik >= state.loglik - 1e-12 * std::abs(state.loglik)) {
        break;
      }
      if (++halvings > 40) break;
      step *= 0.5;
    }
    if (!std::isfinite(next.loglik) || candidate.cwiseAbs().maxCoeff() > options.max_abs_beta) {
      throw NumericError("cox_fit: coefficients diverge (monotone likelihood / separation)");
    }
    beta = candidate;
    state = std::move(next);
  }

  model.beta = beta;
  model.log_partial_likelihood = state.loglik;

  // Breslow baseline cumulative hazard at the covariate means.
  const Eigen::VectorXd eta = xc * beta;
  std::vector<double> base_times;
  std::vector<double> base_values;
  double s0 = 0.0;
  double cumulative = 0.0;
  std::vector<double> increments;
  std::size_t i = 0;
  while (i < desc.size()) {
    const double t = times[desc[i]];
    double deaths = 0.0;
    while (i < desc.size() && times[desc[i]] == t) {
      s0 += std::exp(eta[static_cast<Eigen::Index>(desc[i])]);
      deaths += events[desc[i]] != 0 ? 1.0 : 0.0;
      ++i;
    }
    if (deaths > 0) {
      base_times.push_back(t);
      increments.push_back(deaths / s0);
    }
  }
  std::reverse(base_times.begin(), base_times.end());
  std::reverse(increments.begin(), increments.end());
  for (double inc : increments) {
    cumulative += inc;
    base_values.push_back(cumulative);
  }
  model.baseline_cumulative_hazard = StepFunction(0.0, std::move(base_times), std::move(base_values));
  return model;
}

CoxModel cox_fit(std::span<const SurvivalRecord> records, const FeatureOptions& features,
                 const CoxOptions& options) {
  const auto t = record_times(records);
  const auto e = record_events(records);
  return cox_fit(feature_matrix(records, features), t, e, options);
}

double cox_aic(const CoxModel& model, std::size_t n_parameters) {
  return 2.0 * static_cast<double>(n_parameters) - 2.0 * model.log_partial_likelihood;
}

}  // namespace hfpath
