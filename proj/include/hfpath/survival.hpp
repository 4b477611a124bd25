#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hfpath {

struct Covariates {
  int birth_year = 0;
  int sex = 1;  // 1 or 2
  int n_hospitalizations = 0;
  int shock_flag = 0;
  int total_stay_days = 0;
};

struct SurvivalRecord {
  std::string patient_id;
  Covariates covariates;
  double time = 0.0;  // observed days, min(T, C)
  int event = 0;      // 1 when death was observed
};

/// Right-continuous step function: `initial` before the first jump, then
/// values[i] on [times[i], times[i+1]).
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(double initial, std::vector<double> times, std::vector<double> values);

  double operator()(double t) const;
  double initial() const noexcept { return initial_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  double initial_ = 0.0;
  std::vector<double> times_;
  std::vector<double> values_;
};

StepFunction kaplan_meier(std::span<const double> times, std::span<const int> events);
StepFunction kaplan_meier(std::span<const SurvivalRecord> records);

// Cumulative hazard with increments d_i / n_i at each distinct event time.
StepFunction nelson_aalen(std::span<const double> times, std::span<const int> events);

/// Harrell's concordance index. A pair (i, j) is comparable when
/// T_i < T_j and i had the event; it is concordant when risk_i > risk_j and
/// counts one half on tied risks. Throws NumericError with no comparable pair.
double c_index(std::span<const double> risks, std::span<const double> times,
               std::span<const int> events);
double c_index(std::span<const double> risks, std::span<const SurvivalRecord> records);

struct FeatureOptions {
  // Replace birth year by (reference_year - birth_year).
  bool use_age = false;
  int reference_year = 2017;
};

// Columns: birth_year (or age), sex, n_hospitalizations, shock_flag, total_stay_days.
Eigen::MatrixXd feature_matrix(std::span<const SurvivalRecord> records,
                               const FeatureOptions& options = {});
std::vector<std::string> feature_names(const FeatureOptions& options = {});

struct CoxOptions {
  double gradient_tol = 1e-8;
  std::size_t max_iter = 100;
  double max_abs_beta = 50.0;
};

struct CoxModel {
  Eigen::VectorXd beta;
  Eigen::VectorXd means;  // covariate centering
  double log_partial_likelihood = 0.0;
  double null_log_partial_likelihood = 0.0;
  StepFunction baseline_cumulative_hazard;  // Breslow, at centered covariates
  std::size_t iterations = 0;
  bool converged = false;
};

/// Breslow-ties Cox proportional hazards fit by damped Newton iterations on
/// centered covariates. Throws NumericError on separation (|beta| beyond
/// max_abs_beta) or a singular information matrix.
CoxModel cox_fit(const Eigen::MatrixXd& x, std::span<const double> times,
                 std::span<const int> events, const CoxOptions& options = {});
CoxModel cox_fit(std::span<const SurvivalRecord> records, const FeatureOptions& features = {},
                 const CoxOptions& options = {});

// Breslow log partial likelihood at `beta`.
double cox_log_partial_likelihood(const Eigen::MatrixXd& x, std::span<const double> times,
                                  std::span<const int> events, const Eigen::VectorXd& beta);

// 2p - 2 logPL
double cox_aic(const CoxModel& model, std::size_t n_parameters);

}  // namespace hfpath
