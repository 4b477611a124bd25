#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hfpath/survival.hpp"

namespace hfpath {

struct ForestParams {
  std::size_t n_estimators = 100;
  std::size_t min_samples_split = 10;
  std::size_t min_samples_leaf = 15;
  std::size_t mtry = 0;  // 0 selects ceil(sqrt(feature count))
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

// Standardized two-sample log-rank statistic |Z| between the records with
// in_left[i] set and the rest. Zero when the variance vanishes.
double log_rank_statistic(std::span<const double> times, std::span<const int> events,
                          std::span<const char> in_left);

struct SurvivalPrediction {
  StepFunction cumulative_hazard;
  StepFunction survival;
  double risk = 0.0;
};

class SurvivalForest {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t leaf = -1;  // index into Tree::leaves
    std::uint32_t n_samples = 0;
  };

  struct Tree {
    std::vector<std::size_t> bootstrap;  // in-bag record indices
    std::vector<Node> nodes;             // nodes[0] is the root
    std::vector<StepFunction> leaves;    // Nelson-Aalen per leaf

    std::size_t leaf_for(std::span<const double> x) const;
  };

  // Throws std::invalid_argument when there are fewer records than
  // min_samples_split.
  static SurvivalForest fit(const Eigen::MatrixXd& x, std::span<const double> times,
                            std::span<const int> events, const ForestParams& params);

  // Ensemble cumulative hazard averaged over trees on the training
  // event-time grid; risk is that hazard summed over the grid.
  SurvivalPrediction predict(std::span<const double> x) const;
  std::vector<double> predict_risk(const Eigen::MatrixXd& x) const;

  const std::vector<Tree>& trees() const noexcept { return trees_; }
  const std::vector<double>& event_times() const noexcept { return grid_; }
  const ForestParams& params() const noexcept { return params_; }
  std::size_t n_features() const noexcept { return n_features_; }

  // Deterministic byte encoding of the fitted structure.
  std::string serialize() const;

 private:
  ForestParams params_;
  std::size_t n_features_ = 0;
  std::vector<double> grid_;
  std::vector<Tree> trees_;
  // Leaf hazards evaluated on grid_, per tree and leaf.
  std::vector<std::vector<std::vector<double>>> leaf_grid_;
};

inline SurvivalForest rsf_fit(const Eigen::MatrixXd& x, std::span<const double> times,
                              std::span<const int> events, const ForestParams& params) {
  return SurvivalForest::fit(x, times, events, params);
}

inline SurvivalPrediction rsf_predict(const SurvivalForest& forest, std::span<const double> x) {
  return forest.predict(x);
}

struct ScenarioCurves {
  StepFunction best;
  StepFunction worst;
  std::size_t best_index = 0;
  std::size_t worst_index = 0;
  double best_area = 0.0;
  double worst_area = 0.0;
};

// Area under a survival curve by trapezoids over (0, 1) and its jump grid.
double survival_area(const StepFunction& survival);

// Most and least favourable predicted survival among cluster members,
// ranked by area under the curve; ties go to the lowest row index.
ScenarioCurves scenario_curves(const SurvivalForest& forest, const Eigen::MatrixXd& cluster_x);

}  // namespace hfpath
