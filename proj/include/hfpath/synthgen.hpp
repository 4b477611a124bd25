#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hfpath/codes.hpp"
#include "hfpath/survival.hpp"
#include "hfpath/trajmetric.hpp"

namespace hfpath {

struct WeightedCode {
  DiagnosisCode code;
  double weight = 1.0;
};

/// One patient archetype: how its trajectories, covariates and survival
/// times are drawn.
struct ArchetypeSpec {
  std::string id;
  std::vector<WeightedCode> code_pool;
  double stickiness = 0.5;     // probability of repeating the previous code
  double death_hazard = 0.05;  // per-stay probability of in-trajectory death

  int birth_year_min = 1920;
  int birth_year_max = 1960;
  double female_probability = 0.5;  // sex = 2
  double shock_probability = 0.1;
  double mean_stay_days = 7.0;
  double mean_gap_days = 120.0;  // between consecutive stays

  // Exponential survival: rate = base_rate * exp(b_age*age_norm + b_sex*(sex-1) + b_shock*shock)
  // with age_norm = (birth_year_max - birth_year) / (birth_year_max - birth_year_min) in [0, 1].
  double base_rate = 1.0 / 1500.0;
  double beta_age = 0.0;
  double beta_sex = 0.0;
  double beta_shock = 0.0;

  // Throws std::invalid_argument on probabilities outside [0, 1] or an empty pool.
  void validate() const;
};

struct CohortOptions {
  std::size_t n_per_archetype = 100;
  std::size_t max_len = 10;
  double horizon_days = 2500.0;  // administrative censoring
  // When set, every trajectory starts with this code.
  std::optional<DiagnosisCode> anchor;
  std::uint64_t seed = 0;
};

struct Cohort {
  std::vector<PatientTrajectory> trajectories;
  std::vector<SurvivalRecord> records;
  std::vector<std::size_t> labels;  // archetype index per patient
};

/// Draws n_per_archetype patients from each archetype, in archetype order.
///
/// Per patient: survival time T ~ Exp(rate), stays spaced by exponential
/// gaps; a stay at or beyond min(T, horizon) ends the trajectory, with Death
/// appended when T came first. Each further stay may also end in death with
/// probability death_hazard, which then sets T to that stay's time.
Cohort generate(const std::vector<ArchetypeSpec>& archetypes, const CohortOptions& options);

// Four archetypes over disjoint code categories with distinct risk levels.
std::vector<ArchetypeSpec> default_archetypes();
// The cardiac and respiratory archetypes with frequent readmissions and low
// mortality, for clustering recovery checks.
std::vector<ArchetypeSpec> two_archetypes();
// "05M09_", the heart-failure stay every anchored trajectory starts with.
DiagnosisCode hf_anchor_code();

}  // namespace hfpath
