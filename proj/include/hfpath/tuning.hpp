#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "hfpath/clustering.hpp"
#include "hfpath/random.hpp"
#include "hfpath/spm.hpp"
#include "hfpath/trajmetric.hpp"

namespace hfpath {

struct ScoreConfig {
  std::size_t top_patterns = 3;  // N_p
  std::size_t max_len = 3;       // pattern lengths 1..max_len
};

/// Cluster-quality score.
///
/// Per cluster and pattern length, the top `top_patterns` patterns by
/// within-cluster frequency are compared with their whole-dataset frequency;
/// the differences are averaged per length, then over the lengths that have
/// patterns, then over clusters. Frequencies are relative (count / size).
double cluster_score(const SequenceDatabase& db, std::span<const std::size_t> assignment,
                     std::size_t n_clusters, const ScoreConfig& cfg = {});
double cluster_score(const SequenceDatabase& db, const Clustering& clustering,
                     const ScoreConfig& cfg = {});

struct SearchSpace {
  int weight_max = WeightVector::kMax;
  std::size_t k_min = 2;
  std::size_t k_max = 20;
};

// Four uniform integers in [0, weight_max] sorted descending.
WeightVector sample_weights(Rng& rng, const SearchSpace& space = {});
std::size_t sample_k(Rng& rng, const SearchSpace& space = {});

struct TrialRecord {
  std::size_t trial_index = 0;
  WeightVector weights = WeightVector::defaults();
  std::size_t k = 2;
  double score = 0.0;
  std::uint64_t seed = 0;  // k-medoids seed for this trial
  double wall_ms = 0.0;
};

struct TuneOptions {
  SearchSpace space;
  ScoreConfig score;
  std::size_t max_iter = 100;
  // Called after each trial with the fitted clustering.
  std::function<void(const TrialRecord&, const Clustering&)> on_trial;
};

struct TuneResult {
  TrialRecord best;
  std::vector<TrialRecord> trials;
};

/// Seeded random search over (weights, k). Trial i draws from a stream
/// derived from (seed, i), so each trial is reproducible in isolation.
/// The best trial maximizes the score; ties go to the earliest.
TuneResult tune_search(std::span<const PatientTrajectory> patients, const SequenceDatabase& db,
                       std::size_t budget, std::uint64_t seed, const TuneOptions& options = {});

// trial_index,w1,w2,w3,w4,k,score,wall_ms
void write_trials_csv(std::ostream& os, std::span<const TrialRecord> trials);

}  // namespace hfpath
