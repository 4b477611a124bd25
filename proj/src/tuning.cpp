#include "hfpath/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <stdexcept>

#include "hfpath/text.hpp"

namespace hfpath {
namespace {

// Global relative frequency of every pattern of length 1..max_len.
std::map<Sequence, double> global_frequencies(const SequenceDatabase& db, std::size_t max_len) {
  MiningConfig cfg;
  cfg.max_len = max_len;
  std::map<Sequence, double> freq;
  const auto total = static_cast<double>(db.size());
  for (auto& p : frequent_patterns(db, cfg)) {
    freq.emplace(std::move(p.pattern), static_cast<double>(p.support) / total);
  }
  return freq;
}

}  // namespace

double cluster_score(const SequenceDatabase& db, std::span<const std::size_t> assignment,
                     std::size_t n_clusters, const ScoreConfig& cfg) {
  if (assignment.size() != db.size()) {
    throw std::invalid_argument("cluster_score: assignment size does not match database");
  }
  if (n_clusters < 1) throw std::invalid_argument("cluster_score: no clusters");
  if (cfg.top_patterns < 1) throw std::invalid_argument("cluster_score: N_p must be >= 1");

  std::vector<SequenceDatabase> members(n_clusters);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= n_clusters) throw std::invalid_argument("cluster_score: bad cluster id");
    members[assignment[i]].sequences.push_back(db.sequences[i]);
  }

  const auto global = global_frequencies(db, cfg.max_len);
  double score_sum = 0.0;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    const auto& cluster = members[c];
    if (cluster.size() == 0) {
      throw std::invalid_argument("cluster_score: cluster " + std::to_string(c) + " is empty");
    }
    const auto size = static_cast<double>(cluster.size());
    double length_mean_sum = 0.0;
    std::size_t lengths_present = 0;
    for (std::size_t len = 1; len <= cfg.max_len; ++len) {
      MiningConfig mc;
      mc.min_len = len;
      mc.max_len = len;
      mc.top_k = cfg.top_patterns;
      const auto top = frequent_patterns(cluster, mc);
      if (top.empty()) continue;
      double diff_sum = 0.0;
      for (const auto& p : top) {
        diff_sum += static_cast<double>(p.support) / size - global.at(p.pattern);
      }
      length_mean_sum += diff_sum / static_cast<double>(top.size());
      ++lengths_present;
    }
    if (lengths_present > 0) score_sum += length_mean_sum / static_cast<double>(lengths_present);
  }
  return score_sum / static_cast<double>(n_clusters);
}

double cluster_score(const SequenceDatabase& db, const Clustering& clustering,
                     const ScoreConfig& cfg) {
  return cluster_score(db, clustering.assignment, clustering.k, cfg);
}

WeightVector sample_weights(Rng& rng, const SearchSpace& space) {
  std::array<int, 4> w{};
  for (auto& x : w) x = static_cast<int>(rng.uniform_int(0, space.weight_max));
  std::sort(w.begin(), w.end(), std::greater<>());
  return WeightVector(w);
}

std::size_t sample_k(Rng& rng, const SearchSpace& space) {
  return static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(space.k_min),
                                                  static_cast<std::int64_t>(space.k_max)));
}

TuneResult tune_search(std::span<const PatientTrajectory> patients, const SequenceDatabase& db,
                       std::size_t budget, std::uint64_t seed, const TuneOptions& options) {
  if (budget < 1) throw std::invalid_argument("tune_search: budget must be >= 1");
  if (patients.size() != db.size()) {
    throw std::invalid_argument("tune_search: patients and database differ in size");
  }
  SearchSpace space = options.space;
  space.k_max = std::min(space.k_max, patients.size());
  if (space.k_min > space.k_max) {
    throw std::invalid_argument("tune_search: too few patients for the k range");
  }

  TuneResult result;
  result.trials.reserve(budget);
  for (std::size_t t = 0; t < budget; ++t) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(derive_seed(seed, t));
    TrialRecord trial;
    trial.trial_index = t;
    trial.weights = sample_weights(rng, space);
    trial.k = sample_k(rng, space);
    trial.seed = derive_seed(seed, t, 1);

    const DistanceMatrix matrix = distance_matrix(patients, trial.weights);
    const Clustering clustering = fit_kmedoids(matrix, trial.k, trial.seed, options.max_iter);
    trial.score = cluster_score(db, clustering, options.score);
    trial.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    if (options.on_trial) options.on_trial(trial, clustering);
    result.trials.push_back(trial);
  }
  result.best = *std::max_element(
      result.trials.begin(), result.trials.end(),
      [](const TrialRecord& a, const TrialRecord& b) { return a.score < b.score; });
  return result;
}

void write_trials_csv(std::ostream& os, std::span<const TrialRecord> trials) {
  os << "trial_index,w1,w2,w3,w4,k,score,wall_ms\n";
  for (const auto& t : trials) {
    os << t.trial_index << ',' << t.weights[0] << ',' << t.weights[1] << ',' << t.weights[2]
       << ',' << t.weights[3] << ',' << t.k << ',' << format_double(t.score) << ','
       << format_fixed(t.wall_ms, 3) << '\n';
  }
}

}  // namespace hfpath
