#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hfpath/trajmetric.hpp"

namespace hfpath {

inline constexpr std::string_view kVersion = "0.3.0";

// Invalid configuration or command-line input.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configuration key ("section.key") and the CLI flag mirroring it.
struct ConfigKey {
  std::string key;
  std::string flag;
  std::string default_value;
  std::string help;
};

const std::vector<ConfigKey>& config_keys();

using ConfigValues = std::map<std::string, std::string>;

/// Flat key/value text with [section] headers:
///
///   [metric]
///   weights = 85,75,55,40
///
/// '#' and ';' start comments. Unknown keys are rejected.
ConfigValues parse_config(std::istream& is);
ConfigValues load_config(const std::filesystem::path& path);

struct PipelineConfig {
  std::optional<std::filesystem::path> trajectories;
  std::optional<std::filesystem::path> covariates;

  std::size_t n_per_archetype = 125;
  std::size_t synth_max_len = 10;
  bool anchored = true;
  double horizon_days = 2500.0;

  std::optional<WeightVector> weights;
  std::optional<std::size_t> k;
  std::size_t tune_budget = 0;  // > 0 selects tuning of both weights and k
  std::size_t max_iter = 100;

  std::size_t min_support = 1;
  std::size_t min_len = 1;
  std::size_t max_len = 3;
  std::size_t top_k = 3;

  std::size_t positions = 10;
  std::size_t freq_top_k = 10;
  std::size_t sankey_top_k = 10;

  std::size_t trees = 100;
  std::size_t mtry = 0;
  bool use_age = false;
  int reference_year = 2017;
  double test_fraction = 0.25;

  std::uint64_t seed = 42;
  std::filesystem::path out = "hfpath_out";

  // Defaults merged with `values`; throws UsageError on bad values or when
  // tuning is combined with fixed weights or k.
  static PipelineConfig from_values(const ConfigValues& values);
  // Every key with its resolved value.
  ConfigValues echo() const;
};

// Individual stages, each writing into cfg.out.
void run_synth(const PipelineConfig& cfg);
void run_mine(const PipelineConfig& cfg);
void run_dist(const PipelineConfig& cfg);
void run_cluster(const PipelineConfig& cfg);
void run_tune(const PipelineConfig& cfg);
void run_survival(const PipelineConfig& cfg, const std::optional<std::filesystem::path>& assignments);
void run_export_sankey(const PipelineConfig& cfg, const std::filesystem::path& assignments);

/// Full pipeline: ingestion or synthesis, optional tuning, distance matrix,
/// k-medoids, pattern and frequency reports, Sankey flows, medoid profiles,
/// per-cluster survival metrics and scenario curves, manifest. Output is
/// staged in a sibling directory and moved into place only on success.
/// Returns the list of artifact file names.
std::vector<std::string> run_pipeline(const PipelineConfig& cfg);

}  // namespace hfpath
