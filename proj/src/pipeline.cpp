#include "hfpath/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "hfpath/clustering.hpp"
#include "hfpath/dataset.hpp"
#include "hfpath/error.hpp"
#include "hfpath/random.hpp"
#include "hfpath/reports.hpp"
#include "hfpath/survival.hpp"
#include "hfpath/survival_forest.hpp"
#include "hfpath/synthgen.hpp"
#include "hfpath/text.hpp"
#include "hfpath/tuning.hpp"

namespace fs = std::filesystem;

namespace hfpath {
namespace {

// Seed streams derived from the master seed, one per stage.
enum Stream : std::uint64_t { kSynth = 1, kTune = 2, kCluster = 3, kSplit = 4, kForest = 5 };

const double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs `body`, re-throwing failures with the stage name prefixed while
// keeping the exception category (it selects the CLI exit code).
template <typename F>
auto stage(const std::string& name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const CodeError& e) {
    throw DataError("stage '" + name + "': " + e.what());
  } catch (const DataError& e) {
    throw DataError("stage '" + name + "': " + e.what());
  } catch (const NumericError& e) {
    throw NumericError("stage '" + name + "': " + e.what());
  } catch (const UsageError& e) {
    throw UsageError("stage '" + name + "': " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError("stage '" + name + "': " + e.what());
  }
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir_ / name).string());
    body(out);
    if (!out) throw DataError("write failed for " + (dir_ / name).string());
    names_.push_back(name);
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("invalid boolean for " + key + ": '" + v + "'");
}

template <typename T>
T parse_number(const std::string& v, const std::string& key) {
  try {
    if constexpr (std::is_floating_point_v<T>) {
      return static_cast<T>(parse_double(v, key));
    } else {
      return parse_int<T>(v, key);
    }
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

Dataset synthesize(const PipelineConfig& cfg) {
  CohortOptions opts;
  opts.n_per_archetype = cfg.n_per_archetype;
  opts.max_len = cfg.synth_max_len;
  opts.horizon_days = cfg.horizon_days;
  if (cfg.anchored) opts.anchor = hf_anchor_code();
  opts.seed = derive_seed(cfg.seed, kSynth);
  Cohort cohort = generate(default_archetypes(), opts);
  return {std::move(cohort.trajectories), std::move(cohort.records)};
}

std::vector<PatientTrajectory> require_trajectories(const PipelineConfig& cfg) {
  if (!cfg.trajectories) throw UsageError("--trajectories is required");
  return stage("ingestion", [&] { return load_trajectories(*cfg.trajectories); });
}

Dataset require_dataset(const PipelineConfig& cfg) {
  if (!cfg.trajectories || !cfg.covariates) {
    throw UsageError("--trajectories and --covariates are required");
  }
  return stage("ingestion", [&] { return load_dataset(*cfg.trajectories, *cfg.covariates); });
}

WeightVector fixed_weights(const PipelineConfig& cfg) {
  return cfg.weights.value_or(WeightVector::defaults());
}

void write_matrix(ArtifactWriter& w, const DistanceMatrix& m) {
  w.text("distance_matrix.csv", [&](std::ostream& os) { m.write_csv(os); });
  w.text("distance_matrix.bin", [&](std::ostream& os) { m.write_binary(os); });
}

void write_profiles(ArtifactWriter& w, const std::vector<PatientTrajectory>& patients,
                    const Clustering& c, const WeightVector& weights) {
  w.text("medoid_profiles.csv", [&](std::ostream& os) {
    os << "patient_id,cluster_id,position,code,distance\n";
    for (std::size_t p = 0; p < patients.size(); ++p) {
      const auto& medoid = patients[c.medoids[c.assignment[p]]];
      const auto profile = medoid_profile(patients[p], medoid, weights);
      for (std::size_t i = 0; i < profile.size(); ++i) {
        os << csv_field(patients[p].patient_id) << ',' << c.assignment[p] << ',' << i << ','
           << patients[p].codes[i].render() << ',' << format_double(profile[i].to_double()) << '\n';
      }
    }
  });
}

std::vector<std::vector<std::size_t>> members_by_cluster(std::span<const std::size_t> assignment,
                                                         std::size_t n_clusters) {
  std::vector<std::vector<std::size_t>> members(n_clusters);
  for (std::size_t i = 0; i < assignment.size(); ++i) members[assignment[i]].push_back(i);
  return members;
}

template <typename T>
std::vector<T> pick(const std::vector<T>& all, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

struct ClusterMetrics {
  double aic = kNaN;
  double c_index = kNaN;
  std::optional<ScenarioCurves> scenarios;
};

// Cox AIC on the whole cluster; forest C-index on a seeded holdout.
// Fits that are undefined for the cluster (too few records or events,
// degenerate covariates) are reported as NA.
ClusterMetrics evaluate_cluster(const std::vector<SurvivalRecord>& records,
                                const PipelineConfig& cfg, std::size_t cluster) {
  ClusterMetrics m;
  FeatureOptions features;
  features.use_age = cfg.use_age;
  features.reference_year = cfg.reference_year;
  const Eigen::MatrixXd x = feature_matrix(records, features);
  std::vector<double> times;
  std::vector<int> events;
  for (const auto& r : records) {
    times.push_back(r.time);
    events.push_back(r.event);
  }

  std::vector<Eigen::Index> varying;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (x.rows() > 0 && (x.col(j).array() != x(0, j)).any()) varying.push_back(j);
  }
  if (!varying.empty()) {
    Eigen::MatrixXd xv(x.rows(), static_cast<Eigen::Index>(varying.size()));
    for (std::size_t j = 0; j < varying.size(); ++j) xv.col(static_cast<Eigen::Index>(j)) = x.col(varying[j]);
    try {
      const CoxModel cox = cox_fit(xv, times, events);
      m.aic = cox_aic(cox, varying.size());
    } catch (const NumericError&) {
    }
  }

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(cfg.seed, kSplit, cluster));
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
    std::swap(order[i - 1], order[j]);
  }
  const auto n_test = static_cast<std::size_t>(std::ceil(cfg.test_fraction * static_cast<double>(order.size())));
  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());

  ForestParams params;
  params.n_estimators = cfg.trees;
  params.mtry = cfg.mtry;
  params.seed = derive_seed(cfg.seed, kForest, cluster);
  if (train.size() < params.min_samples_split) return m;

  auto rows = [&](const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
    return out;
  };
  const SurvivalForest forest =
      SurvivalForest::fit(rows(train), pick(times, train), pick(events, train), params);
  if (!test.empty()) {
    const auto risks = forest.predict_risk(rows(test));
    try {
      m.c_index = c_index(risks, pick(times, test), pick(events, test));
    } catch (const NumericError&) {
    }
  }
  m.scenarios = scenario_curves(forest, x);
  return m;
}

void write_survival(ArtifactWriter& w, const std::vector<SurvivalRecord>& records,
                    std::span<const std::size_t> assignment, std::size_t n_clusters,
                    const PipelineConfig& cfg) {
  const auto members = members_by_cluster(assignment, n_clusters);
  std::vector<ClusterMetrics> metrics;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    metrics.push_back(evaluate_cluster(pick(records, members[c]), cfg, c));
  }
  w.text("metrics.csv", [&](std::ostream& os) {
    os << "cluster,AIC,C-index\n";
    for (std::size_t c = 0; c < n_clusters; ++c) {
      os << c << ',' << format_fixed(metrics[c].aic, 3) << ',' << format_fixed(metrics[c].c_index, 6)
         << '\n';
    }
  });
  w.text("scenarios.csv", [&](std::ostream& os) {
    os << "cluster,scenario,patient_id,time,survival\n";
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (!metrics[c].scenarios) continue;
      const auto& s = *metrics[c].scenarios;
      auto emit = [&](const char* name, const StepFunction& f, std::size_t local) {
        const std::string& id = records[members[c][local]].patient_id;
        os << c << ',' << name << ',' << csv_field(id) << ",0," << format_double(f.initial()) << '\n';
        for (std::size_t i = 0; i < f.times().size(); ++i) {
          os << c << ',' << name << ',' << csv_field(id) << ',' << format_double(f.times()[i]) << ','
             << format_double(f.values()[i]) << '\n';
        }
      };
      emit("best", s.best, s.best_index);
      emit("worst", s.worst, s.worst_index);
    }
  });
}

void write_sankey(ArtifactWriter& w, const std::vector<PatientTrajectory>& trajectories,
                  std::span<const std::size_t> assignment, std::size_t n_clusters,
                  std::size_t top_k, const std::vector<char>& include) {
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 1}, {1, 2}};
  for (std::size_t c = 0; c < n_clusters; ++c) {
    std::vector<PatientTrajectory> cluster;
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
      if (assignment[i] == c && include[i]) cluster.push_back(trajectories[i]);
    }
    const auto flows = sankey_export(cluster, pairs, top_k);
    const std::string label = "cluster_" + std::to_string(c);
    w.text("sankey_" + label + ".json", [&](std::ostream& os) { os << sankey_json(flows, label); });
  }
}

std::vector<std::size_t> assignment_from_file(const fs::path& path,
                                              const std::vector<PatientTrajectory>& trajectories,
                                              std::size_t& n_clusters) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  const auto map = read_assignments(in);
  std::vector<std::size_t> out;
  n_clusters = 0;
  for (const auto& t : trajectories) {
    auto it = map.find(t.patient_id);
    if (it == map.end()) throw DataError("assignments: no cluster for patient " + t.patient_id);
    out.push_back(it->second);
    n_clusters = std::max(n_clusters, it->second + 1);
  }
  return out;
}

PatternReportOptions pattern_options(const PipelineConfig& cfg) {
  return {cfg.min_support, cfg.min_len, cfg.max_len, cfg.top_k};
}

void prepare_out(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"input.trajectories", "--trajectories", "", "trajectory CSV (patient_id,seq_index,code)"},
      {"input.covariates", "--covariates", "", "covariate CSV"},
      {"synth.n_per_archetype", "--n-per-archetype", "125", "synthetic patients per archetype"},
      {"synth.max_len", "--max-len", "10", "maximum synthetic stays per patient"},
      {"synth.anchored", "--anchored", "true", "start synthetic trajectories with the HF code"},
      {"synth.horizon_days", "--horizon", "2500", "administrative censoring horizon (days)"},
      {"metric.weights", "--weights", "", "fixed weights w1,w2,w3,w4 (default 85,75,55,40)"},
      {"tune.budget", "--tune-budget", "0", "random-search trials; > 0 tunes weights and k"},
      {"cluster.k", "--k", "", "fixed cluster count (default 5)"},
      {"cluster.max_iter", "--max-iter", "100", "k-medoids sweep limit"},
      {"mining.min_support", "--min-support", "1", "minimum pattern support"},
      {"mining.min_len", "--min-len", "1", "minimum pattern length"},
      {"mining.max_len", "--max-pattern-len", "3", "maximum pattern length"},
      {"mining.top_k", "--top-k", "3", "patterns reported per length (Sankey edges for export-sankey)"},
      {"report.positions", "--positions", "10", "frequency-table positions"},
      {"report.freq_top_k", "--freq-top-k", "10", "codes kept per frequency-table position"},
      {"report.sankey_top_k", "--sankey-top-k", "10", "edges kept per Sankey position pair"},
      {"survival.trees", "--trees", "100", "trees per survival forest"},
      {"survival.mtry", "--mtry", "0", "features tried per split (0 = ceil(sqrt(p)))"},
      {"survival.use_age", "--use-age", "false", "use age at reference year instead of birth year"},
      {"survival.reference_year", "--reference-year", "2017", "reference year for age"},
      {"survival.test_fraction", "--test-fraction", "0.25", "holdout share for the C-index"},
      {"run.seed", "--seed", "42", "master seed"},
      {"run.out", "--out", "hfpath_out", "output directory"},
  };
  return keys;
}

ConfigValues parse_config(std::istream& is) {
  ConfigValues values;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view v = line;
    if (const auto hash = v.find_first_of("#;"); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    if (v.front() == '[') {
      if (v.back() != ']') throw UsageError("config line " + std::to_string(line_no) + ": bad section header");
      section = std::string(trim(v.substr(1, v.size() - 2)));
      continue;
    }
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = (section.empty() ? "" : section + ".") + std::string(trim(v.substr(0, eq)));
    const bool known = std::any_of(config_keys().begin(), config_keys().end(),
                                   [&](const ConfigKey& k) { return k.key == key; });
    if (!known) throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    values[key] = std::string(trim(v.substr(eq + 1)));
  }
  return values;
}

ConfigValues load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  return parse_config(in);
}

PipelineConfig PipelineConfig::from_values(const ConfigValues& values) {
  ConfigValues v;
  for (const auto& k : config_keys()) v[k.key] = k.default_value;
  for (const auto& [key, value] : values) {
    if (!v.count(key)) throw UsageError("unknown configuration key '" + key + "'");
    v[key] = value;
  }

  PipelineConfig cfg;
  if (!v["input.trajectories"].empty()) cfg.trajectories = v["input.trajectories"];
  if (!v["input.covariates"].empty()) cfg.covariates = v["input.covariates"];
  cfg.n_per_archetype = parse_number<std::size_t>(v["synth.n_per_archetype"], "synth.n_per_archetype");
  cfg.synth_max_len = parse_number<std::size_t>(v["synth.max_len"], "synth.max_len");
  cfg.anchored = parse_bool(v["synth.anchored"], "synth.anchored");
  cfg.horizon_days = parse_number<double>(v["synth.horizon_days"], "synth.horizon_days");
  if (!v["metric.weights"].empty()) {
    try {
      cfg.weights = WeightVector::parse(v["metric.weights"]);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  cfg.tune_budget = parse_number<std::size_t>(v["tune.budget"], "tune.budget");
  if (!v["cluster.k"].empty()) cfg.k = parse_number<std::size_t>(v["cluster.k"], "cluster.k");
  cfg.max_iter = parse_number<std::size_t>(v["cluster.max_iter"], "cluster.max_iter");
  cfg.min_support = parse_number<std::size_t>(v["mining.min_support"], "mining.min_support");
  cfg.min_len = parse_number<std::size_t>(v["mining.min_len"], "mining.min_len");
  cfg.max_len = parse_number<std::size_t>(v["mining.max_len"], "mining.max_len");
  cfg.top_k = parse_number<std::size_t>(v["mining.top_k"], "mining.top_k");
  cfg.positions = parse_number<std::size_t>(v["report.positions"], "report.positions");
  cfg.freq_top_k = parse_number<std::size_t>(v["report.freq_top_k"], "report.freq_top_k");
  cfg.sankey_top_k = parse_number<std::size_t>(v["report.sankey_top_k"], "report.sankey_top_k");
  cfg.trees = parse_number<std::size_t>(v["survival.trees"], "survival.trees");
  cfg.mtry = parse_number<std::size_t>(v["survival.mtry"], "survival.mtry");
  cfg.use_age = parse_bool(v["survival.use_age"], "survival.use_age");
  cfg.reference_year = parse_number<int>(v["survival.reference_year"], "survival.reference_year");
  cfg.test_fraction = parse_number<double>(v["survival.test_fraction"], "survival.test_fraction");
  cfg.seed = parse_number<std::uint64_t>(v["run.seed"], "run.seed");
  cfg.out = v["run.out"];

  if (cfg.tune_budget > 0 && (cfg.weights || cfg.k)) {
    throw UsageError("tuning (tune.budget > 0) excludes fixed metric.weights and cluster.k");
  }
  if (cfg.k && *cfg.k < 1) throw UsageError("cluster.k must be >= 1");
  if (cfg.min_support < 1) throw UsageError("mining.min_support must be >= 1");
  if (cfg.min_len < 1 || cfg.min_len > cfg.max_len) {
    throw UsageError("mining lengths must satisfy 1 <= min_len <= max_len");
  }
  if (cfg.positions < 1) throw UsageError("report.positions must be >= 1");
  if (cfg.trees < 1) throw UsageError("survival.trees must be >= 1");
  if (cfg.max_iter < 1) throw UsageError("cluster.max_iter must be >= 1");
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
    throw UsageError("survival.test_fraction must be in (0, 1)");
  }
  return cfg;
}

ConfigValues PipelineConfig::echo() const {
  ConfigValues v;
  v["input.trajectories"] = trajectories ? trajectories->string() : "";
  v["input.covariates"] = covariates ? covariates->string() : "";
  v["synth.n_per_archetype"] = std::to_string(n_per_archetype);
  v["synth.max_len"] = std::to_string(synth_max_len);
  v["synth.anchored"] = anchored ? "true" : "false";
  v["synth.horizon_days"] = format_double(horizon_days);
  v["metric.weights"] = weights ? weights->to_string() : "";
  v["tune.budget"] = std::to_string(tune_budget);
  v["cluster.k"] = k ? std::to_string(*k) : "";
  v["cluster.max_iter"] = std::to_string(max_iter);
  v["mining.min_support"] = std::to_string(min_support);
  v["mining.min_len"] = std::to_string(min_len);
  v["mining.max_len"] = std::to_string(max_len);
  v["mining.top_k"] = std::to_string(top_k);
  v["report.positions"] = std::to_string(positions);
  v["report.freq_top_k"] = std::to_string(freq_top_k);
  v["report.sankey_top_k"] = std::to_string(sankey_top_k);
  v["survival.trees"] = std::to_string(trees);
  v["survival.mtry"] = std::to_string(mtry);
  v["survival.use_age"] = use_age ? "true" : "false";
  v["survival.reference_year"] = std::to_string(reference_year);
  v["survival.test_fraction"] = format_double(test_fraction);
  v["run.seed"] = std::to_string(seed);
  v["run.out"] = out.string();
  return v;
}

void run_synth(const PipelineConfig& cfg) {
  prepare_out(cfg.out);
  ArtifactWriter w(cfg.out);
  CohortOptions opts;
  opts.n_per_archetype = cfg.n_per_archetype;
  opts.max_len = cfg.synth_max_len;
  opts.horizon_days = cfg.horizon_days;
  if (cfg.anchored) opts.anchor = hf_anchor_code();
  opts.seed = derive_seed(cfg.seed, kSynth);
  const Cohort cohort = stage("synthesis", [&] { return generate(default_archetypes(), opts); });
  w.text("trajectories.csv", [&](std::ostream& os) { write_trajectories(os, cohort.trajectories); });
  w.text("covariates.csv", [&](std::ostream& os) { write_covariates(os, cohort.records); });
  w.text("labels.csv", [&](std::ostream& os) {
    os << "patient_id,archetype\n";
    for (std::size_t i = 0; i < cohort.labels.size(); ++i) {
      os << csv_field(cohort.trajectories[i].patient_id) << ',' << cohort.labels[i] << '\n';
    }
  });
}

void run_mine(const PipelineConfig& cfg) {
  const auto trajectories = require_trajectories(cfg);
  prepare_out(cfg.out);
  ArtifactWriter w(cfg.out);
  const SequenceDatabase db = to_database(trajectories);
  w.text("patterns.csv", [&](std::ostream& os) {
    os << "label,length,rank,count,freq,pattern\n";
    stage("mining", [&] { write_pattern_rows(os, db, "global", pattern_options(cfg)); });
  });
}

void run_dist(const PipelineConfig& cfg) {
  const auto trajectories = require_trajectories(cfg);
  prepare_out(cfg.out);
  ArtifactWriter w(cfg.out);
  const auto m = stage("distance", [&] { return distance_matrix(trajectories, fixed_weights(cfg)); });
  write_matrix(w, m);
}

void run_cluster(const PipelineConfig& cfg) {
  const auto trajectories = require_trajectories(cfg);
  prepare_out(cfg.out);
  ArtifactWriter w(cfg.out);
  const WeightVector weights = fixed_weights(cfg);
  const auto m = stage("distance", [&] { return distance_matrix(trajectories, weights); });
  const auto c = stage("clustering", [&] {
    return fit_kmedoids(m, cfg.k.value_or(5), derive_seed(cfg.seed, kCluster), cfg.max_iter);
  });
  w.text("assignments.csv", [&](std::ostream& os) { write_assignments_csv(os, c, m.ids()); });
  write_profiles(w, trajectories, c, weights);
}

void run_tune(const PipelineConfig& cfg) {
  const auto trajectories = require_trajectories(cfg);
  prepare_out(cfg.out);
  ArtifactWriter w(cfg.out);
  const SequenceDatabase db = to_database(trajectories);
  TuneOptions options;
  options.max_iter = cfg.max_iter;
  const std::size_t budget = cfg.tune_budget > 0 ? cfg.tune_budget : 20;
  const auto result = stage("tuning", [&] {
    return tune_search(trajectories, db, budget, derive_seed(cfg.seed, kTune), options);
  });
  w.text("trials.csv", [&](std::ostream& os) { write_trials_csv(os, result.trials); });
  w.text("best.json", [&](std::ostream& os) {
    nlohmann::ordered_json j;
    j["trial_index"] = result.best.trial_index;
    j["weights"] = result.best.weights.values();
    j["k"] = result.best.k;
    j["score"] = result.best.score;
    os << j.dump(2) << '\n';
  });
}

void run_survival(const PipelineConfig& cfg, const std::optional<fs::path>& assignments) {
  const Dataset data = require_dataset(cfg);
  prepare_out(cfg.out);
  ArtifactWriter w(cfg.out);
  std::size_t n_clusters = 1;
  std::vector<std::size_t> assignment(data.trajectories.size(), 0);
  if (assignments) {
    assignment = stage("ingestion", [&] { return assignment_from_file(*assignments, data.trajectories, n_clusters); });
  }
  stage("survival", [&] { write_survival(w, data.records, assignment, n_clusters, cfg); });
}

void run_export_sankey(const PipelineConfig& cfg, const fs::path& assignments) {
  const auto trajectories = require_trajectories(cfg);
  std::vector<char> include(trajectories.size(), 1);
  if (cfg.covariates) {
    const Dataset data = require_dataset(cfg);
    for (std::size_t i = 0; i < data.records.size(); ++i) include[i] = data.records[i].event == 1;
  }
  std::size_t n_clusters = 0;
  const auto assignment =
      stage("ingestion", [&] { return assignment_from_file(assignments, trajectories, n_clusters); });
  prepare_out(cfg.out);
  ArtifactWriter w(cfg.out);
  write_sankey(w, trajectories, assignment, n_clusters, cfg.top_k, include);
}

std::vector<std::string> run_pipeline(const PipelineConfig& cfg) {
  const fs::path out = cfg.out;
  const fs::path staging = out.parent_path() / (out.filename().string() + ".partial");
  std::error_code ec;
  fs::remove_all(staging, ec);
  prepare_out(staging);

  try {
    ArtifactWriter w(staging);

    // Synthetic cohorts go through the same CSV ingestion path as real data.
    fs::path trajectory_csv;
    fs::path covariate_csv;
    if (cfg.trajectories) {
      if (!cfg.covariates) throw UsageError("--covariates is required with --trajectories");
      trajectory_csv = *cfg.trajectories;
      covariate_csv = *cfg.covariates;
    } else {
      const Dataset synth = stage("synthesis", [&] { return synthesize(cfg); });
      w.text("trajectories.csv", [&](std::ostream& os) { write_trajectories(os, synth.trajectories); });
      w.text("covariates.csv", [&](std::ostream& os) { write_covariates(os, synth.records); });
      trajectory_csv = staging / "trajectories.csv";
      covariate_csv = staging / "covariates.csv";
    }
    const Dataset data = stage("ingestion", [&] { return load_dataset(trajectory_csv, covariate_csv); });
    const SequenceDatabase db = to_database(data.trajectories);

    WeightVector weights = fixed_weights(cfg);
    std::size_t k = cfg.k.value_or(5);
    if (cfg.tune_budget > 0) {
      TuneOptions options;
      options.max_iter = cfg.max_iter;
      const auto tuned = stage("tuning", [&] {
        return tune_search(data.trajectories, db, cfg.tune_budget, derive_seed(cfg.seed, kTune), options);
      });
      weights = tuned.best.weights;
      k = tuned.best.k;
      w.text("trials.csv", [&](std::ostream& os) { write_trials_csv(os, tuned.trials); });
    }

    const DistanceMatrix matrix = stage("distance", [&] { return distance_matrix(data.trajectories, weights); });
    write_matrix(w, matrix);

    const Clustering clustering = stage("clustering", [&] {
      return fit_kmedoids(matrix, k, derive_seed(cfg.seed, kCluster), cfg.max_iter);
    });
    w.text("assignments.csv", [&](std::ostream& os) { write_assignments_csv(os, clustering, matrix.ids()); });

    const auto members = members_by_cluster(clustering.assignment, k);
    stage("mining", [&] {
      w.text("patterns.csv", [&](std::ostream& os) {
        os << "label,length,rank,count,freq,pattern\n";
        write_pattern_rows(os, db, "global", pattern_options(cfg));
        for (std::size_t c = 0; c < k; ++c) {
          SequenceDatabase cluster_db;
          for (auto i : members[c]) cluster_db.sequences.push_back(db.sequences[i]);
          write_pattern_rows(os, cluster_db, "cluster_" + std::to_string(c), pattern_options(cfg));
        }
      });
    });

    std::vector<char> deceased(data.records.size());
    for (std::size_t i = 0; i < data.records.size(); ++i) deceased[i] = data.records[i].event == 1;
    stage("reports", [&] {
      w.text("frequency_tables.csv", [&](std::ostream& os) {
        os << "label,position,code,count,proportion\n";
        std::vector<PatientTrajectory> subset;
        for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
          if (deceased[i]) subset.push_back(data.trajectories[i]);
        }
        write_frequency_rows(os, frequency_table(subset, cfg.positions, cfg.freq_top_k), "global");
        for (std::size_t c = 0; c < k; ++c) {
          subset.clear();
          for (auto i : members[c]) {
            if (deceased[i]) subset.push_back(data.trajectories[i]);
          }
          write_frequency_rows(os, frequency_table(subset, cfg.positions, cfg.freq_top_k),
                               "cluster_" + std::to_string(c));
        }
      });
      write_sankey(w, data.trajectories, clustering.assignment, k, cfg.sankey_top_k, deceased);
      write_profiles(w, data.trajectories, clustering, weights);
    });

    stage("survival", [&] { write_survival(w, data.records, clustering.assignment, k, cfg); });

    std::vector<std::string> artifacts = w.names();
    artifacts.push_back("manifest.json");
    w.text("manifest.json", [&](std::ostream& os) {
      nlohmann::ordered_json j;
      j["tool"] = "hfpath";
      j["version"] = std::string(kVersion);
      j["seed"] = cfg.seed;
      j["config"] = cfg.echo();
      j["resolved"] = {{"weights", weights.values()}, {"k", k}, {"tuned", cfg.tune_budget > 0}};
      std::vector<std::size_t> sizes;
      for (const auto& m : members) sizes.push_back(m.size());
      j["clustering"] = {{"sizes", sizes},
                         {"total_distance", clustering.total_distance},
                         {"accepted_swaps", clustering.history.size() - 1},
                         {"sweeps", clustering.sweeps},
                         {"converged", clustering.converged}};
      j["artifacts"] = artifacts;
      os << j.dump(2) << '\n';
    });

    fs::remove_all(out, ec);
    fs::rename(staging, out);
    return artifacts;
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace hfpath
