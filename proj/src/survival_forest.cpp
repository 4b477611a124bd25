#include "hfpath/survival_forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "hfpath/random.hpp"

namespace hfpath {
namespace {

constexpr double kMinVariance = 1e-9;

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0.0) {}
  void add(std::size_t i, double v) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += v;
  }
  // Sum over [0, i).
  double prefix(std::size_t i) const {
    double s = 0.0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<double> tree_;
};

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double statistic = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, std::span<const double> times, std::span<const int> events,
              const ForestParams& params, std::size_t mtry, Rng& rng)
      : x_(x), times_(times), events_(events), params_(params), mtry_(mtry), rng_(rng) {}

  void build(SurvivalForest::Tree& tree, std::vector<std::size_t> samples) {
    tree_ = &tree;
    grow(std::move(samples));
  }

 private:
  std::int32_t grow(std::vector<std::size_t> samples) {
    const auto id = static_cast<std::int32_t>(tree_->nodes.size());
    tree_->nodes.emplace_back();
    tree_->nodes[static_cast<std::size_t>(id)].n_samples = static_cast<std::uint32_t>(samples.size());

    Split split;
    if (samples.size() >= params_.min_samples_split) split = best_split(samples);
    if (split.feature < 0 || split.statistic <= 0.0) {
      make_leaf(id, samples);
      return id;
    }

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto s : samples) {
      (x_(static_cast<Eigen::Index>(s), split.feature) <= split.threshold ? left : right).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    const std::int32_t l = grow(std::move(left));
    const std::int32_t r = grow(std::move(right));
    auto& node = tree_->nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  void make_leaf(std::int32_t id, const std::vector<std::size_t>& samples) {
    std::vector<double> t;
    std::vector<int> e;
    t.reserve(samples.size());
    e.reserve(samples.size());
    for (auto s : samples) {
      t.push_back(times_[s]);
      e.push_back(events_[s]);
    }
    tree_->nodes[static_cast<std::size_t>(id)].leaf = static_cast<std::int32_t>(tree_->leaves.size());
    tree_->leaves.push_back(nelson_aalen(t, e));
  }

  // Log-rank split search. Moving a record into the left child changes the
  // statistic's numerator by (event - H(t)) and its variance by prefix sums
  // over the node's event-time grid, so each threshold costs O(log T).
  Split best_split(const std::vector<std::size_t>& samples) {
    const std::size_t m = samples.size();

    std::vector<double> grid;
    for (auto s : samples) {
      if (events_[s]) grid.push_back(times_[s]);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const std::size_t n_times = grid.size();
    if (n_times == 0) return {};

    std::vector<double> deaths(n_times, 0.0);
    std::vector<double> at_risk(n_times, 0.0);
    std::vector<std::size_t> rank(m);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t s = samples[i];
      rank[i] = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), times_[s]) -
                                         grid.begin());
      if (events_[s]) deaths[rank[i] - 1] += 1.0;
      if (rank[i] > 0) at_risk[rank[i] - 1] += 1.0;
    }
    for (std::size_t t = n_times - 1; t-- > 0;) at_risk[t] += at_risk[t + 1];

    std::vector<double> hazard_prefix(n_times + 1, 0.0);
    std::vector<double> var_prefix(n_times + 1, 0.0);
    std::vector<double> var2_prefix(n_times + 1, 0.0);
    for (std::size_t t = 0; t < n_times; ++t) {
      const double y = at_risk[t];
      const double d = deaths[t];
      const double c = y > 1.0 ? d * (y - d) / (y - 1.0) : 0.0;
      hazard_prefix[t + 1] = hazard_prefix[t] + d / y;
      var_prefix[t + 1] = var_prefix[t] + c / y;
      var2_prefix[t + 1] = var2_prefix[t] + c / (y * y);
    }

    // mtry distinct features.
    const auto p = static_cast<std::size_t>(x_.cols());
    std::vector<std::size_t> features(p);
    std::iota(features.begin(), features.end(), std::size_t{0});
    for (std::size_t i = 0; i < mtry_; ++i) {
      const auto j = static_cast<std::size_t>(
          rng_.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(p - 1)));
      std::swap(features[i], features[j]);
    }

    Split best;
    std::vector<std::size_t> order(m);
    for (std::size_t fi = 0; fi < mtry_; ++fi) {
      const auto f = static_cast<Eigen::Index>(features[fi]);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x_(static_cast<Eigen::Index>(samples[a]), f) <
               x_(static_cast<Eigen::Index>(samples[b]), f);
      });

      Fenwick count(n_times + 1);
      Fenwick weighted(n_times + 1);
      double numerator = 0.0;
      double var_linear = 0.0;
      double var_quadratic = 0.0;
      for (std::size_t i = 0; i + 1 < m; ++i) {
        const std::size_t local = order[i];
        const std::size_t s = samples[local];
        const std::size_t r = rank[local];
        const double below = count.prefix(r);
        const double q = var2_prefix[r] * (static_cast<double>(i) - below) + weighted.prefix(r);
        var_quadratic += 2.0 * q + var2_prefix[r];
        var_linear += var_prefix[r];
        numerator += static_cast<double>(events_[s]) - hazard_prefix[r];
        count.add(r, 1.0);
        weighted.add(r, var2_prefix[r]);

        const std::size_t n_left = i + 1;
        if (n_left < params_.min_samples_leaf || m - n_left < params_.min_samples_leaf) continue;
        const double lo = x_(static_cast<Eigen::Index>(s), f);
        const double hi = x_(static_cast<Eigen::Index>(samples[order[i + 1]]), f);
        if (!(lo < hi)) continue;
        const double variance = var_linear - var_quadratic;
        const double stat = variance > kMinVariance ? std::abs(numerator) / std::sqrt(variance) : 0.0;
        if (stat > best.statistic) {
          best.feature = static_cast<int>(f);
          best.threshold = lo + (hi - lo) / 2.0;
          best.statistic = stat;
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  std::span<const double> times_;
  std::span<const int> events_;
  const ForestParams& params_;
  std::size_t mtry_;
  Rng& rng_;
  SurvivalForest::Tree* tree_ = nullptr;
};

template <typename T>
void put(std::string& out, const T& v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
void put_vector(std::string& out, const std::vector<T>& v) {
  put(out, static_cast<std::uint64_t>(v.size()));
  for (const auto& x : v) put(out, x);
}

void put_step(std::string& out, const StepFunction& f) {
  put(out, f.initial());
  put_vector(out, f.times());
  put_vector(out, f.values());
}

// Adds `scale * f(t)` for every t of the ascending grid.
void accumulate_on_grid(const StepFunction& f, const std::vector<double>& grid, double scale,
                        std::vector<double>& out) {
  const auto& times = f.times();
  const auto& values = f.values();
  std::size_t j = 0;
  double current = f.initial();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    while (j < times.size() && times[j] <= grid[g]) current = values[j++];
    out[g] += scale * current;
  }
}

}  // namespace

double log_rank_statistic(std::span<const double> times, std::span<const int> events,
                          std::span<const char> in_left) {
  if (times.size() != events.size() || times.size() != in_left.size()) {
    throw std::invalid_argument("log_rank_statistic: input lengths differ");
  }
  std::vector<double> grid;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (events[i]) grid.push_back(times[i]);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double numerator = 0.0;
  double variance = 0.0;
  for (double t : grid) {
    double y = 0, yl = 0, d = 0, dl = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] < t) continue;
      y += 1;
      if (in_left[i]) yl += 1;
      if (times[i] == t && events[i]) {
        d += 1;
        if (in_left[i]) dl += 1;
      }
    }
    numerator += dl - yl * d / y;
    if (y > 1) variance += d * (y - d) / (y - 1) * (yl / y) * (1 - yl / y);
  }
  return variance > kMinVariance ? std::abs(numerator) / std::sqrt(variance) : 0.0;
}

std::size_t SurvivalForest::Tree::leaf_for(std::span<const double> x) const {
  std::size_t node = 0;
  while (nodes[node].feature >= 0) {
    const auto& n = nodes[node];
    node = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                          : n.right);
  }
  return static_cast<std::size_t>(nodes[node].leaf);
}

SurvivalForest SurvivalForest::fit(const Eigen::MatrixXd& x, std::span<const double> times,
                                   std::span<const int> events, const ForestParams& params) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (times.size() != n || events.size() != n) {
    throw std::invalid_argument("rsf_fit: input lengths differ");
  }
  if (params.n_estimators < 1) throw std::invalid_argument("rsf_fit: n_estimators must be >= 1");
  if (n < params.min_samples_split || n == 0) {
    throw std::invalid_argument("rsf_fit: " + std::to_string(n) +
                                " records, need at least min_samples_split = " +
                                std::to_string(params.min_samples_split));
  }

  SurvivalForest forest;
  forest.params_ = params;
  forest.n_features_ = static_cast<std::size_t>(x.cols());
  std::size_t mtry = params.mtry;
  if (mtry == 0) mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(forest.n_features_))));
  mtry = std::min(mtry, forest.n_features_);
  forest.params_.mtry = mtry;

  for (std::size_t i = 0; i < n; ++i) {
    if (events[i]) forest.grid_.push_back(times[i]);
  }
  std::sort(forest.grid_.begin(), forest.grid_.end());
  forest.grid_.erase(std::unique(forest.grid_.begin(), forest.grid_.end()), forest.grid_.end());

  forest.trees_.resize(params.n_estimators);
  for (std::size_t t = 0; t < params.n_estimators; ++t) {
    Rng rng(derive_seed(params.seed, t));
    auto& tree = forest.trees_[t];
    tree.bootstrap.resize(n);
    if (params.bootstrap) {
      for (auto& b : tree.bootstrap) {
        b = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n - 1)));
      }
    } else {
      std::iota(tree.bootstrap.begin(), tree.bootstrap.end(), std::size_t{0});
    }
    TreeBuilder builder(x, times, events, forest.params_, mtry, rng);
    builder.build(tree, tree.bootstrap);
  }
  return forest;
}

SurvivalPrediction SurvivalForest::predict(std::span<const double> x) const {
  if (x.size() != n_features_) throw std::invalid_argument("rsf_predict: feature count mismatch");
  std::vector<double> chf(grid_.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(trees_.size());
  for (const auto& tree : trees_) {
    accumulate_on_grid(tree.leaves[tree.leaf_for(x)], grid_, scale, chf);
  }
  // Guard against rounding in the mean breaking monotonicity.
  for (std::size_t i = 1; i < chf.size(); ++i) chf[i] = std::max(chf[i], chf[i - 1]);

  SurvivalPrediction out;
  std::vector<double> surv(chf.size());
  std::transform(chf.begin(), chf.end(), surv.begin(), [](double h) { return std::exp(-h); });
  out.risk = std::accumulate(chf.begin(), chf.end(), 0.0);
  out.cumulative_hazard = StepFunction(0.0, grid_, chf);
  out.survival = StepFunction(1.0, grid_, std::move(surv));
  return out;
}

std::vector<double> SurvivalForest::predict_risk(const Eigen::MatrixXd& x) const {
  std::vector<double> risks;
  risks.reserve(static_cast<std::size_t>(x.rows()));
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(i, j);
    risks.push_back(predict(row).risk);
  }
  return risks;
}

std::string SurvivalForest::serialize() const {
  std::string out;
  put(out, static_cast<std::uint64_t>(params_.n_estimators));
  put(out, static_cast<std::uint64_t>(params_.min_samples_split));
  put(out, static_cast<std::uint64_t>(params_.min_samples_leaf));
  put(out, static_cast<std::uint64_t>(params_.mtry));
  put(out, static_cast<std::uint8_t>(params_.bootstrap));
  put(out, params_.seed);
  put(out, static_cast<std::uint64_t>(n_features_));
  put_vector(out, grid_);
  for (const auto& tree : trees_) {
    std::vector<std::uint64_t> bag(tree.bootstrap.begin(), tree.bootstrap.end());
    put_vector(out, bag);
    put(out, static_cast<std::uint64_t>(tree.nodes.size()));
    for (const auto& node : tree.nodes) {
      put(out, node.feature);
      put(out, node.threshold);
      put(out, node.left);
      put(out, node.right);
      put(out, node.leaf);
      put(out, node.n_samples);
    }
    put(out, static_cast<std::uint64_t>(tree.leaves.size()));
    for (const auto& leaf : tree.leaves) put_step(out, leaf);
  }
  return out;
}

double survival_area(const StepFunction& survival) {
  double area = 0.0;
  double prev_t = 0.0;
  double prev_s = survival.initial();
  const auto& t = survival.times();
  const auto& s = survival.values();
  for (std::size_t i = 0; i < t.size(); ++i) {
    area += (t[i] - prev_t) * (prev_s + s[i]) / 2.0;
    prev_t = t[i];
    prev_s = s[i];
  }
  return area;
}

ScenarioCurves scenario_curves(const SurvivalForest& forest, const Eigen::MatrixXd& cluster_x) {
  if (cluster_x.rows() == 0) throw std::invalid_argument("scenario_curves: empty cluster");
  ScenarioCurves out;
  std::vector<double> row(static_cast<std::size_t>(cluster_x.cols()));
  for (Eigen::Index i = 0; i < cluster_x.rows(); ++i) {
    for (Eigen::Index j = 0; j < cluster_x.cols(); ++j) row[static_cast<std::size_t>(j)] = cluster_x(i, j);
    auto pred = forest.predict(row);
    const double area = survival_area(pred.survival);
    const auto idx = static_cast<std::size_t>(i);
    if (i == 0 || area > out.best_area) {
      out.best_area = area;
      out.best_index = idx;
      out.best = pred.survival;
    }
    if (i == 0 || area < out.worst_area) {
      out.worst_area = area;
      out.worst_index = idx;
      out.worst = std::move(pred.survival);
    }
  }
  return out;
}

}  // namespace hfpath
