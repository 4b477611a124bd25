#include "hfpath/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "hfpath/random.hpp"
#include "hfpath/text.hpp"

namespace hfpath {
namespace {

// Nearest and second-nearest medoid slot per point. A medoid is always
// its own nearest so the medoid-in-own-cluster invariant survives
// duplicate points; other ties go to the lowest slot.
struct NearestCache {
  std::vector<std::size_t> nearest;
  std::vector<double> d1;
  std::vector<double> d2;

  void rebuild(const DistanceMatrix& m, const std::vector<std::size_t>& medoids) {
    const std::size_t n = m.size();
    nearest.assign(n, 0);
    d1.assign(n, std::numeric_limits<double>::infinity());
    d2.assign(n, std::numeric_limits<double>::infinity());
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t s = 0; s < medoids.size(); ++s) {
        const double d = m(p, medoids[s]);
        if (d < d1[p]) {
          d2[p] = d1[p];
          d1[p] = d;
          nearest[p] = s;
        } else if (d < d2[p]) {
          d2[p] = d;
        }
      }
    }
    for (std::size_t s = 0; s < medoids.size(); ++s) {
      nearest[medoids[s]] = s;
      d1[medoids[s]] = 0.0;
    }
  }

  double total() const { return std::accumulate(d1.begin(), d1.end(), 0.0); }
};

// Total distance if slot `slot` were replaced by point `candidate`.
double swap_total(const DistanceMatrix& m, const NearestCache& cache, std::size_t slot,
                  std::size_t candidate) {
  double total = 0.0;
  const std::size_t n = m.size();
  for (std::size_t p = 0; p < n; ++p) {
    const double to_candidate = m(p, candidate);
    const double others = cache.nearest[p] == slot ? cache.d2[p] : cache.d1[p];
    total += std::min(others, to_candidate);
  }
  return total;
}

}  // namespace

std::size_t Clustering::cluster_size(std::size_t c) const {
  return static_cast<std::size_t>(std::count(assignment.begin(), assignment.end(), c));
}

bool Clustering::is_medoid(std::size_t patient) const {
  return std::find(medoids.begin(), medoids.end(), patient) != medoids.end();
}

Clustering fit_kmedoids(const DistanceMatrix& matrix, std::size_t k, std::uint64_t seed,
                        std::size_t max_iter) {
  const std::size_t n = matrix.size();
  if (k < 1) throw std::invalid_argument("fit_kmedoids: k must be >= 1");
  if (k > n) {
    throw std::invalid_argument("fit_kmedoids: k = " + std::to_string(k) + " exceeds n = " +
                                std::to_string(n));
  }
  if (max_iter < 1) throw std::invalid_argument("fit_kmedoids: max_iter must be >= 1");

  // Partial Fisher-Yates for k distinct initial medoids.
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                            static_cast<std::int64_t>(n - 1)));
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> medoids(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<char> in_medoids(n, 0);
  for (auto m : medoids) in_medoids[m] = 1;

  Clustering result;
  result.k = k;
  NearestCache cache;
  cache.rebuild(matrix, medoids);
  double total = cache.total();
  result.history.push_back(total);

  bool changed = true;
  while (changed && result.sweeps < max_iter) {
    changed = false;
    ++result.sweeps;
    for (std::size_t slot = 0; slot < k; ++slot) {
      for (std::size_t p = 0; p < n; ++p) {
        if (in_medoids[p]) continue;
        const double candidate = swap_total(matrix, cache, slot, p);
        if (candidate < total) {
          in_medoids[medoids[slot]] = 0;
          medoids[slot] = p;
          in_medoids[p] = 1;
          cache.rebuild(matrix, medoids);
          total = cache.total();
          result.history.push_back(total);
          changed = true;
        }
      }
    }
  }
  result.converged = !changed;
  result.medoids = medoids;
  result.assignment = cache.nearest;
  result.distance_to_medoid = cache.d1;
  result.total_distance = total;
  return result;
}

std::vector<Rational> medoid_profile(const PatientTrajectory& t, const PatientTrajectory& medoid,
                                     const WeightVector& w) {
  if (t.codes.empty() || medoid.codes.empty()) {
    throw std::invalid_argument("medoid_profile: empty trajectory");
  }
  std::vector<Rational> profile;
  profile.reserve(t.codes.size());
  for (const auto& code : t.codes) {
    Rational best = d_icd10(code, medoid.codes.front(), w);
    for (const auto& m : medoid.codes) best = std::min(best, d_icd10(code, m, w));
    profile.push_back(best);
  }
  return profile;
}

void write_assignments_csv(std::ostream& os, const Clustering& c,
                           const std::vector<std::string>& ids) {
  os << "patient_id,cluster_id,distance_to_medoid,is_medoid\n";
  for (std::size_t p = 0; p < c.assignment.size(); ++p) {
    os << csv_field(ids[p]) << ',' << c.assignment[p] << ','
       << format_double(c.distance_to_medoid[p]) << ',' << (c.is_medoid(p) ? 1 : 0) << '\n';
  }
}

}  // namespace hfpath
