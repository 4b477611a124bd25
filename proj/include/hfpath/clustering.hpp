#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hfpath/rational.hpp"
#include "hfpath/trajmetric.hpp"

namespace hfpath {

struct Clustering {
  std::size_t k = 0;
  std::vector<std::size_t> medoids;            // patient index per cluster id
  std::vector<std::size_t> assignment;         // cluster id per patient
  std::vector<double> distance_to_medoid;      // per patient
  double total_distance = 0.0;
  // Total distance of the initial configuration followed by the value after
  // every accepted swap.
  std::vector<double> history;
  std::size_t sweeps = 0;
  bool converged = false;

  std::size_t cluster_size(std::size_t c) const;
  bool is_medoid(std::size_t patient) const;
};

/// PAM-style k-medoids over a precomputed matrix.
///
/// Initial medoids are drawn from a generator seeded with `seed`. Each sweep
/// visits medoid slots in order and, for each slot, non-medoid candidates in
/// ascending index order; the first swap that lowers the total distance is
/// accepted immediately. Stops after a sweep without improvement or after
/// `max_iter` sweeps (converged = false).
Clustering fit_kmedoids(const DistanceMatrix& matrix, std::size_t k, std::uint64_t seed,
                        std::size_t max_iter = 100);

// Per position of `t`: minimum distance to any code of the medoid.
std::vector<Rational> medoid_profile(const PatientTrajectory& t, const PatientTrajectory& medoid,
                                     const WeightVector& w);

// patient_id,cluster_id,distance_to_medoid,is_medoid
void write_assignments_csv(std::ostream& os, const Clustering& c,
                           const std::vector<std::string>& ids);

}  // namespace hfpath
