#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hfpath/codes.hpp"
#include "hfpath/rational.hpp"

namespace hfpath {

/// The four component weights (category, care type, counter, severity).
///
/// Constrained to 0 <= w4 <= w3 <= w2 <= w1 <= 100.
class WeightVector {
 public:
  static constexpr int kMax = 100;

  // Throws std::invalid_argument when the ordering constraint is violated.
  WeightVector(int w1, int w2, int w3, int w4);
  explicit WeightVector(const std::array<int, 4>& w) : WeightVector(w[0], w[1], w[2], w[3]) {}

  // Accepts "85,75,55,40".
  static WeightVector parse(const std::string& text);

  // [85, 75, 55, 40]
  static WeightVector defaults() { return {85, 75, 55, 40}; }

  int operator[](std::size_t i) const { return w_[i]; }
  const std::array<int, 4>& values() const noexcept { return w_; }
  int sum() const noexcept { return w_[0] + w_[1] + w_[2] + w_[3]; }
  std::string to_string() const;

  // Multiplies every weight by `factor`, bypassing the <= 100 cap; used for
  // linearity checks only.
  WeightVector scaled_unchecked(int factor) const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  struct Unchecked {};
  WeightVector(Unchecked, const std::array<int, 4>& w) : w_(w) {}
  std::array<int, 4> w_;
};

struct PatientTrajectory {
  std::string patient_id;
  std::vector<DiagnosisCode> codes;

  // Throws DataError when empty or when Death is not terminal.
  void validate() const;
  bool died() const { return !codes.empty() && codes.back().is_death(); }
};

/// Symmetric n x n matrix of patient distances, stored row-major.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<std::string> ids, std::vector<double> values);
  explicit DistanceMatrix(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& at(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  const std::vector<double>& values() const noexcept { return data_; }

  // Header row of patient ids, then one row per patient (shortest
  // round-trip double formatting).
  void write_csv(std::ostream& os) const;
  static DistanceMatrix read_csv(std::istream& is);

  // Little-endian uint64 n, then n*n IEEE-754 doubles row-major.
  void write_binary(std::ostream& os) const;
  static DistanceMatrix read_binary(std::istream& is);

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::string> ids_;
  std::vector<double> data_;
};

// Weighted sum of component Levenshtein ratios. Death vs Death is 0 and
// Death vs any code is the weight total.
Rational d_icd10(const DiagnosisCode& a, const DiagnosisCode& b, const WeightVector& w);

// Directed windowed sum: each code of `a` is matched to the closest of
// b[i-1], b[i], b[i+1] (window clamped into b's range).
Rational d_directed(const PatientTrajectory& a, const PatientTrajectory& b,
                    const WeightVector& w);

// Mean of the two directed sums; symmetric by construction.
Rational d_patient(const PatientTrajectory& a, const PatientTrajectory& b, const WeightVector& w);

// Computes the upper triangle and mirrors it. Throws DataError on duplicate ids.
DistanceMatrix distance_matrix(std::span<const PatientTrajectory> patients, const WeightVector& w);

}  // namespace hfpath
