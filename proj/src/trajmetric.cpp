#include "hfpath/trajmetric.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "hfpath/editdist.hpp"
#include "hfpath/error.hpp"
#include "hfpath/text.hpp"

namespace hfpath {

WeightVector::WeightVector(int w1, int w2, int w3, int w4) : w_{w1, w2, w3, w4} {
  if (!(0 <= w4 && w4 <= w3 && w3 <= w2 && w2 <= w1 && w1 <= kMax)) {
    throw std::invalid_argument("weights must satisfy 0 <= w4 <= w3 <= w2 <= w1 <= 100, got " +
                                to_string());
  }
}

WeightVector WeightVector::parse(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw std::invalid_argument("expected four weights, got '" + text + "'");
  std::array<int, 4> w{};
  for (std::size_t i = 0; i < 4; ++i) w[i] = parse_int<int>(trim(parts[i]), "weight");
  return WeightVector(w);
}

std::string WeightVector::to_string() const {
  return std::to_string(w_[0]) + "," + std::to_string(w_[1]) + "," + std::to_string(w_[2]) +
         "," + std::to_string(w_[3]);
}

WeightVector WeightVector::scaled_unchecked(int factor) const {
  return {Unchecked{}, {w_[0] * factor, w_[1] * factor, w_[2] * factor, w_[3] * factor}};
}

void PatientTrajectory::validate() const {
  if (codes.empty()) throw DataError("patient " + patient_id + ": empty trajectory");
  for (std::size_t i = 0; i + 1 < codes.size(); ++i) {
    if (codes[i].is_death()) {
      throw DataError("patient " + patient_id + ": Death is followed by another code");
    }
  }
}

Rational d_icd10(const DiagnosisCode& a, const DiagnosisCode& b, const WeightVector& w) {
  if (a.is_death() || b.is_death()) return a == b ? Rational{0} : Rational{w.sum()};
  const std::string_view sa = a.slots();
  const std::string_view sb = b.slots();
  return Rational{w[0]} * lev_ratio(sa.substr(0, 2), sb.substr(0, 2)) +
         Rational{w[1]} * lev_ratio(sa.substr(2, 1), sb.substr(2, 1)) +
         Rational{w[2]} * lev_ratio(sa.substr(3, 2), sb.substr(3, 2)) +
         Rational{w[3]} * lev_ratio(sa.substr(5, 1), sb.substr(5, 1));
}

Rational d_directed(const PatientTrajectory& a, const PatientTrajectory& b,
                    const WeightVector& w) {
  if (a.codes.empty() || b.codes.empty()) {
    throw std::invalid_argument("d_patient: empty trajectory");
  }
  const std::size_t last = b.codes.size() - 1;
  Rational total{0};
  for (std::size_t i = 0; i < a.codes.size(); ++i) {
    const std::size_t lo = i == 0 ? 0 : std::min(i - 1, last);
    const std::size_t hi = std::min(i + 1, last);
    Rational best = d_icd10(a.codes[i], b.codes[lo], w);
    for (std::size_t j = lo + 1; j <= hi; ++j) best = std::min(best, d_icd10(a.codes[i], b.codes[j], w));
    total += best;
  }
  return total;
}

Rational d_patient(const PatientTrajectory& a, const PatientTrajectory& b, const WeightVector& w) {
  return (d_directed(a, b, w) + d_directed(b, a, w)) * Rational{1, 2};
}

namespace {

// Trajectories re-encoded as indices into a table of distinct codes, with
// pairwise code distances held in half units (all component ratios have
// denominator 1 or 2).
struct InternedCohort {
  std::vector<std::vector<std::uint32_t>> sequences;
  std::size_t n_codes = 0;
  std::vector<std::int64_t> half_units;

  std::int64_t code_distance(std::uint32_t x, std::uint32_t y) const {
    return half_units[static_cast<std::size_t>(x) * n_codes + y];
  }

  std::int64_t directed(const std::vector<std::uint32_t>& a,
                        const std::vector<std::uint32_t>& b) const {
    const std::size_t last = b.size() - 1;
    std::int64_t total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t lo = i == 0 ? 0 : std::min(i - 1, last);
      const std::size_t hi = std::min(i + 1, last);
      std::int64_t best = code_distance(a[i], b[lo]);
      for (std::size_t j = lo + 1; j <= hi; ++j) best = std::min(best, code_distance(a[i], b[j]));
      total += best;
    }
    return total;
  }
};

InternedCohort intern(std::span<const PatientTrajectory> patients, const WeightVector& w) {
  InternedCohort cohort;
  std::vector<DiagnosisCode> table;
  std::unordered_map<std::string, std::uint32_t> index;
  cohort.sequences.reserve(patients.size());
  for (const auto& p : patients) {
    auto& seq = cohort.sequences.emplace_back();
    seq.reserve(p.codes.size());
    for (const auto& c : p.codes) {
      auto [it, inserted] = index.emplace(c.render(), static_cast<std::uint32_t>(table.size()));
      if (inserted) table.push_back(c);
      seq.push_back(it->second);
    }
  }
  cohort.n_codes = table.size();
  cohort.half_units.resize(cohort.n_codes * cohort.n_codes);
  for (std::size_t x = 0; x < cohort.n_codes; ++x) {
    for (std::size_t y = x; y < cohort.n_codes; ++y) {
      const Rational d = d_icd10(table[x], table[y], w) * Rational{2};
      cohort.half_units[x * cohort.n_codes + y] = d.num();
      cohort.half_units[y * cohort.n_codes + x] = d.num();
    }
  }
  return cohort;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

DistanceMatrix distance_matrix(std::span<const PatientTrajectory> patients,
                               const WeightVector& w) {
  if (patients.empty()) throw std::invalid_argument("distance_matrix: no patients");
  std::unordered_set<std::string> seen;
  std::vector<std::string> ids;
  ids.reserve(patients.size());
  for (const auto& p : patients) {
    p.validate();
    if (!seen.insert(p.patient_id).second) {
      throw DataError("distance_matrix: duplicate patient id " + p.patient_id);
    }
    ids.push_back(p.patient_id);
  }

  const InternedCohort cohort = intern(patients, w);
  const std::size_t n = patients.size();
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::int64_t halves = cohort.directed(cohort.sequences[i], cohort.sequences[j]) +
                                  cohort.directed(cohort.sequences[j], cohort.sequences[i]);
      // Mean of two half-unit sums: exact quarter-unit dyadic value.
      const double d = static_cast<double>(halves) / 4.0;
      values[i * n + j] = d;
      values[j * n + i] = d;
    }
  }
  return DistanceMatrix(std::move(ids), std::move(values));
}

DistanceMatrix::DistanceMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {
  ids_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids_.push_back(std::to_string(i));
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> ids, std::vector<double> values)
    : n_(ids.size()), ids_(std::move(ids)), data_(std::move(values)) {
  if (data_.size() != n_ * n_) throw std::invalid_argument("DistanceMatrix: size mismatch");
}

void DistanceMatrix::write_csv(std::ostream& os) const {
  std::string line = "patient_id";
  for (const auto& id : ids_) line += "," + id;
  os << line << '\n';
  for (std::size_t i = 0; i < n_; ++i) {
    line = ids_[i];
    for (std::size_t j = 0; j < n_; ++j) {
      line += ',';
      append_double(line, (*this)(i, j));
    }
    os << line << '\n';
  }
}

DistanceMatrix DistanceMatrix::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("distance matrix CSV: missing header");
  auto header = split(line, ',');
  std::vector<std::string> ids(header.begin() + 1, header.end());
  const std::size_t n = ids.size();
  std::vector<double> values;
  values.reserve(n * n);
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != n + 1 || cells[0] != ids[row]) {
      throw DataError("distance matrix CSV: malformed row " + std::to_string(row + 2));
    }
    for (std::size_t j = 1; j <= n; ++j) values.push_back(parse_double(cells[j], "distance"));
    ++row;
  }
  if (row != n) throw DataError("distance matrix CSV: expected " + std::to_string(n) + " rows");
  return DistanceMatrix(std::move(ids), std::move(values));
}

void DistanceMatrix::write_binary(std::ostream& os) const {
  static_assert(std::endian::native == std::endian::little, "binary export assumes little-endian");
  const auto n = static_cast<std::uint64_t>(n_);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(data_.data()),
           static_cast<std::streamsize>(data_.size() * sizeof(double)));
}

DistanceMatrix DistanceMatrix::read_binary(std::istream& is) {
  std::uint64_t n = 0;
  if (!is.read(reinterpret_cast<char*>(&n), sizeof n)) {
    throw DataError("distance matrix binary: truncated header");
  }
  DistanceMatrix m(static_cast<std::size_t>(n));
  if (!is.read(reinterpret_cast<char*>(m.data_.data()),
               static_cast<std::streamsize>(m.data_.size() * sizeof(double)))) {
    throw DataError("distance matrix binary: truncated payload");
  }
  return m;
}

}  // namespace hfpath
