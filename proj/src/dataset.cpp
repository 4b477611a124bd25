#include "hfpath/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "hfpath/error.hpp"
#include "hfpath/text.hpp"

namespace hfpath {
namespace {

void expect_header(std::istream& is, const std::vector<std::string>& expected, const char* what) {
  std::string line;
  if (!std::getline(is, line)) throw DataError(std::string(what) + ": empty file");
  auto cells = split_csv_line(line);
  for (auto& c : cells) c = std::string(trim(c));
  if (cells != expected) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    throw DataError(std::string(what) + ": expected header '" + want + "'");
  }
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<PatientTrajectory> read_trajectories(std::istream& is) {
  expect_header(is, {"patient_id", "seq_index", "code"}, "trajectory CSV");

  struct Row {
    long seq_index;
    DiagnosisCode code;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Row>> rows;
  std::string line;
  std::size_t row_number = 0;
  while (std::getline(is, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    const std::string where = "trajectory CSV row " + std::to_string(row_number);
    if (cells.size() != 3) throw DataError(where + ": expected 3 fields");
    const std::string id(trim(cells[0]));
    Row row{};
    try {
      row.seq_index = parse_int<long>(cells[1], "seq_index");
      row.code = parse_code(trim(cells[2]));
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    auto [it, inserted] = rows.try_emplace(id);
    if (inserted) order.push_back(id);
    it->second.push_back(row);
  }

  std::vector<PatientTrajectory> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    auto& r = rows.at(id);
    std::stable_sort(r.begin(), r.end(),
                     [](const Row& a, const Row& b) { return a.seq_index < b.seq_index; });
    for (std::size_t i = 1; i < r.size(); ++i) {
      if (r[i].seq_index == r[i - 1].seq_index) {
        throw DataError("trajectory CSV: duplicate seq_index " + std::to_string(r[i].seq_index) +
                        " for patient " + id);
      }
    }
    PatientTrajectory t;
    t.patient_id = id;
    for (const auto& row : r) t.codes.push_back(row.code);
    t.validate();
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<PatientTrajectory> load_trajectories(const std::filesystem::path& path) {
  auto in = open(path);
  return read_trajectories(in);
}

std::vector<SurvivalRecord> join_covariates(std::istream& is,
                                            std::span<const PatientTrajectory> trajectories) {
  expect_header(is,
                {"patient_id", "birth_year", "sex", "shock_flag", "total_stay_days", "event",
                 "time_days"},
                "covariate CSV");
  std::unordered_map<std::string, SurvivalRecord> by_id;
  std::string line;
  std::size_t row_number = 0;
  while (std::getline(is, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    const std::string where = "covariate CSV row " + std::to_string(row_number);
    if (cells.size() != 7) throw DataError(where + ": expected 7 fields");
    SurvivalRecord r;
    try {
      r.patient_id = std::string(trim(cells[0]));
      r.covariates.birth_year = parse_int<int>(cells[1], "birth_year");
      r.covariates.sex = parse_int<int>(cells[2], "sex");
      r.covariates.shock_flag = parse_int<int>(cells[3], "shock_flag");
      r.covariates.total_stay_days = parse_int<int>(cells[4], "total_stay_days");
      r.event = parse_int<int>(cells[5], "event");
      r.time = parse_double(cells[6], "time_days");
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (r.covariates.sex != 1 && r.covariates.sex != 2) throw DataError(where + ": sex must be 1 or 2");
    if (r.event != 0 && r.event != 1) throw DataError(where + ": event must be 0 or 1");
    if (r.covariates.shock_flag != 0 && r.covariates.shock_flag != 1) {
      throw DataError(where + ": shock_flag must be 0 or 1");
    }
    if (!(r.time >= 0.0)) throw DataError(where + ": time_days must be >= 0");
    if (!by_id.emplace(r.patient_id, r).second) {
      throw DataError(where + ": duplicate patient " + r.patient_id);
    }
  }

  std::vector<SurvivalRecord> out;
  out.reserve(trajectories.size());
  for (const auto& t : trajectories) {
    auto it = by_id.find(t.patient_id);
    if (it == by_id.end()) throw DataError("covariate CSV: no row for patient " + t.patient_id);
    SurvivalRecord r = it->second;
    r.covariates.n_hospitalizations = static_cast<int>(t.codes.size() - (t.died() ? 1 : 0));
    out.push_back(std::move(r));
  }
  return out;
}

Dataset load_dataset(const std::filesystem::path& trajectory_csv,
                     const std::filesystem::path& covariate_csv) {
  Dataset d;
  d.trajectories = load_trajectories(trajectory_csv);
  auto in = open(covariate_csv);
  d.records = join_covariates(in, d.trajectories);
  return d;
}

void write_trajectories(std::ostream& os, std::span<const PatientTrajectory> trajectories) {
  os << "patient_id,seq_index,code\n";
  for (const auto& t : trajectories) {
    for (std::size_t i = 0; i < t.codes.size(); ++i) {
      os << csv_field(t.patient_id) << ',' << i << ',' << t.codes[i].render() << '\n';
    }
  }
}

void write_covariates(std::ostream& os, std::span<const SurvivalRecord> records) {
  os << "patient_id,birth_year,sex,shock_flag,total_stay_days,event,time_days\n";
  for (const auto& r : records) {
    const auto& c = r.covariates;
    os << csv_field(r.patient_id) << ',' << c.birth_year << ',' << c.sex << ',' << c.shock_flag
       << ',' << c.total_stay_days << ',' << r.event << ',' << format_double(r.time) << '\n';
  }
}

std::map<std::string, std::size_t> read_assignments(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("assignments CSV: empty file");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "patient_id" || header[1] != "cluster_id") {
    throw DataError("assignments CSV: expected header starting 'patient_id,cluster_id'");
  }
  std::map<std::string, std::size_t> out;
  std::size_t row_number = 0;
  while (std::getline(is, line)) {
    ++row_number;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < 2) throw DataError("assignments CSV row " + std::to_string(row_number) + ": too few fields");
    out[std::string(trim(cells[0]))] = parse_int<std::size_t>(cells[1], "cluster_id");
  }
  return out;
}

SequenceDatabase to_database(std::span<const PatientTrajectory> trajectories) {
  SequenceDatabase db;
  db.sequences.reserve(trajectories.size());
  for (const auto& t : trajectories) {
    Sequence s;
    s.reserve(t.codes.size());
    for (const auto& c : t.codes) s.push_back(c.render());
    db.sequences.push_back(std::move(s));
  }
  return db;
}

}  // namespace hfpath
