#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hfpath/spm.hpp"
#include "hfpath/survival.hpp"
#include "hfpath/trajmetric.hpp"

namespace hfpath {

struct Dataset {
  std::vector<PatientTrajectory> trajectories;
  std::vector<SurvivalRecord> records;  // aligned with trajectories
};

// CSV schema: patient_id,seq_index,code. Patients keep first-appearance
// order; each patient's rows are sorted by seq_index.
std::vector<PatientTrajectory> read_trajectories(std::istream& is);
std::vector<PatientTrajectory> load_trajectories(const std::filesystem::path& path);

// CSV schema: patient_id,birth_year,sex,shock_flag,total_stay_days,event,time_days.
// n_hospitalizations is derived from the trajectory length.
std::vector<SurvivalRecord> join_covariates(std::istream& is,
                                            std::span<const PatientTrajectory> trajectories);

Dataset load_dataset(const std::filesystem::path& trajectory_csv,
                     const std::filesystem::path& covariate_csv);

void write_trajectories(std::ostream& os, std::span<const PatientTrajectory> trajectories);
void write_covariates(std::ostream& os, std::span<const SurvivalRecord> records);

// patient_id -> cluster id, from an assignments CSV.
std::map<std::string, std::size_t> read_assignments(std::istream& is);

SequenceDatabase to_database(std::span<const PatientTrajectory> trajectories);

}  // namespace hfpath
