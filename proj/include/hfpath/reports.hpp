#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hfpath/spm.hpp"
#include "hfpath/trajmetric.hpp"

namespace hfpath {

inline constexpr std::string_view kNoSuccessor = "none";

struct FrequencyCell {
  std::string code;
  std::size_t count = 0;
  double proportion = 0.0;
};

/// Per hospitalization position n (0-based), the top codes by share among
/// patients that have an n-th stay.
struct FrequencyTable {
  std::vector<std::vector<FrequencyCell>> columns;
};

FrequencyTable frequency_table(std::span<const PatientTrajectory> trajectories,
                               std::size_t positions, std::size_t top_k);

struct SankeyEdge {
  std::size_t source_position = 0;
  std::string source_code;
  std::size_t target_position = 0;
  std::string target_code;
  std::size_t count = 0;

  friend bool operator==(const SankeyEdge&, const SankeyEdge&) = default;
};

struct SankeyFlows {
  std::vector<SankeyEdge> edges;
};

/// Bigram flows between consecutive positions. Members without a successor
/// contribute a transition to the "none" token; members shorter than the
/// source position are skipped. Keeps the top_k bigrams per position pair
/// (count descending, then codes ascending).
SankeyFlows sankey_export(std::span<const PatientTrajectory> cluster,
                          std::span<const std::pair<std::size_t, std::size_t>> position_pairs,
                          std::size_t top_k);

// JSON document {"label": ..., "edges": [{source_position, source_code, ...}]}
std::string sankey_json(const SankeyFlows& flows, const std::string& label);

// label,position,code,count,proportion
void write_frequency_rows(std::ostream& os, const FrequencyTable& table, const std::string& label);

struct PatternReportOptions {
  std::size_t min_support = 1;
  std::size_t min_len = 1;
  std::size_t max_len = 3;
  std::size_t top_k = 3;
};

// label,length,rank,count,freq,pattern: the top_k patterns of each length,
// frequency = count / sequence count at 6 decimals.
void write_pattern_rows(std::ostream& os, const SequenceDatabase& db, const std::string& label,
                        const PatternReportOptions& options);

}  // namespace hfpath
