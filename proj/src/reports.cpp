#include "hfpath/reports.hpp"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>

#include "hfpath/text.hpp"

namespace hfpath {

FrequencyTable frequency_table(std::span<const PatientTrajectory> trajectories,
                               std::size_t positions, std::size_t top_k) {
  if (positions < 1) throw std::invalid_argument("frequency_table: positions must be >= 1");
  FrequencyTable table;
  table.columns.resize(positions);
  for (std::size_t n = 0; n < positions; ++n) {
    std::map<std::string, std::size_t> counts;
    std::size_t present = 0;
    for (const auto& t : trajectories) {
      if (n >= t.codes.size()) continue;
      ++present;
      ++counts[t.codes[n].render()];
    }
    auto& column = table.columns[n];
    for (const auto& [code, count] : counts) {
      column.push_back({code, count, static_cast<double>(count) / static_cast<double>(present)});
    }
    std::stable_sort(column.begin(), column.end(), [](const FrequencyCell& a, const FrequencyCell& b) {
      return a.count > b.count;
    });
    if (column.size() > top_k) column.resize(top_k);
  }
  return table;
}

SankeyFlows sankey_export(std::span<const PatientTrajectory> cluster,
                          std::span<const std::pair<std::size_t, std::size_t>> position_pairs,
                          std::size_t top_k) {
  SankeyFlows flows;
  for (const auto& [from, to] : position_pairs) {
    if (to != from + 1) throw std::invalid_argument("sankey_export: position pairs must be consecutive");
    std::map<std::pair<std::string, std::string>, std::size_t> counts;
    for (const auto& t : cluster) {
      if (from >= t.codes.size()) continue;
      const std::string target = to < t.codes.size() ? t.codes[to].render() : std::string(kNoSuccessor);
      ++counts[{t.codes[from].render(), target}];
    }
    std::vector<SankeyEdge> edges;
    for (const auto& [pair, count] : counts) edges.push_back({from, pair.first, to, pair.second, count});
    std::stable_sort(edges.begin(), edges.end(),
                     [](const SankeyEdge& a, const SankeyEdge& b) { return a.count > b.count; });
    if (edges.size() > top_k) edges.resize(top_k);
    flows.edges.insert(flows.edges.end(), edges.begin(), edges.end());
  }
  return flows;
}

std::string sankey_json(const SankeyFlows& flows, const std::string& label) {
  nlohmann::ordered_json doc;
  doc["label"] = label;
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : flows.edges) {
    doc["edges"].push_back({{"source_position", e.source_position},
                            {"source_code", e.source_code},
                            {"target_position", e.target_position},
                            {"target_code", e.target_code},
                            {"count", e.count}});
  }
  return doc.dump(2) + "\n";
}

void write_frequency_rows(std::ostream& os, const FrequencyTable& table, const std::string& label) {
  for (std::size_t n = 0; n < table.columns.size(); ++n) {
    for (const auto& cell : table.columns[n]) {
      os << csv_field(label) << ',' << n << ',' << cell.code << ',' << cell.count << ','
         << format_fixed(cell.proportion, 6) << '\n';
    }
  }
}

void write_pattern_rows(std::ostream& os, const SequenceDatabase& db, const std::string& label,
                        const PatternReportOptions& options) {
  for (std::size_t len = options.min_len; len <= options.max_len; ++len) {
    MiningConfig cfg;
    cfg.min_support = options.min_support;
    cfg.min_len = len;
    cfg.max_len = len;
    cfg.top_k = options.top_k;
    const auto patterns = frequent_patterns(db, cfg);
    for (std::size_t rank = 0; rank < patterns.size(); ++rank) {
      const auto& p = patterns[rank];
      const double freq = static_cast<double>(p.support) / static_cast<double>(db.size());
      os << csv_field(label) << ',' << len << ',' << rank + 1 << ',' << p.support << ','
         << format_fixed(freq, 6) << ',' << csv_field(format_pattern(p.pattern)) << '\n';
    }
  }
}

}  // namespace hfpath
