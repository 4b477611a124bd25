#include "hfpath/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "hfpath/random.hpp"

namespace hfpath {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

const DiagnosisCode& draw_code(Rng& rng, const std::vector<WeightedCode>& pool, double total) {
  double u = rng.uniform() * total;
  for (const auto& wc : pool) {
    if (u < wc.weight) return wc.code;
    u -= wc.weight;
  }
  return pool.back().code;
}

int stay_length(Rng& rng, double mean_days) {
  if (mean_days <= 1.0) return 1;
  return 1 + static_cast<int>(std::floor(rng.exponential(1.0 / (mean_days - 1.0))));
}

std::vector<WeightedCode> pool(std::initializer_list<std::pair<const char*, double>> codes) {
  std::vector<WeightedCode> out;
  for (const auto& [text, weight] : codes) out.push_back({parse_code(text), weight});
  return out;
}

}  // namespace

void ArchetypeSpec::validate() const {
  if (code_pool.empty()) throw std::invalid_argument("archetype " + id + ": empty code pool");
  for (double p : {stickiness, death_hazard, female_probability, shock_probability}) {
    if (!is_probability(p)) throw std::invalid_argument("archetype " + id + ": probability out of range");
  }
  for (const auto& wc : code_pool) {
    if (wc.code.is_death() || wc.weight <= 0.0) {
      throw std::invalid_argument("archetype " + id + ": invalid pool entry");
    }
  }
  if (birth_year_min > birth_year_max || base_rate <= 0.0) {
    throw std::invalid_argument("archetype " + id + ": invalid covariate model");
  }
}

Cohort generate(const std::vector<ArchetypeSpec>& archetypes, const CohortOptions& options) {
  if (options.n_per_archetype < 1) throw std::invalid_argument("generate: n_per_archetype must be >= 1");
  if (options.max_len < 1) throw std::invalid_argument("generate: max_len must be >= 1");
  for (const auto& a : archetypes) a.validate();

  Rng rng(options.seed);
  Cohort cohort;
  const std::size_t total = archetypes.size() * options.n_per_archetype;
  cohort.trajectories.reserve(total);
  cohort.records.reserve(total);
  cohort.labels.reserve(total);

  std::size_t patient = 0;
  for (std::size_t a = 0; a < archetypes.size(); ++a) {
    const ArchetypeSpec& spec = archetypes[a];
    double pool_total = 0.0;
    for (const auto& wc : spec.code_pool) pool_total += wc.weight;

    for (std::size_t k = 0; k < options.n_per_archetype; ++k, ++patient) {
      char id[16];
      std::snprintf(id, sizeof id, "P%05zu", patient + 1);

      Covariates cov;
      cov.birth_year = static_cast<int>(rng.uniform_int(spec.birth_year_min, spec.birth_year_max));
      cov.sex = rng.bernoulli(spec.female_probability) ? 2 : 1;
      cov.shock_flag = rng.bernoulli(spec.shock_probability) ? 1 : 0;
      const double span = spec.birth_year_max - spec.birth_year_min;
      const double age_norm = span > 0 ? (spec.birth_year_max - cov.birth_year) / span : 0.0;
      const double rate = spec.base_rate * std::exp(spec.beta_age * age_norm +
                                                    spec.beta_sex * (cov.sex - 1) +
                                                    spec.beta_shock * cov.shock_flag);
      double survival = rng.exponential(rate);

      PatientTrajectory traj;
      traj.patient_id = id;
      traj.codes.push_back(options.anchor ? *options.anchor : draw_code(rng, spec.code_pool, pool_total));
      double stay_start = 0.0;
      int days = stay_length(rng, spec.mean_stay_days);
      cov.total_stay_days = days;
      while (true) {
        const double discharge = stay_start + days;
        if (rng.bernoulli(spec.death_hazard) && discharge < survival &&
            discharge <= options.horizon_days) {
          survival = discharge;
          traj.codes.push_back(DiagnosisCode::death());
          break;
        }
        if (traj.codes.size() >= options.max_len) break;
        stay_start = discharge + rng.exponential(1.0 / spec.mean_gap_days);
        if (stay_start >= std::min(survival, options.horizon_days)) {
          if (survival <= options.horizon_days) traj.codes.push_back(DiagnosisCode::death());
          break;
        }
        const DiagnosisCode& previous = traj.codes.back();
        traj.codes.push_back(rng.bernoulli(spec.stickiness) && !(options.anchor && traj.codes.size() == 1)
                                 ? previous
                                 : draw_code(rng, spec.code_pool, pool_total));
        days = stay_length(rng, spec.mean_stay_days);
        cov.total_stay_days += days;
      }
      cov.n_hospitalizations = static_cast<int>(traj.codes.size() - (traj.died() ? 1 : 0));

      SurvivalRecord rec;
      rec.patient_id = id;
      rec.covariates = cov;
      rec.event = survival <= options.horizon_days ? 1 : 0;
      rec.time = std::min(survival, options.horizon_days);

      cohort.trajectories.push_back(std::move(traj));
      cohort.records.push_back(std::move(rec));
      cohort.labels.push_back(a);
    }
  }
  return cohort;
}

DiagnosisCode hf_anchor_code() { return parse_code("05M09"); }

std::vector<ArchetypeSpec> default_archetypes() {
  std::vector<ArchetypeSpec> out(4);

  out[0].id = "cardiac";
  out[0].code_pool = pool({{"05M092", 4}, {"05M081", 2}, {"05K101", 1}, {"05M222", 1}});
  out[0].stickiness = 0.6;
  out[0].death_hazard = 0.04;
  out[0].base_rate = 1.0 / 1800.0;

  out[1].id = "respiratory";
  out[1].code_pool = pool({{"04M053", 4}, {"04M132", 2}, {"04M241", 1}});
  out[1].stickiness = 0.6;
  out[1].death_hazard = 0.06;
  out[1].base_rate = 1.0 / 1200.0;

  out[2].id = "metabolic";
  out[2].code_pool = pool({{"10M161", 3}, {"11M042", 3}, {"11M043", 1}});
  out[2].stickiness = 0.5;
  out[2].death_hazard = 0.03;
  out[2].base_rate = 1.0 / 2200.0;

  out[3].id = "multisystem";
  out[3].code_pool = pool({{"23M204", 3}, {"16M113", 2}, {"23Z021", 2}});
  out[3].stickiness = 0.7;
  out[3].death_hazard = 0.08;
  out[3].mean_stay_days = 14.0;
  out[3].mean_gap_days = 60.0;
  out[3].base_rate = 1.0 / 900.0;

  for (auto& a : out) {
    a.beta_age = 1.5;
    a.beta_sex = 0.3;
    a.beta_shock = 1.0;
  }
  return out;
}

std::vector<ArchetypeSpec> two_archetypes() {
  auto all = default_archetypes();
  all.resize(2);
  // Monthly readmissions and low mortality: most trajectories reach max_len,
  // so the code pools rather than trajectory length separate the two groups.
  for (auto& a : all) {
    a.mean_gap_days = 30.0;
    a.death_hazard = 0.0;
    a.base_rate = 1.0 / 4000.0;
  }
  return all;
}

}  // namespace hfpath
