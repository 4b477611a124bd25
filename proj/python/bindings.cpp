#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "hfpath/clustering.hpp"
#include "hfpath/codes.hpp"
#include "hfpath/editdist.hpp"
#include "hfpath/error.hpp"
#include "hfpath/pipeline.hpp"
#include "hfpath/spm.hpp"
#include "hfpath/survival.hpp"
#include "hfpath/survival_forest.hpp"
#include "hfpath/synthgen.hpp"
#include "hfpath/trajmetric.hpp"
#include "hfpath/tuning.hpp"

namespace py = pybind11;
using namespace hfpath;

namespace {

py::object to_fraction(const Rational& r) {
  static py::object fraction = py::module_::import("fractions").attr("Fraction");
  return fraction(r.num(), r.den());
}

PatientTrajectory to_trajectory(const std::string& id, const std::vector<std::string>& codes) {
  PatientTrajectory t;
  t.patient_id = id;
  for (const auto& c : codes) t.codes.push_back(parse_code(c));
  t.validate();
  return t;
}

std::vector<std::string> render(const PatientTrajectory& t) {
  std::vector<std::string> out;
  for (const auto& c : t.codes) out.push_back(c.render());
  return out;
}

SequenceDatabase to_database(const std::vector<std::vector<std::string>>& sequences) {
  SequenceDatabase db;
  db.sequences = sequences;
  return db;
}

py::array_t<double> to_array(const DistanceMatrix& m) {
  const auto n = static_cast<py::ssize_t>(m.size());
  py::array_t<double> out({n, n});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

DistanceMatrix from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw std::invalid_argument("expected a square matrix");
  const auto n = static_cast<std::size_t>(a.shape(0));
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return DistanceMatrix(std::move(ids), std::vector<double>(a.data(), a.data() + n * n));
}

py::dict curve(const StepFunction& f) {
  py::dict d;
  d["initial"] = f.initial();
  d["times"] = f.times();
  d["values"] = f.values();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hospitalization-trajectory mining, clustering and survival analysis";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  m.def("canonical_code", [](const std::string& s) { return parse_code(s).render(); },
        "Validate a 5/6-slot code (or 'Death') and return its canonical form.");
  m.def("levenshtein", &levenshtein);
  m.def("lev_ratio", [](std::string_view a, std::string_view b) { return to_fraction(lev_ratio(a, b)); });

  py::class_<WeightVector>(m, "WeightVector")
      .def(py::init([](const std::array<int, 4>& w) { return WeightVector(w); }))
      .def_static("parse", &WeightVector::parse)
      .def_static("defaults", &WeightVector::defaults)
      .def_property_readonly("values", &WeightVector::values)
      .def("__repr__", [](const WeightVector& w) { return "WeightVector(" + w.to_string() + ")"; })
      .def(py::self == py::self);

  m.def("d_icd10", [](const std::string& a, const std::string& b, const WeightVector& w) {
    return to_fraction(d_icd10(parse_code(a), parse_code(b), w));
  });
  m.def("d_patient", [](const std::vector<std::string>& a, const std::vector<std::string>& b, const WeightVector& w) {
    return to_fraction(d_patient(to_trajectory("a", a), to_trajectory("b", b), w));
  });
  m.def(
      "distance_matrix",
      [](const std::vector<std::pair<std::string, std::vector<std::string>>>& patients, const WeightVector& w) {
        std::vector<PatientTrajectory> ps;
        for (const auto& [id, codes] : patients) ps.push_back(to_trajectory(id, codes));
        return to_array(distance_matrix(ps, w));
      },
      py::arg("patients"), py::arg("weights"), "Patients as (id, [codes]) pairs; returns an n x n array.");

  m.def(
      "frequent_patterns",
      [](const std::vector<std::vector<std::string>>& sequences, std::size_t min_support, std::size_t min_len,
         std::size_t max_len) {
        MiningConfig cfg;
        cfg.min_support = min_support;
        cfg.min_len = min_len;
        cfg.max_len = max_len;
        std::vector<std::pair<std::vector<std::string>, std::size_t>> out;
        for (auto& p : frequent_patterns(to_database(sequences), cfg)) out.emplace_back(p.pattern, p.support);
        return out;
      },
      py::arg("sequences"), py::arg("min_support") = 1, py::arg("min_len") = 1, py::arg("max_len") = 3);

  m.def(
      "fit_kmedoids",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& matrix, std::size_t k,
         std::uint64_t seed, std::size_t max_iter) {
        const auto c = fit_kmedoids(from_array(matrix), k, seed, max_iter);
        py::dict d;
        d["medoids"] = c.medoids;
        d["assignment"] = c.assignment;
        d["distance_to_medoid"] = c.distance_to_medoid;
        d["total_distance"] = c.total_distance;
        d["history"] = c.history;
        d["converged"] = c.converged;
        return d;
      },
      py::arg("matrix"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iter") = 100);

  m.def(
      "cluster_score",
      [](const std::vector<std::vector<std::string>>& sequences, const std::vector<std::size_t>& assignment,
         std::size_t n_clusters, std::size_t top_patterns, std::size_t max_len) {
        ScoreConfig cfg;
        cfg.top_patterns = top_patterns;
        cfg.max_len = max_len;
        return cluster_score(to_database(sequences), assignment, n_clusters, cfg);
      },
      py::arg("sequences"), py::arg("assignment"), py::arg("n_clusters"), py::arg("top_patterns") = 3,
      py::arg("max_len") = 3);

  m.def("kaplan_meier", [](const std::vector<double>& t, const std::vector<int>& e) { return curve(kaplan_meier(t, e)); });
  m.def("nelson_aalen", [](const std::vector<double>& t, const std::vector<int>& e) { return curve(nelson_aalen(t, e)); });
  m.def("c_index", [](const std::vector<double>& r, const std::vector<double>& t, const std::vector<int>& e) {
    return c_index(r, t, e);
  });
  m.def("cox_fit", [](const Eigen::MatrixXd& x, const std::vector<double>& t, const std::vector<int>& e) {
    const auto model = cox_fit(x, t, e);
    py::dict d;
    d["beta"] = model.beta;
    d["log_partial_likelihood"] = model.log_partial_likelihood;
    d["null_log_partial_likelihood"] = model.null_log_partial_likelihood;
    d["iterations"] = model.iterations;
    d["converged"] = model.converged;
    d["aic"] = cox_aic(model, static_cast<std::size_t>(model.beta.size()));
    return d;
  });

  py::class_<SurvivalForest>(m, "SurvivalForest")
      .def_static(
          "fit",
          [](const Eigen::MatrixXd& x, const std::vector<double>& t, const std::vector<int>& e, std::size_t n_estimators,
             std::size_t min_samples_split, std::size_t min_samples_leaf, std::size_t mtry, bool bootstrap,
             std::uint64_t seed) {
            ForestParams p;
            p.n_estimators = n_estimators;
            p.min_samples_split = min_samples_split;
            p.min_samples_leaf = min_samples_leaf;
            p.mtry = mtry;
            p.bootstrap = bootstrap;
            p.seed = seed;
            return SurvivalForest::fit(x, t, e, p);
          },
          py::arg("x"), py::arg("times"), py::arg("events"), py::arg("n_estimators") = 100,
          py::arg("min_samples_split") = 10, py::arg("min_samples_leaf") = 15, py::arg("mtry") = 0,
          py::arg("bootstrap") = true, py::arg("seed") = 0)
      .def("predict",
           [](const SurvivalForest& f, const std::vector<double>& x) {
             const auto p = f.predict(x);
             py::dict d;
             d["cumulative_hazard"] = curve(p.cumulative_hazard);
             d["survival"] = curve(p.survival);
             d["risk"] = p.risk;
             return d;
           })
      .def("predict_risk", &SurvivalForest::predict_risk)
      .def_property_readonly("event_times", &SurvivalForest::event_times)
      .def_property_readonly("n_trees", [](const SurvivalForest& f) { return f.trees().size(); })
      .def("serialize", [](const SurvivalForest& f) { return py::bytes(f.serialize()); });

  m.def(
      "generate_cohort",
      [](std::size_t n_per_archetype, std::uint64_t seed, bool anchored, bool two) {
        CohortOptions o;
        o.n_per_archetype = n_per_archetype;
        o.seed = seed;
        if (anchored) o.anchor = hf_anchor_code();
        const auto c = generate(two ? two_archetypes() : default_archetypes(), o);
        py::list patients;
        for (std::size_t i = 0; i < c.trajectories.size(); ++i) {
          const auto& r = c.records[i];
          py::dict p;
          p["patient_id"] = r.patient_id;
          p["codes"] = render(c.trajectories[i]);
          p["birth_year"] = r.covariates.birth_year;
          p["sex"] = r.covariates.sex;
          p["n_hospitalizations"] = r.covariates.n_hospitalizations;
          p["shock_flag"] = r.covariates.shock_flag;
          p["total_stay_days"] = r.covariates.total_stay_days;
          p["time"] = r.time;
          p["event"] = r.event;
          p["label"] = c.labels[i];
          patients.append(p);
        }
        return patients;
      },
      py::arg("n_per_archetype") = 100, py::arg("seed") = 0, py::arg("anchored") = false,
      py::arg("two_archetypes") = false);

  m.def(
      "run_pipeline",
      [](const std::map<std::string, std::string>& config, const std::string& out) {
        auto cfg = PipelineConfig::from_values(config);
        cfg.out = out;
        return run_pipeline(cfg);
      },
      py::arg("config"), py::arg("out"), "Run the full pipeline; config maps 'section.key' to string values.");
}
