// Python bindings for the main operations: rank statistics, SEI scaling,
// mobility estimation, transition matrices, and synthetic data generation.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "occmob/ingest.hpp"
#include "occmob/mobility.hpp"
#include "occmob/sei.hpp"
#include "occmob/stats.hpp"
#include "occmob/synth.hpp"
#include "occmob/transitions.hpp"

namespace py = pybind11;
using namespace occmob;

namespace {

stats::WeightedSample sample(std::vector<double> values, std::vector<double> weights) {
  if (weights.empty()) return stats::WeightedSample::uniform(std::move(values));
  return {std::move(values), std::move(weights)};
}

py::dict estimate_dict(const mobility::MobilityEstimate& e) {
  py::dict d;
  d["point"] = e.point;
  d["ci_low"] = e.ci_low;
  d["ci_high"] = e.ci_high;
  d["n_pairs"] = e.n_pairs;
  d["slope"] = e.slope;
  d["intercept"] = e.intercept;
  return d;
}

std::vector<mobility::RankedPair> cell_of(const std::vector<double>& son_ranks,
                                          const std::vector<double>& father_ranks,
                                          std::vector<double> weights) {
  if (son_ranks.size() != father_ranks.size())
    throw DataError("son and father rank vectors differ in length");
  if (weights.empty()) weights.assign(son_ranks.size(), 1.0);
  std::vector<mobility::RankedPair> cell;
  for (std::size_t i = 0; i < son_ranks.size(); ++i)
    cell.push_back({son_ranks[i], father_ranks[i], SocialGroup::Other, "cell", weights[i]});
  return cell;
}

}  // namespace

PYBIND11_MODULE(_occmob, m) {
  m.doc() = "Intergenerational occupational mobility estimation";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<NumericError>(m, "NumericError");

  m.def(
      "percentile_ranks",
      [](std::vector<double> values, std::vector<double> weights) {
        return stats::weighted_percentile_ranks(sample(std::move(values), std::move(weights)));
      },
      py::arg("values"), py::arg("weights") = std::vector<double>{},
      "Weighted percentile ranks in (0, 100); ties share the block midpoint.");

  m.def(
      "wls",
      [](std::vector<double> y, std::vector<std::vector<double>> regressors,
         std::vector<double> weights) {
        auto fit = stats::wls(sample(std::move(y), std::move(weights)), regressors);
        py::dict d;
        d["intercept"] = fit.intercept;
        d["slopes"] = fit.slopes;
        return d;
      },
      py::arg("y"), py::arg("regressors"), py::arg("weights") = std::vector<double>{},
      "Weighted least squares with intercept.");

  m.def(
      "correlations",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        auto c = stats::correlations(a, b);
        py::dict d;
        d["pearson"] = c.pearson;
        d["spearman"] = c.spearman;
        d["kendall"] = c.kendall;
        return d;
      },
      py::arg("a"), py::arg("b"), "Pearson, Spearman and Kendall tau-b.");

  m.def(
      "estimate_sei",
      [](std::vector<double> age, std::vector<double> education_years,
         std::vector<double> income, std::vector<int> occupation,
         const std::string& catalogue_path) {
        auto n = age.size();
        if (education_years.size() != n || income.size() != n || occupation.size() != n)
          throw DataError("estimate_sei inputs differ in length");
        std::vector<sei::HeadObservation> heads(n);
        for (std::size_t i = 0; i < n; ++i)
          heads[i] = {age[i], education_years[i], income[i], occupation[i], 1.0};
        auto catalogue = OccupationCatalogue::load_csv(catalogue_path);
        auto table = sei::estimate_sei(heads, "cohort", catalogue, {});
        py::dict scores;
        for (const auto& [code, s] : table.scores) scores[py::int_(code)] = s.rescaled;
        py::dict d;
        d["scores"] = scores;
        d["beta43"] = table.beta_43;
        d["beta32"] = table.beta_32;
        d["beta42"] = table.beta_42;
        d["iterations"] = table.iterations;
        d["converged"] = table.converged;
        return d;
      },
      py::arg("age"), py::arg("education_years"), py::arg("income"), py::arg("occupation"),
      py::arg("catalogue_path"),
      "Run the alternating-least-squares SEI scaling on one cohort of heads; "
      "returns rescaled (1..80) occupation scores and the path coefficients.");

  m.def(
      "estimate_mobility",
      [](const std::vector<double>& son_ranks, const std::vector<double>& father_ranks,
         const std::string& estimator, std::vector<double> weights) {
        auto cell = cell_of(son_ranks, father_ranks, std::move(weights));
        return estimate_dict(
            mobility::estimate_mobility(cell, mobility::parse_estimator(estimator)));
      },
      py::arg("son_ranks"), py::arg("father_ranks"), py::arg("estimator") = "p25",
      py::arg("weights") = std::vector<double>{},
      "Point estimate on one cell: p25 | p75 | interval-bottom | interval-top.");

  m.def(
      "bootstrap_ci",
      [](const std::vector<double>& son_ranks, const std::vector<double>& father_ranks,
         const std::string& estimator, std::size_t resamples, double level,
         std::uint64_t seed, std::vector<double> weights) {
        auto cell = cell_of(son_ranks, father_ranks, std::move(weights));
        mobility::BootstrapConfig cfg;
        cfg.resample_count = resamples;
        cfg.confidence_level = level;
        cfg.seed = seed;
        return estimate_dict(
            mobility::bootstrap_ci(cell, mobility::parse_estimator(estimator), cfg));
      },
      py::arg("son_ranks"), py::arg("father_ranks"), py::arg("estimator") = "p25",
      py::arg("resamples") = std::size_t{0}, py::arg("level") = 0.95,
      py::arg("seed") = std::uint64_t{42}, py::arg("weights") = std::vector<double>{},
      "Seeded pairs bootstrap; resamples = 0 uses one resample per pair.");

  m.def(
      "transition_matrix",
      [](const std::vector<int>& father_occ, const std::vector<int>& son_occ,
         const std::string& catalogue_path, std::vector<double> weights) {
        if (father_occ.size() != son_occ.size())
          throw DataError("transition_matrix inputs differ in length");
        if (weights.empty()) weights.assign(father_occ.size(), 1.0);
        std::vector<FatherSonPair> pairs(father_occ.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) {
          pairs[i].father_occupation = father_occ[i];
          pairs[i].son_occupation = son_occ[i];
          pairs[i].weight = weights[i];
        }
        auto catalogue = OccupationCatalogue::load_csv(catalogue_path);
        auto mat = transitions::transition_matrix(pairs, catalogue);
        py::dict d;
        d["rows"] = mat.rows;
        d["row_counts"] = mat.row_counts;
        return d;
      },
      py::arg("father_occupations"), py::arg("son_occupations"), py::arg("catalogue_path"),
      py::arg("weights") = std::vector<double>{},
      "Row-normalized 7x7 transition matrix over broad occupation groups.");

  m.def(
      "generate_survey",
      [](const std::string& spec_path, const std::string& out_path) {
        auto spec = synth::SynthSpec::from_json_file(spec_path);
        auto gen = synth::generate(spec);
        synth::write_survey(out_path, gen.records, "");
        return gen.records.size();
      },
      py::arg("spec_path"), py::arg("out_path"),
      "Generate a synthetic survey from a spec file; returns the record count.");
}
