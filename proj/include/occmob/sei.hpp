#pragma once

#include <map>
#include <string>
#include <vector>

#include "occmob/stats.hpp"
#include "occmob/types.hpp"

namespace occmob::sei {

// One household head used for scaling: AGE, EDU (years), INC, occupation.
struct HeadObservation {
  double age = 0.0;
  double education_years = 0.0;
  double income = 0.0;
  int occupation_code = -1;
  double weight = 1.0;
};

struct SeiConfig {
  double tol = 1e-6;       // stop when |beta42| decreases by less than this
  int max_iters = 100;
  int min_cell_size = 5;   // smaller occupation cells pool up to 1-digit parent
  bool weighted = false;   // weight the path regressions by sample weights
  bool log_income = false; // use log(1+INC) before standardization
  double rescale_lo = 1.0;
  double rescale_hi = 80.0;
};

struct SeiScore {
  double raw = 0.0;
  double rescaled = 0.0;
  bool pooled = false; // scored from the 1-digit parent mean (small cell)
};

struct SeiTable {
  CohortId cohort;
  std::map<int, SeiScore> scores;
  double beta_43 = 0.0;
  double beta_32 = 0.0;
  double beta_41 = 0.0;
  double beta_31 = 0.0;
  double beta_21 = 0.0;
  double beta_42 = 0.0; // at the stopping iterate
  std::vector<double> beta42_trace; // |beta42| per scoring iteration
  int iterations = 0;
  bool converged = false;

  double rescaled_of(int occupation_code) const; // throws DataError if absent
};

// Alternating least squares over the AGE -> EDU -> SEI -> INC path model.
SeiTable estimate_sei(const std::vector<HeadObservation>& heads, const CohortId& cohort,
                      const OccupationCatalogue& catalogue, const SeiConfig& config);

// Affine min-max map onto [lo, hi]; zero spread maps everything to the midpoint.
std::map<int, double> rescale_scores(const std::map<int, double>& raw, double lo = 1.0,
                                     double hi = 80.0);

struct CohortAveragedScores {
  std::map<int, double> scores; // occupation -> mean rescaled score over cohorts present
};

CohortAveragedScores average_across_cohorts(const std::vector<SeiTable>& tables);

struct StabilityRow {
  CohortId cohort;
  stats::Correlations corr; // vs previous cohort; zeros for the first row
};

// Consecutive-cohort correlations of rescaled scores, joined on common
// occupations. Overlap below 3 occupations is an error.
std::vector<StabilityRow> cohort_stability(const std::vector<SeiTable>& tables);

void write_sei_table(const std::string& path, const SeiTable& table,
                     const std::string& provenance);
SeiTable read_sei_table(const std::string& path);
void write_coefficients(const std::string& path, const std::vector<SeiTable>& tables,
                        const std::string& provenance);
void write_stability(const std::string& path, const std::vector<StabilityRow>& rows,
                     const std::string& provenance);

}  // namespace occmob::sei
