#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "occmob/sei.hpp"
#include "occmob/types.hpp"

namespace occmob::mobility {

enum class Dimension { OccupationSei, OccupationSeiConstant, EducationYears };
enum class Estimator { P25, P75, IntervalBottomHalf, IntervalTopHalf };

const char* to_string(Dimension d);
const char* to_string(Estimator e);
Dimension parse_dimension(const std::string& s);
Estimator parse_estimator(const std::string& s);

struct RankedPair {
  double son_rank = 0.0;   // in (0,100), pooled over all groups in the son cohort
  double father_rank = 0.0;
  SocialGroup group = SocialGroup::Other;
  CohortId cohort;         // son cohort
  double weight = 1.0;
};

struct RankResult {
  std::vector<RankedPair> ranked;
  std::size_t excluded = 0; // pairs whose (cohort, occupation) did not resolve
};

// Status lookup used by rank_pairs; built from per-cohort SEI tables, the
// cohort-averaged constant table, or education years.
class StatusResolver {
 public:
  static StatusResolver from_tables(const std::vector<sei::SeiTable>& tables);
  static StatusResolver from_constant(const sei::CohortAveragedScores& averaged);
  static StatusResolver education();

  // nullopt when the (cohort, occupation) cell has no score.
  std::optional<double> son_status(const FatherSonPair& p) const;
  std::optional<double> father_status(const FatherSonPair& p) const;

 private:
  enum class Kind { PerCohort, Constant, Education } kind_ = Kind::Education;
  std::map<CohortId, std::map<int, double>> per_cohort_;
  std::map<int, double> constant_;
  std::optional<double> lookup(const CohortId& cohort, int occupation) const;
};

// Weighted percentile ranks over the pooled son and father status
// distributions, computed separately per son cohort.
RankResult rank_pairs(const std::vector<FatherSonPair>& pairs, const StatusResolver& resolver);

struct MobilityEstimate {
  SocialGroup group = SocialGroup::Other;
  CohortId cohort;
  Dimension dimension = Dimension::OccupationSei;
  Estimator estimator = Estimator::P25;
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_pairs = 0;
  double slope = 0.0;     // regression estimators only
  double intercept = 0.0;
};

struct BootstrapConfig {
  std::size_t resample_count = 0; // 0 => n_pairs (the default procedure)
  std::size_t resample_size = 0;  // 0 => n_pairs
  double confidence_level = 0.95;
  std::uint64_t seed = 42;
};

struct EstimateConfig {
  std::size_t min_pairs = 10;
};

// Point estimate on one (group, cohort) cell. Regression estimators fit
// weighted son_rank ~ father_rank and evaluate at 25 / 75; interval
// estimators take the weighted mean son rank over the bottom / top half of
// father ranks.
MobilityEstimate estimate_mobility(const std::vector<RankedPair>& cell, Estimator estimator,
                                   const EstimateConfig& config = {});

// Seeded resampling with replacement; point = mean of resample estimates,
// CI = point +/- z * sd. More than 20% failed resamples is an error
// ("unstable-bootstrap").
MobilityEstimate bootstrap_ci(const std::vector<RankedPair>& cell, Estimator estimator,
                              const BootstrapConfig& config,
                              const EstimateConfig& est_config = {});

struct ReportFiles {
  // (dimension, estimator) -> plot-data path written
  std::vector<std::string> plot_files;
  std::vector<std::string> grid_files;
};

// Group-by-cohort grids plus one plot-data file per (dimension, estimator).
ReportFiles mobility_report(const std::vector<MobilityEstimate>& estimates,
                            const CohortScheme& scheme, const std::string& out_dir,
                            const std::string& provenance);

}  // namespace occmob::mobility
