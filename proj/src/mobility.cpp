#include "occmob/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "occmob/csv.hpp"
#include "occmob/stats.hpp"

namespace occmob::mobility {

const char* to_string(Dimension d) {
  switch (d) {
    case Dimension::OccupationSei: return "occupation";
    case Dimension::OccupationSeiConstant: return "occupation-constant";
    case Dimension::EducationYears: return "education";
  }
  return "?";
}

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::P25: return "p25";
    case Estimator::P75: return "p75";
    case Estimator::IntervalBottomHalf: return "interval-bottom";
    case Estimator::IntervalTopHalf: return "interval-top";
  }
  return "?";
}

Dimension parse_dimension(const std::string& s) {
  if (s == "occupation") return Dimension::OccupationSei;
  if (s == "occupation-constant") return Dimension::OccupationSeiConstant;
  if (s == "education") return Dimension::EducationYears;
  throw ConfigError("unknown dimension '" + s + "'");
}

Estimator parse_estimator(const std::string& s) {
  if (s == "p25") return Estimator::P25;
  if (s == "p75") return Estimator::P75;
  if (s == "interval-bottom") return Estimator::IntervalBottomHalf;
  if (s == "interval-top") return Estimator::IntervalTopHalf;
  throw ConfigError("unknown estimator '" + s + "'");
}

StatusResolver StatusResolver::from_tables(const std::vector<sei::SeiTable>& tables) {
  StatusResolver r;
  r.kind_ = Kind::PerCohort;
  for (const auto& t : tables)
    for (const auto& [code, s] : t.scores) r.per_cohort_[t.cohort][code] = s.rescaled;
  return r;
}

StatusResolver StatusResolver::from_constant(const sei::CohortAveragedScores& averaged) {
  StatusResolver r;
  r.kind_ = Kind::Constant;
  r.constant_ = averaged.scores;
  return r;
}

StatusResolver StatusResolver::education() {
  StatusResolver r;
  r.kind_ = Kind::Education;
  return r;
}

std::optional<double> StatusResolver::lookup(const CohortId& cohort, int occupation) const {
  if (kind_ == Kind::Constant) {
    auto it = constant_.find(occupation);
    if (it == constant_.end()) return std::nullopt;
    return it->second;
  }
  auto ct = per_cohort_.find(cohort);
  if (ct == per_cohort_.end()) return std::nullopt;
  auto it = ct->second.find(occupation);
  if (it == ct->second.end()) return std::nullopt;
  return it->second;
}

std::optional<double> StatusResolver::son_status(const FatherSonPair& p) const {
  if (kind_ == Kind::Education) return static_cast<double>(p.son_education_years);
  return lookup(p.son_cohort, p.son_occupation);
}

std::optional<double> StatusResolver::father_status(const FatherSonPair& p) const {
  if (kind_ == Kind::Education) return static_cast<double>(p.father_education_years);
  return lookup(p.father_cohort, p.father_occupation);
}

RankResult rank_pairs(const std::vector<FatherSonPair>& pairs, const StatusResolver& resolver) {
  RankResult result;
  std::map<CohortId, std::vector<std::size_t>> by_cohort;
  std::vector<std::optional<double>> son_status(pairs.size()), father_status(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    son_status[i] = resolver.son_status(pairs[i]);
    father_status[i] = resolver.father_status(pairs[i]);
    if (!son_status[i] || !father_status[i]) {
      ++result.excluded;
      continue;
    }
    by_cohort[pairs[i].son_cohort].push_back(i);
  }
  for (const auto& [cohort, idx] : by_cohort) {
    stats::WeightedSample sons, fathers;
    for (std::size_t i : idx) {
      sons.values.push_back(*son_status[i]);
      sons.weights.push_back(pairs[i].weight);
      fathers.values.push_back(*father_status[i]);
      fathers.weights.push_back(pairs[i].weight);
    }
    auto son_ranks = stats::weighted_percentile_ranks(sons);
    auto father_ranks = stats::weighted_percentile_ranks(fathers);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& p = pairs[idx[k]];
      result.ranked.push_back({son_ranks[k], father_ranks[k], p.group, cohort, p.weight});
    }
  }
  return result;
}

MobilityEstimate estimate_mobility(const std::vector<RankedPair>& cell, Estimator estimator,
                                   const EstimateConfig& config) {
  MobilityEstimate est;
  est.estimator = estimator;
  est.n_pairs = cell.size();
  if (cell.size() < config.min_pairs)
    throw NumericError("insufficient-pairs", "cell has " + std::to_string(cell.size()) +
                                                 " pairs, floor is " +
                                                 std::to_string(config.min_pairs));
  if (!cell.empty()) {
    est.group = cell.front().group;
    est.cohort = cell.front().cohort;
  }
  if (estimator == Estimator::P25 || estimator == Estimator::P75) {
    stats::WeightedSample y;
    std::vector<double> x;
    for (const auto& p : cell) {
      y.values.push_back(p.son_rank);
      y.weights.push_back(p.weight);
      x.push_back(p.father_rank);
    }
    auto fit = stats::wls(y, {x});
    est.intercept = fit.intercept;
    est.slope = fit.slopes[0];
    double at = estimator == Estimator::P25 ? 25.0 : 75.0;
    est.point = fit.intercept + fit.slopes[0] * at;
  } else {
    bool bottom = estimator == Estimator::IntervalBottomHalf;
    double sw = 0.0, swy = 0.0;
    for (const auto& p : cell) {
      if (bottom ? p.father_rank < 50.0 : p.father_rank > 50.0) {
        sw += p.weight;
        swy += p.weight * p.son_rank;
      }
    }
    if (!(sw > 0.0))
      throw NumericError("insufficient-pairs", "empty father half-interval");
    est.point = swy / sw;
    est.slope = est.intercept = std::numeric_limits<double>::quiet_NaN();
  }
  est.ci_low = est.ci_high = est.point;
  return est;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(const BootstrapConfig& config, const std::vector<RankedPair>& cell,
                        Estimator estimator) {
  std::uint64_t h = splitmix64(config.seed);
  if (!cell.empty()) {
    for (char c : cell.front().cohort) h = splitmix64(h ^ static_cast<std::uint64_t>(c));
    h = splitmix64(h ^ static_cast<std::uint64_t>(cell.front().group));
  }
  return splitmix64(h ^ static_cast<std::uint64_t>(estimator));
}

}  // namespace

MobilityEstimate bootstrap_ci(const std::vector<RankedPair>& cell, Estimator estimator,
                              const BootstrapConfig& config,
                              const EstimateConfig& est_config) {
  MobilityEstimate full = estimate_mobility(cell, estimator, est_config);

  const std::size_t n = cell.size();
  const std::size_t B = config.resample_count ? config.resample_count : n;
  const std::size_t m = config.resample_size ? config.resample_size : n;

  std::uint64_t base = cell_seed(config, cell, estimator);
  std::vector<double> estimates;
  estimates.reserve(B);
  std::size_t failures = 0;
  std::vector<RankedPair> resample(m);
  for (std::size_t b = 0; b < B; ++b) {
    // Per-replicate stream, independent of execution order.
    std::mt19937_64 rng(splitmix64(base ^ b));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < m; ++i) resample[i] = cell[pick(rng)];
    try {
      estimates.push_back(estimate_mobility(resample, estimator, est_config).point);
    } catch (const NumericError&) {
      ++failures;
    }
  }
  if (failures * 5 > B)
    throw NumericError("unstable-bootstrap",
                       std::to_string(failures) + " of " + std::to_string(B) +
                           " resamples failed");

  double mean = 0.0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(estimates.size());
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  double sd = estimates.size() > 1
                  ? std::sqrt(var / static_cast<double>(estimates.size() - 1))
                  : 0.0;
  double z = stats::normal_quantile(0.5 + config.confidence_level / 2.0);

  MobilityEstimate est = full;
  est.point = mean;
  est.ci_low = mean - z * sd;
  est.ci_high = mean + z * sd;
  return est;
}

namespace {

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Table-5 style cell: "52.74, (n=358)".
std::string grid_cell(const MobilityEstimate* e) {
  return csv::escape_field(fmt2(e->point) + ", (n=" + std::to_string(e->n_pairs) + ")");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

ReportFiles mobility_report(const std::vector<MobilityEstimate>& estimates,
                            const CohortScheme& scheme, const std::string& out_dir,
                            const std::string& provenance) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  ReportFiles files;

  std::set<std::pair<Dimension, Estimator>> keys;
  for (const auto& e : estimates) keys.insert({e.dimension, e.estimator});

  static constexpr SocialGroup kGroups[] = {
      SocialGroup::Brahmin, SocialGroup::FC,     SocialGroup::OBC,  SocialGroup::Dalit,
      SocialGroup::Adivasi, SocialGroup::Muslim, SocialGroup::Other};

  for (auto [dim, estr] : keys) {
    std::map<std::pair<SocialGroup, CohortId>, const MobilityEstimate*> grid;
    for (const auto& e : estimates)
      if (e.dimension == dim && e.estimator == estr) grid[{e.group, e.cohort}] = &e;

    // Plot data: one row per (group, cohort) cell present.
    std::string plot_path = out_dir + "/mobility_" + std::string(to_string(dim)) + "_" +
                            to_string(estr) + "_plot.csv";
    {
      std::ofstream out(plot_path);
      if (!out) throw DataError("cannot write " + plot_path);
      if (!provenance.empty()) out << "# " << provenance << "\n";
      out << "group,cohort,point,ci_low,ci_high,n\n";
      for (SocialGroup g : kGroups)
        for (const auto& c : scheme.cohorts) {
          auto it = grid.find({g, c.id});
          if (it == grid.end()) continue;
          const auto* e = it->second;
          out << to_string(g) << "," << c.id << "," << fmt(e->point) << ","
              << fmt(e->ci_low) << "," << fmt(e->ci_high) << "," << e->n_pairs << "\n";
        }
    }
    files.plot_files.push_back(plot_path);

    // Group-by-cohort grid, cells as "point, (n=...)".
    std::string grid_path = out_dir + "/mobility_" + std::string(to_string(dim)) + "_" +
                            to_string(estr) + "_grid.csv";
    {
      std::ofstream out(grid_path);
      if (!out) throw DataError("cannot write " + grid_path);
      if (!provenance.empty()) out << "# " << provenance << "\n";
      std::set<CohortId> cohorts_present;
      for (const auto& [key, _] : grid) cohorts_present.insert(key.second);
      out << "group";
      for (const auto& c : scheme.cohorts)
        if (cohorts_present.count(c.id)) out << "," << c.id;
      out << "\n";
      for (SocialGroup g : kGroups) {
        bool any = false;
        for (const auto& c : scheme.cohorts)
          if (grid.count({g, c.id})) any = true;
        if (!any) continue;
        out << to_string(g);
        for (const auto& c : scheme.cohorts) {
          if (!cohorts_present.count(c.id)) continue;
          auto it = grid.find({g, c.id});
          if (it == grid.end()) {
            out << ",";
          } else {
            out << "," << grid_cell(it->second);
          }
        }
        out << "\n";
      }
    }
    files.grid_files.push_back(grid_path);
  }
  return files;
}

}  // namespace occmob::mobility
