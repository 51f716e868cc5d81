#include "occmob/sei.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "occmob/csv.hpp"

namespace occmob::sei {

using stats::WeightedSample;

double SeiTable::rescaled_of(int occupation_code) const {
  auto it = scores.find(occupation_code);
  if (it == scores.end())
    throw DataError("no SEI score for occupation " + std::to_string(occupation_code) +
                    " in cohort " + cohort);
  return it->second.rescaled;
}

namespace {

struct Design {
  std::vector<double> age, edu, inc, weights;
  std::vector<int> occ;               // occupation per head (core cells only)
  std::vector<int> occ_index;         // dense index into `codes`
  std::vector<int> codes;             // sorted core occupation codes
};

std::vector<double> standardized(std::vector<double> v, const std::vector<double>& w) {
  WeightedSample s{std::move(v), w};
  return stats::standardize(s).values;
}

// Occupation means of a per-person vector, then re-assign to persons.
void score_and_assign(const Design& d, const std::vector<double>& person_sei,
                      std::vector<double>& occ_score, std::vector<double>& assigned) {
  std::vector<double> sum(d.codes.size(), 0.0), wsum(d.codes.size(), 0.0);
  for (std::size_t i = 0; i < person_sei.size(); ++i) {
    sum[d.occ_index[i]] += d.weights[i] * person_sei[i];
    wsum[d.occ_index[i]] += d.weights[i];
  }
  occ_score.resize(d.codes.size());
  for (std::size_t k = 0; k < d.codes.size(); ++k) occ_score[k] = sum[k] / wsum[k];
  assigned.resize(person_sei.size());
  for (std::size_t i = 0; i < assigned.size(); ++i) assigned[i] = occ_score[d.occ_index[i]];
}

}  // namespace

SeiTable estimate_sei(const std::vector<HeadObservation>& heads, const CohortId& cohort,
                      const OccupationCatalogue& catalogue, const SeiConfig& config) {
  // Partition occupations into core (>= min_cell_size heads) and small cells.
  std::map<int, int> cell_count;
  for (const auto& h : heads) ++cell_count[h.occupation_code];
  std::set<int> core;
  std::vector<int> small;
  for (const auto& [code, n] : cell_count)
    (n >= config.min_cell_size ? (void)core.insert(code) : small.push_back(code));
  if (core.size() < 2)
    throw NumericError("too-few-occupations",
                       "cohort " + cohort + " has fewer than 2 scorable occupations");

  Design d;
  d.codes.assign(core.begin(), core.end());
  std::map<int, int> code_index;
  for (std::size_t k = 0; k < d.codes.size(); ++k) code_index[d.codes[k]] = static_cast<int>(k);
  for (const auto& h : heads) {
    if (!core.count(h.occupation_code)) continue;
    d.age.push_back(h.age);
    d.edu.push_back(h.education_years);
    d.inc.push_back(config.log_income ? std::log1p(h.income) : h.income);
    d.weights.push_back(config.weighted ? h.weight : 1.0);
    d.occ.push_back(h.occupation_code);
    d.occ_index.push_back(code_index[h.occupation_code]);
  }

  // AGE/EDU/INC standardized once; the SEI vector is re-standardized every
  // scoring pass.
  auto age = standardized(d.age, d.weights);
  auto edu = standardized(d.edu, d.weights);
  auto inc = standardized(d.inc, d.weights);

  std::vector<double> occ_score, sei;
  {
    std::vector<double> start(age.size());
    for (std::size_t i = 0; i < start.size(); ++i) start[i] = 0.5 * edu[i] + 0.5 * inc[i];
    score_and_assign(d, standardized(std::move(start), d.weights), occ_score, sei);
  }

  auto regress = [&](const std::vector<double>& y,
                     std::vector<std::vector<double>> x) -> std::vector<double> {
    WeightedSample ys{y, d.weights};
    return stats::wls(ys, x).slopes;
  };

  SeiTable table;
  table.cohort = cohort;

  double best_beta42 = std::numeric_limits<double>::infinity();
  std::vector<double> best_scores;
  int iter = 0;
  bool converged = false;
  for (iter = 1; iter <= config.max_iters; ++iter) {
    auto sei_std = standardized(sei, d.weights);

    auto b4 = regress(inc, {age, sei_std}); // beta41, beta43
    auto b3 = regress(sei_std, {edu, age}); // beta32, beta31
    auto b2 = regress(edu, {age});          // beta21
    double beta41 = b4[0], beta43 = b4[1];
    double beta32 = b3[0], beta31 = b3[1];

    std::vector<double> sei_prime(age.size());
    for (std::size_t i = 0; i < age.size(); ++i)
      sei_prime[i] = beta43 * (inc[i] - beta41 * age[i]) + beta32 * edu[i] + beta31 * age[i];
    score_and_assign(d, standardized(std::move(sei_prime), d.weights), occ_score, sei);

    // Diagnostic regression. On perfectly separable data the assigned SEI is
    // collinear with EDU; that means the SEI absorbs education completely, so
    // treat the direct effect as zero.
    double b42_edu = 0.0;
    try {
      b42_edu = regress(inc, {age, edu, sei})[1]; // coefficient on EDU
    } catch (const NumericError&) {
      b42_edu = 0.0;
    }
    double beta42 = std::abs(b42_edu);
    table.beta42_trace.push_back(beta42);

    if (beta42 < best_beta42 - config.tol) {
      best_beta42 = beta42;
      best_scores = occ_score;
      table.beta_41 = beta41;
      table.beta_43 = beta43;
      table.beta_32 = beta32;
      table.beta_31 = beta31;
      table.beta_21 = b2[0];
      table.beta_42 = b42_edu;
    } else {
      converged = true;
      break;
    }
  }
  table.iterations = iter > config.max_iters ? config.max_iters : iter;
  table.converged = converged;

  std::map<int, double> raw;
  for (std::size_t k = 0; k < d.codes.size(); ++k) raw[d.codes[k]] = best_scores[k];

  // Small cells pool up to the 1-digit parent: mean of scored siblings, or
  // the overall mean when no sibling was scored.
  double overall = 0.0;
  for (const auto& [_, s] : raw) overall += s;
  overall /= static_cast<double>(raw.size());
  std::set<int> pooled;
  for (int code : small) {
    int parent = catalogue.contains(code) ? catalogue.at(code).one_digit_code : code / 10;
    double sum = 0.0;
    int n = 0;
    for (const auto& [c, s] : raw) {
      if (catalogue.contains(c) && catalogue.at(c).one_digit_code == parent) {
        sum += s;
        ++n;
      }
    }
    raw[code] = n > 0 ? sum / n : overall;
    pooled.insert(code);
  }

  auto rescaled = rescale_scores(raw, config.rescale_lo, config.rescale_hi);
  for (const auto& [code, s] : raw)
    table.scores[code] = SeiScore{s, rescaled.at(code), pooled.count(code) > 0};
  return table;
}

std::map<int, double> rescale_scores(const std::map<int, double>& raw, double lo, double hi) {
  if (raw.empty()) throw DataError("rescale_scores: empty input");
  double mn = raw.begin()->second, mx = mn;
  for (const auto& [_, v] : raw) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  std::map<int, double> out;
  if (mx == mn) {
    for (const auto& [k, _] : raw) out[k] = (lo + hi) / 2.0;
    return out;
  }
  for (const auto& [k, v] : raw) out[k] = lo + (hi - lo) * (v - mn) / (mx - mn);
  return out;
}

CohortAveragedScores average_across_cohorts(const std::vector<SeiTable>& tables) {
  if (tables.empty()) throw DataError("average_across_cohorts: no tables");
  std::map<int, std::pair<double, int>> acc;
  for (const auto& t : tables)
    for (const auto& [code, s] : t.scores) {
      acc[code].first += s.rescaled;
      ++acc[code].second;
    }
  CohortAveragedScores out;
  for (const auto& [code, a] : acc) out.scores[code] = a.first / a.second;
  return out;
}

std::vector<StabilityRow> cohort_stability(const std::vector<SeiTable>& tables) {
  std::vector<StabilityRow> rows;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    StabilityRow row;
    row.cohort = tables[i].cohort;
    if (i > 0) {
      std::vector<double> prev, cur;
      for (const auto& [code, s] : tables[i].scores) {
        auto it = tables[i - 1].scores.find(code);
        if (it != tables[i - 1].scores.end()) {
          prev.push_back(it->second.rescaled);
          cur.push_back(s.rescaled);
        }
      }
      if (prev.size() < 3)
        throw NumericError("insufficient-overlap",
                           "fewer than 3 common occupations between " + tables[i - 1].cohort +
                               " and " + tables[i].cohort);
      row.corr = stats::correlations(cur, prev);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void write_sei_table(const std::string& path, const SeiTable& table,
                     const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "cohort,occupation_code,raw_sei,rescaled_sei,pooled\n";
  for (const auto& [code, s] : table.scores)
    out << table.cohort << "," << code << "," << fmt(s.raw) << "," << fmt(s.rescaled) << ","
        << (s.pooled ? 1 : 0) << "\n";
}

SeiTable read_sei_table(const std::string& path) {
  auto t = csv::Table::read_file(path);
  SeiTable table;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    table.cohort = t.at(i, "cohort");
    SeiScore s;
    s.raw = std::stod(t.at(i, "raw_sei"));
    s.rescaled = std::stod(t.at(i, "rescaled_sei"));
    s.pooled = t.at(i, "pooled") == "1";
    table.scores[std::stoi(t.at(i, "occupation_code"))] = s;
  }
  return table;
}

void write_coefficients(const std::string& path, const std::vector<SeiTable>& tables,
                        const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "cohort,beta43,beta32,beta41,beta31,beta21,beta42,iterations,converged\n";
  char buf[128];
  for (const auto& t : tables) {
    std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f,%.4f,%.4f,%.6g", t.beta_43, t.beta_32,
                  t.beta_41, t.beta_31, t.beta_21, t.beta_42);
    out << t.cohort << "," << buf << "," << t.iterations << "," << (t.converged ? 1 : 0)
        << "\n";
  }
}

void write_stability(const std::string& path, const std::vector<StabilityRow>& rows,
                     const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "cohort,pearson,spearman,kendall\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f,%.2f", r.corr.pearson, r.corr.spearman,
                  r.corr.kendall);
    out << r.cohort << "," << buf << "\n";
  }
}

}  // namespace occmob::sei
