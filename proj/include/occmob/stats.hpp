#pragma once

#include <cstddef>
#include <vector>

#include "occmob/error.hpp"

namespace occmob::stats {

struct WeightedSample {
  std::vector<double> values;
  std::vector<double> weights;

  std::size_t size() const { return values.size(); }
  void validate() const; // equal lengths, strictly positive weights
  static WeightedSample uniform(std::vector<double> values);
};

double weighted_mean(const WeightedSample& s);
// Population-style: sqrt(sum w (x-mu)^2 / sum w).
double weighted_sd(const WeightedSample& s);

// Returns a sample with weighted mean 0 and weighted sd 1.
// Throws NumericError("degenerate-variable") on zero variance.
WeightedSample standardize(const WeightedSample& s);

struct WlsFit {
  double intercept = 0.0;
  std::vector<double> slopes;
  std::vector<double> residuals;
};

// Weighted least squares via normal equations (designs here have <= 4
// regressors). Throws NumericError("singular-design") when the design is
// collinear.
WlsFit wls(const WeightedSample& y, const std::vector<std::vector<double>>& regressors);

// Weighted percentile ranks in (0,100): rank of a tie block with weight
// below W_b and block weight W_t is 100 * (W_b + W_t/2) / W_total; every
// member of the block gets that rank.
std::vector<double> weighted_percentile_ranks(const WeightedSample& s);

struct Correlations {
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0; // tau-b
};

// Pearson on raw values, Spearman as Pearson on midpoint-tied ranks,
// Kendall tau-b via sort + merge inversion counting. Throws on zero
// variance in either input.
Correlations correlations(const std::vector<double>& a, const std::vector<double>& b);

// Standard normal quantile, p in (0,1).
double normal_quantile(double p);

}  // namespace occmob::stats
