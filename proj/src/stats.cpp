#include "occmob/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

namespace occmob::stats {

void WeightedSample::validate() const {
  if (values.size() != weights.size())
    throw DataError("weighted sample: values/weights length mismatch");
  for (double w : weights)
    if (!(w > 0.0)) throw DataError("weighted sample: non-positive weight");
}

WeightedSample WeightedSample::uniform(std::vector<double> values) {
  WeightedSample s;
  s.weights.assign(values.size(), 1.0);
  s.values = std::move(values);
  return s;
}

double weighted_mean(const WeightedSample& s) {
  double sw = 0.0, swx = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sw += s.weights[i];
    swx += s.weights[i] * s.values[i];
  }
  return swx / sw;
}

double weighted_sd(const WeightedSample& s) {
  double mu = weighted_mean(s);
  double sw = 0.0, ss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double d = s.values[i] - mu;
    sw += s.weights[i];
    ss += s.weights[i] * d * d;
  }
  return std::sqrt(ss / sw);
}

WeightedSample standardize(const WeightedSample& s) {
  s.validate();
  double mu = weighted_mean(s);
  double sd = weighted_sd(s);
  if (!(sd > 0.0)) throw NumericError("degenerate-variable", "zero weighted variance");
  WeightedSample out = s;
  for (double& v : out.values) v = (v - mu) / sd;
  return out;
}

WlsFit wls(const WeightedSample& y, const std::vector<std::vector<double>>& regressors) {
  y.validate();
  const std::size_t n = y.size();
  const std::size_t k = regressors.size();
  if (n < k + 2) throw NumericError("singular-design", "too few observations");
  for (const auto& x : regressors)
    if (x.size() != n) throw DataError("wls: regressor length mismatch");

  // Normal equations over [1, x1..xk], solved by Gaussian elimination with
  // partial pivoting.
  const std::size_t p = k + 1;
  std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
  std::vector<double> b(p, 0.0);
  auto reg = [&](std::size_t j, std::size_t i) -> double {
    return j == 0 ? 1.0 : regressors[j - 1][i];
  };
  for (std::size_t i = 0; i < n; ++i) {
    double w = y.weights[i];
    for (std::size_t r = 0; r < p; ++r) {
      double xr = reg(r, i);
      b[r] += w * xr * y.values[i];
      for (std::size_t c = r; c < p; ++c) a[r][c] += w * xr * reg(c, i);
    }
  }
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < r; ++c) a[r][c] = a[c][r];

  double scale = 0.0;
  for (std::size_t r = 0; r < p; ++r) scale = std::max(scale, std::abs(a[r][r]));
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12 * std::max(scale, 1.0))
      throw NumericError("singular-design", "collinear regressors");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < p; ++r) {
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < p; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> coef(p);
  for (std::size_t r = p; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < p; ++c) s -= a[r][c] * coef[c];
    coef[r] = s / a[r][r];
  }

  WlsFit fit;
  fit.intercept = coef[0];
  fit.slopes.assign(coef.begin() + 1, coef.end());
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double yhat = fit.intercept;
    for (std::size_t j = 0; j < k; ++j) yhat += fit.slopes[j] * regressors[j][i];
    fit.residuals[i] = y.values[i] - yhat;
  }
  return fit;
}

std::vector<double> weighted_percentile_ranks(const WeightedSample& s) {
  s.validate();
  const std::size_t n = s.size();
  if (n == 0) throw DataError("weighted_percentile_ranks: empty sample");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return s.values[i] < s.values[j]; });
  double total = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);

  std::vector<double> ranks(n);
  double below = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    double block = 0.0;
    while (j < n && s.values[order[j]] == s.values[order[i]]) block += s.weights[order[j++]];
    double r = 100.0 * (below + block / 2.0) / total;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r;
    below += block;
    i = j;
  }
  return ranks;
}

namespace {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0))
    throw NumericError("degenerate-variable", "zero variance in correlation input");
  return sab / std::sqrt(saa * sbb);
}

// Merge sort counting inversions (discordant-with-tie bookkeeping happens in
// the caller via Knight's decomposition).
std::size_t count_inversions(std::vector<double>& v, std::vector<double>& tmp,
                             std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::size_t inv = count_inversions(v, tmp, lo, mid) + count_inversions(v, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += mid - i;
      tmp[k++] = v[j++];
    } else {
      tmp[k++] = v[i++];
    }
  }
  while (i < mid) tmp[k++] = v[i++];
  while (j < hi) tmp[k++] = v[j++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
  return inv;
}

double kendall_tau_b(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (a[i] != a[j]) return a[i] < a[j];
    return b[i] < b[j];
  });

  auto pairs2 = [](double m) { return m * (m - 1.0) / 2.0; };
  double n0 = pairs2(static_cast<double>(n));
  double n1 = 0.0, n2 = 0.0, n3 = 0.0;

  // ties in a, and joint ties
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && a[order[j]] == a[order[i]]) ++j;
    n1 += pairs2(static_cast<double>(j - i));
    for (std::size_t t = i; t < j;) {
      std::size_t u = t;
      while (u < j && b[order[u]] == b[order[t]]) ++u;
      n3 += pairs2(static_cast<double>(u - t));
      t = u;
    }
    i = j;
  }
  // ties in b
  {
    std::vector<double> bs(b);
    std::sort(bs.begin(), bs.end());
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && bs[j] == bs[i]) ++j;
      n2 += pairs2(static_cast<double>(j - i));
      i = j;
    }
  }

  std::vector<double> bseq(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) bseq[i] = b[order[i]];
  double inversions = static_cast<double>(count_inversions(bseq, tmp, 0, n));

  // Knight: discordant = inversions; concordant - discordant =
  // n0 - n1 - n2 + n3 - 2 * discordant.
  double num = n0 - n1 - n2 + n3 - 2.0 * inversions;
  double den = std::sqrt((n0 - n1) * (n0 - n2));
  if (!(den > 0.0))
    throw NumericError("degenerate-variable", "zero variance in kendall input");
  return num / den;
}

}  // namespace

Correlations correlations(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DataError("correlations: length mismatch");
  if (a.size() < 2) throw DataError("correlations: need at least 2 elements");
  Correlations c;
  c.pearson = pearson(a, b);
  auto ra = weighted_percentile_ranks(WeightedSample::uniform(a));
  auto rb = weighted_percentile_ranks(WeightedSample::uniform(b));
  c.spearman = pearson(ra, rb);
  c.kendall = kendall_tau_b(a, b);
  return c;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw NumericError("bad-quantile", "p outside (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

}  // namespace occmob::stats
