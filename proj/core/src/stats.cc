// core/src/stats.cc

// Copyright 2026 The f0entrain Authors
//
// See ../../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "f0entrain/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "f0entrain/csv.h"
#include "f0entrain/quantile.h"

namespace f0entrain {

namespace {

// Continued fraction for I_x(a,b), modified Lentz.
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericError("reg_inc_beta: continued fraction did not converge");
}

TestResult finish(double statistic, double df, double p, const Thresholds& th) {
  TestResult r;
  r.statistic = statistic;
  r.df = df;
  r.p_value = std::clamp(p, 0.0, 1.0);
  r.significant = r.p_value < th.alpha;
  r.trend = r.p_value < th.trend || r.significant;
  return r;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0))
    throw NumericError("reg_inc_beta: need a > 0, b > 0, 0 <= x <= 1");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double t_sf(double t, double df) {
  if (!(df > 0.0)) throw NumericError("t_sf: df must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  return reg_inc_beta(0.5 * df, 0.5, df / (df + t * t));
}

double t_cdf(double t, double df) {
  const double two = t_sf(t, df);
  return t < 0.0 ? 0.5 * two : 1.0 - 0.5 * two;
}

double f_sf(double f, double df1, double df2) {
  if (!(df1 > 0.0) || !(df2 > 0.0)) throw NumericError("f_sf: df must be positive");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return reg_inc_beta(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f));
}

double f_quantile(double p, double df1, double df2) {
  if (!(p > 0.0 && p < 1.0)) throw NumericError("f_quantile: p must lie in (0,1)");
  const double target_sf = 1.0 - p;
  double lo = 0.0, hi = 1.0;
  while (f_sf(hi, df1, df2) > target_sf) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericError("f_quantile: no bracket");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f_sf(mid, df1, df2) > target_sf)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

TestResult paired_t_test(std::span<const double> x, std::span<const double> y,
                         const Thresholds& th, Alternative alt) {
  if (x.size() != y.size())
    throw NumericError("paired t-test: length mismatch (" + std::to_string(x.size()) +
                       " vs " + std::to_string(y.size()) + ")");
  if (x.size() < 2) throw NumericError("paired t-test: need at least two pairs");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  const double n = static_cast<double>(d.size());
  const double sd = std::sqrt(sample_variance(d));
  if (!(sd > 0.0)) throw NumericError("paired t-test: zero variance of differences");
  const double t = mean(d) / (sd / std::sqrt(n));
  const double df = n - 1.0;
  double p = 0.0;
  switch (alt) {
    case Alternative::kTwoSided: p = t_sf(t, df); break;
    case Alternative::kLess: p = t_cdf(t, df); break;
    case Alternative::kGreater: p = t_cdf(-t, df); break;
  }
  return finish(t, df, p, th);
}

TestResult pearson(std::span<const double> x, std::span<const double> y,
                   const Thresholds& th) {
  if (x.size() != y.size()) throw NumericError("pearson: length mismatch");
  if (x.size() < 3) throw NumericError("pearson: need at least three pairs");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw NumericError("pearson: zero variance");
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double df = static_cast<double>(x.size()) - 2.0;
  double p = 0.0;
  if (std::abs(r) < 1.0) {
    const double t = r * std::sqrt(df / (1.0 - r * r));
    p = t_sf(t, df);
  }
  return finish(r, df, p, th);
}

IccResult icc_k(const std::vector<std::vector<double>>& ratings, double alpha,
                IccModel model) {
  const std::size_t n = ratings.size();
  if (n < 3) throw NumericError("icc: need at least three subjects");
  const std::size_t k = ratings[0].size();
  if (k < 2) throw NumericError("icc: need at least two raters");
  for (const auto& row : ratings)
    if (row.size() != k) throw ValidationError("icc: incomplete rating matrix");

  std::vector<double> row_mean(n, 0.0), col_mean(k, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      row_mean[i] += ratings[i][j];
      col_mean[j] += ratings[i][j];
      grand += ratings[i][j];
    }
  const double dn = static_cast<double>(n), dk = static_cast<double>(k);
  for (auto& v : row_mean) v /= dk;
  for (auto& v : col_mean) v /= dn;
  grand /= dn * dk;

  double ss_rows = 0.0, ss_cols = 0.0, ss_err = 0.0;
  for (double v : row_mean) ss_rows += (v - grand) * (v - grand);
  for (double v : col_mean) ss_cols += (v - grand) * (v - grand);
  ss_rows *= dk;
  ss_cols *= dn;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const double e = ratings[i][j] - row_mean[i] - col_mean[j] + grand;
      ss_err += e * e;
    }

  IccResult res;
  res.df1 = dn - 1.0;
  res.df2 = (dn - 1.0) * (dk - 1.0);
  const double ms_r = ss_rows / res.df1;
  const double ms_c = ss_cols / (dk - 1.0);
  const double ms_e = ss_err / res.df2;
  if (!(ms_r > 0.0)) throw NumericError("icc: degenerate ratings (zero between-subject variance)");

  if (model == IccModel::kConsistency)
    res.icc = (ms_r - ms_e) / ms_r;
  else
    res.icc = (ms_r - ms_e) / (ms_r + (ms_c - ms_e) / dn);

  if (ms_e == 0.0) {
    res.f_statistic = std::numeric_limits<double>::infinity();
    res.p_value = 0.0;
  } else {
    res.f_statistic = ms_r / ms_e;
    res.p_value = f_sf(res.f_statistic, res.df1, res.df2);
  }

  const double q = 1.0 - alpha / 2.0;
  if (model == IccModel::kConsistency) {
    if (ms_e == 0.0) {
      res.ci_low = res.ci_high = 1.0;
    } else {
      const double f_l = res.f_statistic / f_quantile(q, res.df1, res.df2);
      const double f_u = res.f_statistic * f_quantile(q, res.df2, res.df1);
      res.ci_low = 1.0 - 1.0 / f_l;
      res.ci_high = 1.0 - 1.0 / f_u;
    }
  } else {
    // McGraw & Wong interval for the single-measure agreement ICC, stepped
    // up to k raters with Spearman-Brown.
    const double single =
        (ms_r - ms_e) / (ms_r + (dk - 1.0) * ms_e + dk * (ms_c - ms_e) / dn);
    if (single >= 1.0) {
      res.ci_low = res.ci_high = res.icc;
    } else {
      const double aa = dk * single / (dn * (1.0 - single));
      const double bb = 1.0 + dk * single * (dn - 1.0) / (dn * (1.0 - single));
      const double num = aa * ms_c + bb * ms_e;
      const double v = num * num / ((aa * ms_c) * (aa * ms_c) / (dk - 1.0) +
                                    (bb * ms_e) * (bb * ms_e) / res.df2);
      const double f1 = f_quantile(q, res.df1, v);
      const double f2 = f_quantile(q, v, res.df1);
      const double mix = dk * ms_c + (dk * dn - dk - dn) * ms_e;
      const double l1 = dn * (ms_r - f1 * ms_e) / (f1 * mix + dn * ms_r);
      const double u1 = dn * (f2 * ms_r - ms_e) / (mix + dn * f2 * ms_r);
      res.ci_low = l1 * dk / (1.0 + l1 * (dk - 1.0));
      res.ci_high = u1 * dk / (1.0 + u1 * (dk - 1.0));
    }
  }
  return res;
}

std::vector<GridCell> correlate_grid(const FeatureTable& entrainment,
                                     const CriterionTable& scores, const Thresholds& th) {
  std::vector<SpeakerId> shared;
  for (const auto& [id, _] : entrainment)
    if (scores.count(id)) shared.push_back(id);
  if (shared.size() < 3)
    throw NumericError("correlation grid: only " + std::to_string(shared.size()) +
                       " speakers have both entrainment and scores (need 3)");

  std::vector<Feature> features(kAllFeatures.begin(), kAllFeatures.end());
  std::sort(features.begin(), features.end(),
            [](Feature a, Feature b) { return feature_name(a) < feature_name(b); });
  std::vector<Criterion> criteria(kAllCriteria.begin(), kAllCriteria.end());
  std::sort(criteria.begin(), criteria.end(),
            [](Criterion a, Criterion b) { return criterion_name(a) < criterion_name(b); });

  std::vector<GridCell> cells;
  for (Feature f : features) {
    std::vector<double> x;
    for (const auto& id : shared) x.push_back(entrainment.at(id)[static_cast<std::size_t>(f)]);
    for (Criterion c : criteria) {
      std::vector<double> y;
      for (const auto& id : shared) y.push_back(scores.at(id)[static_cast<std::size_t>(c)]);
      TestResult r;
      try {
        r = pearson(x, y, th);
      } catch (const NumericError& e) {
        throw NumericError("correlation grid cell (" + std::string(feature_name(f)) + ", " +
                           std::string(criterion_name(c)) + "): " + e.what());
      }
      cells.push_back({f, c, r.statistic, r.p_value, shared.size(), r.significant, r.trend});
    }
  }
  return cells;
}

std::string format_p(double p, bool floor_small) {
  if (floor_small && p < 0.001) return "<0.001";
  return format_general(p, 3);
}

}  // namespace f0entrain
