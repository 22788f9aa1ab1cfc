// core/include/f0entrain/stats.h

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

#ifndef F0ENTRAIN_STATS_H_
#define F0ENTRAIN_STATS_H_

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "f0entrain/ingest.h"
#include "f0entrain/types.h"

namespace f0entrain {

// Regularized incomplete beta I_x(a, b), continued fraction (modified
// Lentz) with the usual symmetry switch.  Absolute error ~1e-14.
double reg_inc_beta(double a, double b, double x);

// Two-sided Student-t tail probability P(|T| >= |t|).
double t_sf(double t, double df);
// One-sided lower / upper tails.
double t_cdf(double t, double df);

// Upper tail of the F distribution, P(F >= f).
double f_sf(double f, double df1, double df2);
// Quantile of the F distribution: f such that P(F <= f) = p.
double f_quantile(double p, double df1, double df2);

struct Thresholds {
  double alpha = 0.05;
  double trend = 0.1;
};

enum class Alternative { kTwoSided, kLess, kGreater };

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool significant = false;
  bool trend = false;
};

// Paired t-test on x - y.  With kLess the alternative is mean(x - y) < 0.
TestResult paired_t_test(std::span<const double> x, std::span<const double> y,
                         const Thresholds& th = {},
                         Alternative alt = Alternative::kTwoSided);

// Pearson r with a two-sided test against df = n - 2.
TestResult pearson(std::span<const double> x, std::span<const double> y,
                   const Thresholds& th = {});

enum class IccModel { kConsistency, kAgreement };

struct IccResult {
  double icc = 0.0;
  double f_statistic = 0.0;
  double df1 = 0.0;
  double df2 = 0.0;
  double p_value = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Average-measures ICC from a two-way model: ICC(3,k) consistency by
// default, or ICC(A,k) absolute agreement.  `ratings` is subjects x raters.
IccResult icc_k(const std::vector<std::vector<double>>& ratings, double alpha = 0.05,
                IccModel model = IccModel::kConsistency);

inline IccResult icc_3k(const std::vector<std::vector<double>>& ratings,
                        double alpha = 0.05) {
  return icc_k(ratings, alpha, IccModel::kConsistency);
}

struct GridCell {
  Feature feature = Feature::kMean;
  Criterion criterion = Criterion::kFinal;
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
  bool significant = false;
  bool trend = false;
};

using FeatureTable = std::map<SpeakerId, std::array<double, kNumFeatures>>;
using CriterionTable = std::map<SpeakerId, std::array<double, kNumCriteria>>;

// Pearson r for every (feature, criterion) over the shared speakers.  Rows
// come out ordered lexicographically by (feature name, criterion name).
std::vector<GridCell> correlate_grid(const FeatureTable& entrainment,
                                     const CriterionTable& scores,
                                     const Thresholds& th = {});

// p-value for reports: three significant digits, "<0.001" below 0.001 when
// `floor_small` is set.
std::string format_p(double p, bool floor_small = false);

}  // namespace f0entrain

#endif  // F0ENTRAIN_STATS_H_
