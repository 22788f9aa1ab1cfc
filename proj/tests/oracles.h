// tests/oracles.h

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

#ifndef F0ENTRAIN_TESTS_ORACLES_H_
#define F0ENTRAIN_TESTS_ORACLES_H_

// Independent reference implementations used only by the tests.  None of
// these share code with the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace oracle {

// Minimum total |a_i - b_j| over every monotone boundary-to-boundary path
// with unit steps, by exhaustive recursion.
inline double dtw_bruteforce(const std::vector<double>& a, const std::vector<double>& b) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j,
                                                                   double cost) {
    cost += std::abs(a[i] - b[j]);
    if (i + 1 == a.size() && j + 1 == b.size()) {
      best = std::min(best, cost);
      return;
    }
    if (i + 1 < a.size()) walk(i + 1, j, cost);
    if (j + 1 < b.size()) walk(i, j + 1, cost);
    if (i + 1 < a.size() && j + 1 < b.size()) walk(i + 1, j + 1, cost);
  };
  walk(0, 0, 0.0);
  return best;
}

// Savitzky-Golay centre weights from an explicit least-squares solve: fit a
// degree-`order` polynomial to each unit impulse and read the centre value.
inline std::vector<double> sg_weights_lsq(int window, int order) {
  const int h = window / 2;
  Eigen::MatrixXd v(window, order + 1);
  for (int i = 0; i < window; ++i)
    for (int p = 0; p <= order; ++p) v(i, p) = std::pow(static_cast<double>(i - h), p);
  std::vector<double> w(static_cast<std::size_t>(window));
  for (int k = 0; k < window; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(window);
    e(k) = 1.0;
    const Eigen::VectorXd c = v.colPivHouseholderQr().solve(e);
    w[static_cast<std::size_t>(k)] = c(0);  // polynomial value at offset 0
  }
  return w;
}

// Hyndman-Fan type 7 written from the definition: 1-based position
// 1 + (n - 1) p, then linear interpolation.
inline double quantile7(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double pos = 1.0 + (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - std::floor(pos);
  return x[lo - 1] + frac * (x[hi - 1] - x[lo - 1]);
}

struct Anova2 {
  double ms_rows = 0.0;
  double ms_cols = 0.0;
  double ms_err = 0.0;
  double df_rows = 0.0;
  double df_err = 0.0;
};

// Two-way ANOVA without replication via explicit sums of squares.
inline Anova2 anova2(const std::vector<std::vector<double>>& m) {
  const double n = static_cast<double>(m.size()), k = static_cast<double>(m[0].size());
  double grand = 0.0;
  for (const auto& r : m)
    for (double v : r) grand += v;
  grand /= n * k;
  double ss_total = 0.0, ss_rows = 0.0, ss_cols = 0.0;
  for (const auto& r : m) {
    double rm = 0.0;
    for (double v : r) {
      rm += v;
      ss_total += (v - grand) * (v - grand);
    }
    rm /= k;
    ss_rows += k * (rm - grand) * (rm - grand);
  }
  for (std::size_t j = 0; j < m[0].size(); ++j) {
    double cm = 0.0;
    for (const auto& r : m) cm += r[j];
    cm /= n;
    ss_cols += n * (cm - grand) * (cm - grand);
  }
  Anova2 a;
  a.df_rows = n - 1;
  a.df_err = (n - 1) * (k - 1);
  a.ms_rows = ss_rows / a.df_rows;
  a.ms_cols = ss_cols / (k - 1);
  a.ms_err = (ss_total - ss_rows - ss_cols) / a.df_err;
  return a;
}

// Two-sided Student-t tail for df = 2: 1 - |t| / sqrt(t^2 + 2).
inline double t_sf_df2(double t) { return 1.0 - std::abs(t) / std::sqrt(t * t + 2.0); }

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("f0entrain_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle

#endif  // F0ENTRAIN_TESTS_ORACLES_H_
