// core/src/preprocess.cc

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

#include "f0entrain/preprocess.h"

#include <algorithm>
#include <map>

#include "f0entrain/quantile.h"

namespace f0entrain {

void SmoothingConfig::validate() const {
  if (window < 1 || window % 2 == 0)
    throw ValidationError("smoothing window must be a positive odd integer, got " +
                          std::to_string(window));
  if (order < 0 || order >= window)
    throw ValidationError("smoothing order must satisfy 0 <= order < window, got " +
                          std::to_string(order));
}

F0Track interpolate_unvoiced(const F0Track& track) {
  const std::size_t n = track.size();
  std::vector<std::size_t> voiced;
  for (std::size_t i = 0; i < n; ++i)
    if (track.samples[i].voiced) voiced.push_back(i);
  if (voiced.empty()) throw NumericError("cannot interpolate an all-unvoiced track");

  F0Track out = track;
  auto& s = out.samples;
  for (std::size_t i = 0; i < voiced.front(); ++i) s[i] = {s[voiced.front()].value, true};
  for (std::size_t i = voiced.back() + 1; i < n; ++i) s[i] = {s[voiced.back()].value, true};
  for (std::size_t k = 0; k + 1 < voiced.size(); ++k) {
    const std::size_t a = voiced[k], b = voiced[k + 1];
    if (b == a + 1) continue;
    const double va = s[a].value, vb = s[b].value;
    const double len = static_cast<double>(b - a);
    for (std::size_t i = a + 1; i < b; ++i)
      s[i] = {va + (vb - va) * static_cast<double>(i - a) / len, true};
  }
  return out;
}

OutlierBounds outlier_bounds(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return {0.75 * quantile_sorted(v, 0.25), 1.5 * quantile_sorted(v, 0.75)};
}

OutlierResult two_pass_outlier(const F0Track& track, std::optional<OutlierBounds> bounds) {
  OutlierResult res;
  std::vector<double> voiced;
  for (const auto& s : track.samples)
    if (s.voiced) voiced.push_back(s.value);
  if (voiced.size() < 4) {
    res.track = track;
    res.too_short = true;
    return res;
  }
  res.bounds = bounds ? *bounds : outlier_bounds(voiced);

  F0Track marked = track;
  for (auto& s : marked.samples) {
    if (s.voiced && (s.value < res.bounds.low || s.value > res.bounds.high)) {
      s = {0.0, false};
      ++res.replaced;
    }
  }
  if (marked.voiced_count() == 0) {
    // Only reachable with externally supplied bounds.
    throw NumericError("every sample of the track lies outside the outlier bounds");
  }
  res.track = interpolate_unvoiced(marked);
  return res;
}

namespace {

// Gram polynomial of order k over the 2m+1 points -m..m, evaluated at i.
double gram_poly(int i, int m, int k) {
  double prev = 0.0, cur = 1.0;  // P_{-1}, P_0
  for (int j = 1; j <= k; ++j) {
    const double a = (4.0 * j - 2.0) / (j * (2.0 * m - j + 1.0));
    const double b = ((j - 1.0) * (2.0 * m + j)) / (j * (2.0 * m - j + 1.0));
    const double next = a * i * cur - b * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// a * (a-1) * ... * (a-b+1)
double gen_fact(int a, int b) {
  double f = 1.0;
  for (int j = a - b + 1; j <= a; ++j) f *= j;
  return f;
}

}  // namespace

std::vector<double> sg_coefficients(int window, int order) {
  SmoothingConfig{window, order}.validate();
  const int m = window / 2;
  std::vector<double> w(static_cast<std::size_t>(window));
  for (int i = -m; i <= m; ++i) {
    double sum = 0.0;
    for (int k = 0; k <= order; ++k)
      sum += (2.0 * k + 1.0) * gen_fact(2 * m, k) / gen_fact(2 * m + k + 1, k + 1) *
             gram_poly(i, m, k) * gram_poly(0, m, k);
    w[static_cast<std::size_t>(i + m)] = sum;
  }
  return w;
}

F0Track sg_smooth(const F0Track& track, const SmoothingConfig& config) {
  config.validate();
  const auto n = static_cast<std::ptrdiff_t>(track.size());
  const std::ptrdiff_t half = config.window / 2;
  std::map<std::ptrdiff_t, std::vector<double>> weights_by_half;

  F0Track out = track;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t h = std::min({half, i, n - 1 - i});
    if (2 * h + 1 <= config.order) continue;  // too close to the edge: copy
    auto it = weights_by_half.find(h);
    if (it == weights_by_half.end())
      it = weights_by_half
               .emplace(h, sg_coefficients(static_cast<int>(2 * h + 1), config.order))
               .first;
    const auto& w = it->second;
    double acc = 0.0;
    for (std::ptrdiff_t j = -h; j <= h; ++j)
      acc += w[static_cast<std::size_t>(j + h)] *
             track.samples[static_cast<std::size_t>(i + j)].value;
    out.samples[static_cast<std::size_t>(i)].value = acc;
  }
  return out;
}

CleanResult clean_track(const F0Track& track, const SmoothingConfig& config,
                        std::optional<OutlierBounds> bounds) {
  CleanResult res;
  F0Track filled = interpolate_unvoiced(track);
  OutlierResult o = two_pass_outlier(filled, bounds);
  res.outliers_replaced = o.replaced;
  res.outlier_skipped = o.too_short;
  res.track = sg_smooth(o.track, config);
  return res;
}

}  // namespace f0entrain
