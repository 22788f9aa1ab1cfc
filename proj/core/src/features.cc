// core/src/features.cc

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

#include "f0entrain/features.h"

#include <cmath>

#include "f0entrain/ingest.h"
#include "f0entrain/quantile.h"

namespace f0entrain {

LinearFit linear_fit(std::span<const double> tn, std::span<const double> values) {
  if (tn.size() != values.size()) throw NumericError("linear fit: length mismatch");
  if (values.size() < 2) throw NumericError("degenerate fit: fewer than two samples");
  const double tm = mean(tn), ym = mean(values);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < tn.size(); ++i) {
    sxy += (tn[i] - tm) * (values[i] - ym);
    sxx += (tn[i] - tm) * (tn[i] - tm);
  }
  if (sxx == 0.0) throw NumericError("degenerate fit: constant time axis");
  const double slope = sxy / sxx;
  return {ym - slope * tm, slope};
}

namespace {

std::vector<double> normalized_time(std::size_t n) {
  std::vector<double> tn(n);
  for (std::size_t i = 0; i < n; ++i)
    tn[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return tn;
}

}  // namespace

LinearFit linear_fit(const F0Track& segment) {
  if (segment.size() < 2) throw NumericError("degenerate fit: fewer than two samples");
  const auto y = segment.values();
  return linear_fit(normalized_time(y.size()), y);
}

double WordFeatures::operator[](Feature f) const {
  switch (f) {
    case Feature::kMean: return mean;
    case Feature::kMedian: return median;
    case Feature::kSlope: return slope;
    case Feature::kRange: return range;
    case Feature::kDrop: return drop;
  }
  return 0.0;
}

WordFeatures word_features(const F0Track& segment) {
  if (segment.size() < 2) throw NumericError("degenerate fit: fewer than two samples");
  const auto y = segment.values();
  const auto tn = normalized_time(y.size());
  const LinearFit fit = linear_fit(tn, y);

  std::vector<double> fitted(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) fitted[i] = fit.intercept + fit.slope * tn[i];

  WordFeatures f;
  f.mean = mean(y);
  f.median = median(y);
  f.slope = fit.slope;
  f.range = quantile(fitted, 0.95) - quantile(fitted, 0.05);
  const double elapsed = static_cast<double>(y.size() - 1) * segment.step;
  f.drop = (fitted.back() - fitted.front()) / elapsed;
  return f;
}

UtteranceFeatures parameterize_utterance(const F0Track& clean_track,
                                         std::span<const WordSpan> words) {
  UtteranceFeatures utt;
  for (std::size_t i = 0; i < words.size(); ++i) {
    F0Track seg;
    try {
      seg = slice_track(clean_track, words[i]);
    } catch (const NumericError&) {
      ++utt.dropped_words;
      continue;
    }
    if (seg.size() < 2) {
      ++utt.dropped_words;
      continue;
    }
    utt.words.push_back({words[i], i, word_features(seg)});
  }
  return utt;
}

ContourSet build_contours(const UtteranceFeatures& utt) {
  if (utt.words.empty())
    throw NumericError("empty utterance: speaker " + utt.speaker + " index " +
                       std::to_string(utt.utterance_index) + " has no retained words");
  ContourSet set;
  for (Feature f : kAllFeatures) {
    auto& c = set[static_cast<std::size_t>(f)];
    c.feature = f;
    c.values.reserve(utt.words.size());
    for (const auto& w : utt.words) c.values.push_back(w.features[f]);
  }
  return set;
}

F0Track to_semitones(const F0Track& track, double reference_hz) {
  if (!(reference_hz > 0.0)) throw ValidationError("semitone reference must be positive");
  F0Track out = track;
  for (auto& s : out.samples)
    if (s.voiced) s.value = 12.0 * std::log2(s.value / reference_hz);
  return out;
}

}  // namespace f0entrain
