// core/include/f0entrain/features.h

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

#ifndef F0ENTRAIN_FEATURES_H_
#define F0ENTRAIN_FEATURES_H_

#include <array>
#include <span>
#include <vector>

#include "f0entrain/types.h"

namespace f0entrain {

struct LinearFit {
  double intercept = 0.0;  // Hz at normalized time 0
  double slope = 0.0;      // Hz per unit normalized time
};

// Ordinary least squares of `values` against times `tn`.
LinearFit linear_fit(std::span<const double> tn, std::span<const double> values);

// Fit against normalized time: sample times mapped affinely onto [0, 1].
// Throws NumericError("degenerate fit") for fewer than two samples.
LinearFit linear_fit(const F0Track& segment);

// The five per-word F0 parameters.
//   mean, median  over the raw values
//   slope         of the linear fit against normalized time, Hz
//   range         p95 - p5 of the fitted values, Hz
//   drop          (last fitted - first fitted) / elapsed seconds, Hz/s
struct WordFeatures {
  double mean = 0.0;
  double median = 0.0;
  double slope = 0.0;
  double range = 0.0;
  double drop = 0.0;

  double operator[](Feature f) const;
};

WordFeatures word_features(const F0Track& segment);

struct WordEntry {
  WordSpan span;
  std::size_t word_index = 0;  // position in the alignment, before drops
  WordFeatures features;
};

struct UtteranceFeatures {
  SpeakerId speaker;
  int utterance_index = 0;
  Role role = Role::kImitation;
  std::vector<WordEntry> words;  // retained words, alignment order
  int dropped_words = 0;
};

// Slices a cleaned track by each word span and parameterizes it.  Words
// whose slice is empty or shorter than two samples are dropped and counted.
UtteranceFeatures parameterize_utterance(const F0Track& clean_track,
                                         std::span<const WordSpan> words);

// Per-utterance sequence of one feature, one value per retained word.
struct ParamContour {
  Feature feature = Feature::kMean;
  std::vector<double> values;
};

using ContourSet = std::array<ParamContour, kNumFeatures>;

// Throws NumericError("empty utterance") if no word was retained.
ContourSet build_contours(const UtteranceFeatures& utt);

// Converts voiced values to semitones relative to `reference_hz`.
F0Track to_semitones(const F0Track& track, double reference_hz);

}  // namespace f0entrain

#endif  // F0ENTRAIN_FEATURES_H_
