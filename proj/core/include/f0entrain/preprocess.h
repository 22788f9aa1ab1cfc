// core/include/f0entrain/preprocess.h

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

#ifndef F0ENTRAIN_PREPROCESS_H_
#define F0ENTRAIN_PREPROCESS_H_

#include <optional>
#include <span>
#include <vector>

#include "f0entrain/types.h"

namespace f0entrain {

struct SmoothingConfig {
  int window = 7;  // odd, in samples
  int order = 3;   // polynomial degree, < window

  void validate() const;
};

// Fills unvoiced samples: interior gaps by linear interpolation between the
// flanking voiced values, leading/trailing runs by holding the nearest
// voiced value.  Throws NumericError on an all-unvoiced track.
F0Track interpolate_unvoiced(const F0Track& track);

struct OutlierBounds {
  double low = 0.0;   // 0.75 * q25
  double high = 0.0;  // 1.5 * q75
};

// Fences from the voiced values of `values` (type-7 quartiles).
OutlierBounds outlier_bounds(std::span<const double> values);

struct OutlierResult {
  F0Track track;
  OutlierBounds bounds;
  std::size_t replaced = 0;
  // Set when the track had fewer than four voiced samples; the track is
  // returned unchanged.
  bool too_short = false;
};

// Two-pass outlier removal: values outside the quartile fences become
// unvoiced, then interpolate_unvoiced fills them.  With `bounds` given,
// those fences are used instead of per-track ones (speaker-level scope).
OutlierResult two_pass_outlier(const F0Track& track,
                               std::optional<OutlierBounds> bounds = std::nullopt);

// Convolution weights of the least-squares polynomial smoother evaluated at
// the window centre.
std::vector<double> sg_coefficients(int window, int order);

// Savitzky-Golay smoothing.  Samples closer than half a window to either
// edge use the largest symmetric odd window that fits; when that window is
// not larger than `order` the input value is copied.
F0Track sg_smooth(const F0Track& track, const SmoothingConfig& config = {});

struct CleanResult {
  F0Track track;
  std::size_t outliers_replaced = 0;
  bool outlier_skipped = false;
};

// interpolate -> outlier -> smooth.
CleanResult clean_track(const F0Track& track, const SmoothingConfig& config = {},
                        std::optional<OutlierBounds> bounds = std::nullopt);

}  // namespace f0entrain

#endif  // F0ENTRAIN_PREPROCESS_H_
