// core/include/f0entrain/quantile.h

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

#ifndef F0ENTRAIN_QUANTILE_H_
#define F0ENTRAIN_QUANTILE_H_

#include <span>
#include <vector>

namespace f0entrain {

// Sample quantile with linear interpolation between order statistics at
// position h = (n - 1) * p ("type 7").  `sorted` must be ascending and
// non-empty; p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

// Same as quantile_sorted but sorts a copy first.
double quantile(std::span<const double> values, double p);

double mean(std::span<const double> values);
double median(std::span<const double> values);
// Sample variance with n - 1 in the denominator; 0 when n < 2.
double sample_variance(std::span<const double> values);

}  // namespace f0entrain

#endif  // F0ENTRAIN_QUANTILE_H_
