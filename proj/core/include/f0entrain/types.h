// core/include/f0entrain/types.h

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

#ifndef F0ENTRAIN_TYPES_H_
#define F0ENTRAIN_TYPES_H_

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace f0entrain {

using SpeakerId = std::string;

// Error hierarchy.  The CLI maps ValidationError/ParseError/NumericError to
// exit code 1 and IoError to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised by numeric kernels on degenerate input (zero variance, empty
// sequences, single-sample fits).
class NumericError : public Error {
 public:
  using Error::Error;
};

struct F0Sample {
  double value = 0.0;  // Hz; 0 when unvoiced
  bool voiced = false;

  bool operator==(const F0Sample&) const = default;
};

// Uniformly sampled pitch contour.  Sample i sits at start_time + i * step.
struct F0Track {
  double start_time = 0.0;
  double step = 0.01;
  std::vector<F0Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double time_at(std::size_t i) const {
    return start_time + static_cast<double>(i) * step;
  }
  double duration() const { return static_cast<double>(samples.size()) * step; }
  std::size_t voiced_count() const;
  std::vector<double> values() const;

  static F0Track from_values(std::vector<double> values, double start_time,
                             double step);

  bool operator==(const F0Track&) const = default;
};

// One aligned word, [start, end) in seconds.
struct WordSpan {
  std::string text;
  double start = 0.0;
  double end = 0.0;

  bool operator==(const WordSpan&) const = default;
};

enum class Feature { kMean = 0, kMedian, kSlope, kRange, kDrop };
inline constexpr std::size_t kNumFeatures = 5;
inline constexpr std::array<Feature, kNumFeatures> kAllFeatures = {
    Feature::kMean, Feature::kMedian, Feature::kSlope, Feature::kRange,
    Feature::kDrop};

std::string_view feature_name(Feature f);
std::optional<Feature> parse_feature(std::string_view name);

// Which side of an imitation record a recording belongs to.
enum class Role { kImitation, kModel };

std::string_view role_name(Role r);
std::optional<Role> parse_role(std::string_view name);

}  // namespace f0entrain

#endif  // F0ENTRAIN_TYPES_H_
