// core/src/types.cc

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

#include "f0entrain/types.h"

#include <algorithm>

namespace f0entrain {

std::size_t F0Track::voiced_count() const {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [](const F0Sample& s) { return s.voiced; }));
}

std::vector<double> F0Track::values() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.value);
  return out;
}

F0Track F0Track::from_values(std::vector<double> values, double start_time,
                             double step) {
  F0Track t;
  t.start_time = start_time;
  t.step = step;
  t.samples.reserve(values.size());
  for (double v : values) t.samples.push_back({v > 0.0 ? v : 0.0, v > 0.0});
  return t;
}

std::string_view feature_name(Feature f) {
  switch (f) {
    case Feature::kMean: return "mean";
    case Feature::kMedian: return "median";
    case Feature::kSlope: return "slope";
    case Feature::kRange: return "range";
    case Feature::kDrop: return "drop";
  }
  return "?";
}

std::optional<Feature> parse_feature(std::string_view name) {
  for (Feature f : kAllFeatures)
    if (feature_name(f) == name) return f;
  return std::nullopt;
}

std::string_view role_name(Role r) {
  return r == Role::kImitation ? "imit" : "model";
}

std::optional<Role> parse_role(std::string_view name) {
  if (name == "imit") return Role::kImitation;
  if (name == "model") return Role::kModel;
  return std::nullopt;
}

}  // namespace f0entrain
