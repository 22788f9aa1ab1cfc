// core/include/f0entrain/pitch.h

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

#ifndef F0ENTRAIN_PITCH_H_
#define F0ENTRAIN_PITCH_H_

#include <filesystem>
#include <span>
#include <vector>

#include "f0entrain/types.h"

namespace f0entrain {

// Mono PCM audio scaled to [-1, 1].
struct Wave {
  double sample_rate = 16000.0;
  std::vector<double> samples;

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

// Reads 16-bit PCM WAV (mono or stereo; stereo is averaged to mono).
Wave read_wav(const std::filesystem::path& path);
Wave parse_wav(std::span<const unsigned char> bytes);
// Writes 16-bit mono PCM; samples are clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const Wave& wave);
std::vector<unsigned char> encode_wav(const Wave& wave);

struct PitchConfig {
  double floor = 75.0;        // Hz
  double ceiling = 600.0;     // Hz
  double time_step = 0.01;    // s
  double voicing_threshold = 0.45;
  double window = 0.04;       // s
  // Per-frame preference for shorter lags, in correlation units per octave
  // below the ceiling.  Resolves the multiple-period ambiguity of a
  // perfectly periodic frame.
  double octave_cost = 0.01;
  // Frames quieter than this fraction of the global RMS are unvoiced.
  double silence_ratio = 0.01;

  void validate(double sample_rate) const;
};

// Short-term autocorrelation pitch estimate.  Frame i is centred at
// window/2 + i * time_step; the returned track starts at the first centre.
F0Track estimate_f0(const Wave& wave, const PitchConfig& config = {});

}  // namespace f0entrain

#endif  // F0ENTRAIN_PITCH_H_
