// core/include/f0entrain/synth.h

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

#ifndef F0ENTRAIN_SYNTH_H_
#define F0ENTRAIN_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "f0entrain/ingest.h"
#include "f0entrain/types.h"

namespace f0entrain {

struct SynthConfig {
  int n_dyads = 4;
  int n_utterances = 20;  // per dyad; partners alternate as model
  int words_min = 6;
  int words_max = 13;
  double noise_eps = 0.5;  // imitation noise, in units of each parameter's spread
  double f0_min = 100.0;   // speaker base register, Hz
  double f0_max = 250.0;
  std::uint64_t seed = 1;
  double step = 0.01;

  void validate() const;
};

// A generated corpus held in memory.  Keys of `tracks` and `alignments` are
// the relative paths used in the manifest.
struct SynthCorpus {
  CorpusManifest manifest;
  std::map<std::string, F0Track> tracks;
  std::map<std::string, std::vector<WordSpan>> alignments;
};

// Each model rendition is a sequence of per-word linear F0 ramps drawn from
// the speaker's register; each imitation copies the model's per-word level
// and slope plus zero-mean Gaussian noise scaled by noise_eps.  Deterministic
// for a given config.
SynthCorpus gen_corpus(const SynthConfig& config);

// Writes manifest.json, f0/ and align/ under `dir`; returns the manifest path.
std::filesystem::path write_corpus(const SynthCorpus& corpus,
                                   const std::filesystem::path& dir);

// Proficiency ratings whose latent score correlates with `driver` (one value
// per speaker) at `coupling`, plus per-rater Gaussian noise of sd `noise`.
// Scores are clipped to [1, 5].
ScoreTable gen_scores(const std::map<SpeakerId, double>& driver, double coupling,
                      double noise, std::uint64_t seed, int n_raters = 6);

}  // namespace f0entrain

#endif  // F0ENTRAIN_SYNTH_H_
