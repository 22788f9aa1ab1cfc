// core/include/f0entrain/entrain.h

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

#ifndef F0ENTRAIN_ENTRAIN_H_
#define F0ENTRAIN_ENTRAIN_H_

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "f0entrain/features.h"
#include "f0entrain/ingest.h"
#include "f0entrain/types.h"

namespace f0entrain {

// Classic DTW with |a_i - b_j| local cost, symmetric unit steps, no window.
// Returns the total cost of the cheapest boundary-to-boundary path.
double dtw_distance(std::span<const double> a, std::span<const double> b);

struct RenditionKey {
  SpeakerId speaker;
  int index = 0;
  Role role = Role::kImitation;

  auto operator<=>(const RenditionKey&) const = default;
};

// Parameterized contours of every rendition in a corpus.
class ContourStore {
 public:
  void insert(RenditionKey key, ContourSet contours);
  const ContourSet* find(const RenditionKey& key) const;
  const ContourSet& at(const RenditionKey& key) const;
  std::size_t size() const { return map_.size(); }

 private:
  std::map<RenditionKey, ContourSet> map_;
};

struct DtwSample {
  SpeakerId imitator;
  SpeakerId model;
  int utterance_index = 0;
  Feature feature = Feature::kMean;
  double distance = 0.0;
};

// One sample per (manifest record, feature): the imitator's rendition
// against the model's rendition of the same turn.  Order: manifest record
// order, then feature order.
std::vector<DtwSample> partner_samples(const CorpusManifest& manifest,
                                       const ContourStore& store);

// Mean of the speaker's real-partner distances for `feature`.
double e_raw(std::string_view imitator, Feature feature,
             std::span<const DtwSample> samples);

enum class NormScale { kSd, kSe };
enum class NormPool { kCorpus, kSpeaker };

struct Normalization {
  double center = 0.0;
  double scale = 1.0;  // SD, or SD / sqrt(n) for kSe
  double fence_low = 0.0;
  double fence_high = 0.0;
  std::size_t retained = 0;
  // Aligned with the input; nullopt for values outside the fences.
  std::vector<std::optional<double>> z;
};

// Tukey-fence outlier removal (1.5 IQR, type-7 quartiles; skipped below four
// samples) followed by a z-transform of the retained values.
Normalization normalize_samples(std::span<const double> values,
                                NormScale scale = NormScale::kSd);

// Normalized value of every sample, pooled per feature (kCorpus) or per
// (feature, imitator) (kSpeaker).  Aligned with `samples`.
std::vector<std::optional<double>> normalized_values(std::span<const DtwSample> samples,
                                                     NormScale scale, NormPool pool);

struct EoptResult {
  double value = 0.0;
  std::size_t n_used = 0;
};

// Mean of the speaker's retained normalized distances.  Throws NumericError
// when every sample of the speaker was fenced out.
EoptResult e_opt(std::string_view imitator, Feature feature,
                 std::span<const DtwSample> samples,
                 std::span<const std::optional<double>> normalized);

struct EntrainmentScore {
  SpeakerId speaker;
  Feature feature = Feature::kMean;
  double e_raw = 0.0;
  std::optional<double> e_opt;     // nullopt when all samples were outliers
  std::optional<double> e_opt_se;  // filled when `also_se` is requested
  std::size_t n_used = 0;
};

struct EntrainOptions {
  NormScale scale = NormScale::kSd;
  NormPool pool = NormPool::kCorpus;
};

// Speakers in manifest order (those with at least one imitation), then
// features.
std::vector<EntrainmentScore> entrainment_scores(const CorpusManifest& manifest,
                                                 std::span<const DtwSample> samples,
                                                 const EntrainOptions& options = {});

double partner_distance(std::string_view target, Feature feature,
                        std::span<const DtwSample> samples);

enum class SurrogatePool { kSameSex, kAll };

struct OtherDistance {
  double value = 0.0;
  int n_surrogates = 0;
};

// Mean over eligible non-partners m of the mean DTW between the target's
// imitation of turn k and m's model rendition of turn k.  Non-partners
// without a shared model-role turn are skipped.
OtherDistance other_distance(std::string_view target, Feature feature,
                             const CorpusManifest& manifest, const ContourStore& store,
                             SurrogatePool pool = SurrogatePool::kSameSex);

struct PartnerOtherRow {
  SpeakerId speaker;
  Feature feature = Feature::kMean;
  double partner = 0.0;
  std::optional<double> other;  // nullopt when no surrogate is available
  int n_surrogates = 0;
};

std::vector<PartnerOtherRow> partner_other_table(const CorpusManifest& manifest,
                                                 const ContourStore& store,
                                                 std::span<const DtwSample> samples,
                                                 SurrogatePool pool);

// (a - b) / mean(a, b); 0 when both are zero.
double inner_dyad_distance(double a_score, double b_score);

struct DyadScore {
  SpeakerId a;
  SpeakerId b;
  Feature feature = Feature::kMean;
  double inner_dyad = 0.0;
};

// Dyads in manifest order; members without imitations are skipped.
std::vector<DyadScore> dyad_scores(const CorpusManifest& manifest,
                                   std::span<const EntrainmentScore> scores);

}  // namespace f0entrain

#endif  // F0ENTRAIN_ENTRAIN_H_
