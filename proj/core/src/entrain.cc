// core/src/entrain.cc

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

#include "f0entrain/entrain.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "f0entrain/quantile.h"

namespace f0entrain {

double dtw_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw NumericError("dtw: empty sequence");
  const std::size_t m = b.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // prev[j] / cur[j] hold D(i-1, j-1) / D(i, j-1) with a sentinel column 0.
  std::vector<double> prev(m + 1, kInf), cur(m + 1, kInf);
  prev[0] = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cur[0] = kInf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double cost = std::abs(a[i] - b[j - 1]);
      cur[j] = cost + std::min({prev[j - 1], prev[j], cur[j - 1]});
    }
    std::swap(prev, cur);
    prev[0] = kInf;
  }
  return prev[m];
}

void ContourStore::insert(RenditionKey key, ContourSet contours) {
  map_.insert_or_assign(std::move(key), std::move(contours));
}

const ContourSet* ContourStore::find(const RenditionKey& key) const {
  auto it = map_.find(key);
  return it == map_.end() ? nullptr : &it->second;
}

const ContourSet& ContourStore::at(const RenditionKey& key) const {
  if (const auto* c = find(key)) return *c;
  throw ValidationError("no contours for " + key.speaker + " turn " +
                        std::to_string(key.index) + " (" +
                        std::string(role_name(key.role)) + ")");
}

std::vector<DtwSample> partner_samples(const CorpusManifest& manifest,
                                       const ContourStore& store) {
  std::vector<DtwSample> out;
  out.reserve(manifest.utterances.size() * kNumFeatures);
  for (const auto& u : manifest.utterances) {
    const auto& imit = store.at({u.imitator, u.index, Role::kImitation});
    const auto& model = store.at({u.model, u.index, Role::kModel});
    for (Feature f : kAllFeatures) {
      const auto k = static_cast<std::size_t>(f);
      out.push_back({u.imitator, u.model, u.index, f,
                     dtw_distance(imit[k].values, model[k].values)});
    }
  }
  return out;
}

double e_raw(std::string_view imitator, Feature feature,
             std::span<const DtwSample> samples) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (s.imitator != imitator || s.feature != feature) continue;
    sum += s.distance;
    ++n;
  }
  if (n == 0)
    throw NumericError("no samples for speaker " + std::string(imitator) + ", feature " +
                       std::string(feature_name(feature)));
  return sum / static_cast<double>(n);
}

Normalization normalize_samples(std::span<const double> values, NormScale scale) {
  if (values.size() < 2) throw NumericError("normalization needs at least two samples");
  Normalization norm;
  norm.fence_low = -std::numeric_limits<double>::infinity();
  norm.fence_high = std::numeric_limits<double>::infinity();
  if (values.size() >= 4) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double q25 = quantile_sorted(sorted, 0.25);
    const double q75 = quantile_sorted(sorted, 0.75);
    const double iqr = q75 - q25;
    norm.fence_low = q25 - 1.5 * iqr;
    norm.fence_high = q75 + 1.5 * iqr;
  }
  std::vector<double> kept;
  for (double v : values)
    if (v >= norm.fence_low && v <= norm.fence_high) kept.push_back(v);
  norm.retained = kept.size();
  if (kept.size() < 2) throw NumericError("normalization: fewer than two retained samples");

  norm.center = mean(kept);
  const double sd = std::sqrt(sample_variance(kept));
  if (!(sd > 0.0)) throw NumericError("normalization: zero variance");
  norm.scale = scale == NormScale::kSd ? sd : sd / std::sqrt(static_cast<double>(kept.size()));

  norm.z.reserve(values.size());
  for (double v : values) {
    if (v >= norm.fence_low && v <= norm.fence_high)
      norm.z.emplace_back((v - norm.center) / norm.scale);
    else
      norm.z.emplace_back(std::nullopt);
  }
  return norm;
}

std::vector<std::optional<double>> normalized_values(std::span<const DtwSample> samples,
                                                     NormScale scale, NormPool pool) {
  // Group sample indices by pool key, in first-seen order.
  std::map<std::pair<Feature, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string who = pool == NormPool::kSpeaker ? samples[i].imitator : std::string();
    groups[{samples[i].feature, who}].push_back(i);
  }
  std::vector<std::optional<double>> out(samples.size());
  for (const auto& [key, idx] : groups) {
    std::vector<double> vals;
    vals.reserve(idx.size());
    for (std::size_t i : idx) vals.push_back(samples[i].distance);
    try {
      const Normalization norm = normalize_samples(vals, scale);
      for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = norm.z[k];
    } catch (const NumericError&) {
      // Degenerate pool (e.g. perfect imitation): nothing is normalizable.
    }
  }
  return out;
}

EoptResult e_opt(std::string_view imitator, Feature feature,
                 std::span<const DtwSample> samples,
                 std::span<const std::optional<double>> normalized) {
  if (samples.size() != normalized.size())
    throw NumericError("e_opt: samples and normalized values differ in length");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].imitator != imitator || samples[i].feature != feature) continue;
    if (!normalized[i]) continue;
    sum += *normalized[i];
    ++n;
  }
  if (n == 0)
    throw NumericError("e_opt: no retained samples for speaker " + std::string(imitator) +
                       ", feature " + std::string(feature_name(feature)));
  return {sum / static_cast<double>(n), n};
}

namespace {

std::vector<SpeakerId> imitating_speakers(const CorpusManifest& manifest) {
  std::set<SpeakerId> imitators;
  for (const auto& u : manifest.utterances) imitators.insert(u.imitator);
  std::vector<SpeakerId> out;
  for (const auto& s : manifest.speakers)
    if (imitators.count(s.id)) out.push_back(s.id);
  return out;
}

}  // namespace

std::vector<EntrainmentScore> entrainment_scores(const CorpusManifest& manifest,
                                                 std::span<const DtwSample> samples,
                                                 const EntrainOptions& options) {
  const auto z_sd = normalized_values(samples, NormScale::kSd, options.pool);
  std::vector<std::optional<double>> z_se;
  if (options.scale == NormScale::kSe)
    z_se = normalized_values(samples, NormScale::kSe, options.pool);

  std::vector<EntrainmentScore> out;
  for (const auto& id : imitating_speakers(manifest)) {
    for (Feature f : kAllFeatures) {
      EntrainmentScore s;
      s.speaker = id;
      s.feature = f;
      s.e_raw = e_raw(id, f, samples);
      try {
        const EoptResult r = e_opt(id, f, samples, z_sd);
        s.e_opt = r.value;
        s.n_used = r.n_used;
        if (!z_se.empty()) s.e_opt_se = e_opt(id, f, samples, z_se).value;
      } catch (const NumericError&) {
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

double partner_distance(std::string_view target, Feature feature,
                        std::span<const DtwSample> samples) {
  return e_raw(target, feature, samples);
}

OtherDistance other_distance(std::string_view target, Feature feature,
                             const CorpusManifest& manifest, const ContourStore& store,
                             SurrogatePool pool) {
  const Speaker* t = manifest.find_speaker(target);
  if (!t) throw ValidationError("unknown speaker '" + std::string(target) + "'");
  const SpeakerId& partner = manifest.partner_of(target);

  std::vector<int> imitated;
  for (const auto& u : manifest.utterances)
    if (u.imitator == target) imitated.push_back(u.index);
  std::sort(imitated.begin(), imitated.end());
  imitated.erase(std::unique(imitated.begin(), imitated.end()), imitated.end());

  const auto k = static_cast<std::size_t>(feature);
  double total = 0.0;
  int used = 0;
  bool any_candidate = false;
  for (const auto& m : manifest.speakers) {
    if (m.id == target || m.id == partner) continue;
    if (pool == SurrogatePool::kSameSex && m.sex != t->sex) continue;
    any_candidate = true;
    double sum = 0.0;
    int n = 0;
    for (int idx : imitated) {
      const ContourSet* theirs = store.find({m.id, idx, Role::kModel});
      if (!theirs) continue;
      const ContourSet& mine = store.at({std::string(target), idx, Role::kImitation});
      sum += dtw_distance(mine[k].values, (*theirs)[k].values);
      ++n;
    }
    if (n == 0) continue;
    total += sum / n;
    ++used;
  }
  if (!any_candidate)
    throw NumericError("empty surrogate pool for speaker " + std::string(target));
  if (used == 0)
    throw NumericError("no surrogate shares a model-role turn with speaker " +
                       std::string(target));
  return {total / used, used};
}

std::vector<PartnerOtherRow> partner_other_table(const CorpusManifest& manifest,
                                                 const ContourStore& store,
                                                 std::span<const DtwSample> samples,
                                                 SurrogatePool pool) {
  std::vector<PartnerOtherRow> out;
  for (const auto& id : imitating_speakers(manifest)) {
    for (Feature f : kAllFeatures) {
      PartnerOtherRow row;
      row.speaker = id;
      row.feature = f;
      row.partner = partner_distance(id, f, samples);
      try {
        const OtherDistance od = other_distance(id, f, manifest, store, pool);
        row.other = od.value;
        row.n_surrogates = od.n_surrogates;
      } catch (const NumericError&) {
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

double inner_dyad_distance(double a_score, double b_score) {
  const double m = 0.5 * (a_score + b_score);
  if (m == 0.0) return 0.0;
  return (a_score - b_score) / m;
}

std::vector<DyadScore> dyad_scores(const CorpusManifest& manifest,
                                   std::span<const EntrainmentScore> scores) {
  std::map<std::pair<std::string, Feature>, double> raw;
  for (const auto& s : scores) raw[{s.speaker, s.feature}] = s.e_raw;
  std::vector<DyadScore> out;
  for (const auto& d : manifest.dyads) {
    for (Feature f : kAllFeatures) {
      auto ia = raw.find({d.a, f});
      auto ib = raw.find({d.b, f});
      if (ia == raw.end() || ib == raw.end()) continue;
      out.push_back({d.a, d.b, f, inner_dyad_distance(ia->second, ib->second)});
    }
  }
  return out;
}

}  // namespace f0entrain
