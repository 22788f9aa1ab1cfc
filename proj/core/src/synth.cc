// core/src/synth.cc

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

#include "f0entrain/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "f0entrain/quantile.h"

namespace f0entrain {

void SynthConfig::validate() const {
  if (n_dyads < 1 || n_utterances < 1)
    throw ValidationError("synth: dyad and utterance counts must be >= 1");
  if (words_min < 1 || words_max < words_min)
    throw ValidationError("synth: invalid words-per-utterance range");
  if (!(noise_eps >= 0.0)) throw ValidationError("synth: noise_eps must be >= 0");
  if (!(f0_min > 0.0 && f0_max >= f0_min)) throw ValidationError("synth: invalid F0 range");
  if (!(step > 0.0)) throw ValidationError("synth: step must be positive");
}

namespace {

struct WordParams {
  double level = 0.0;  // Hz at the word midpoint
  double slope = 0.0;  // Hz across the word
  int samples = 0;
  int gap_after = 0;   // unvoiced samples after the word
};

constexpr int kEdgeSamples = 10;     // leading / trailing silence
constexpr double kLevelSpread = 0.08;  // relative to base F0
constexpr double kSlopeSpread = 0.15;
constexpr double kDeclination = 0.015;  // per word, relative to base F0

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                    static_cast<std::uint32_t>(c)};
  return std::mt19937_64(seq);
}

// Word layout of turn k, shared by every speaker reading it.
std::vector<std::string> turn_text(const SynthConfig& cfg, int k) {
  auto rng = stream(cfg.seed, 1, static_cast<std::uint64_t>(k), 0);
  std::uniform_int_distribution<int> count(cfg.words_min, cfg.words_max);
  const int n = count(rng);
  std::vector<std::string> words;
  for (int j = 0; j < n; ++j) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "t%03dw%02d", k, j);
    words.emplace_back(buf);
  }
  return words;
}

std::vector<WordParams> model_params(double base, std::size_t n_words, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> dur(15, 40);
  std::uniform_int_distribution<int> gap(2, 8);
  std::bernoulli_distribution pause(0.3);
  std::vector<WordParams> out(n_words);
  for (std::size_t j = 0; j < n_words; ++j) {
    auto& w = out[j];
    w.level = base * (1.0 + kLevelSpread * gauss(rng) - kDeclination * static_cast<double>(j));
    w.slope = base * kSlopeSpread * gauss(rng);
    w.samples = dur(rng);
    w.gap_after = pause(rng) ? gap(rng) : 0;
  }
  return out;
}

void render(const std::vector<WordParams>& params, const std::vector<std::string>& text,
            double step, F0Track& track, std::vector<WordSpan>& words) {
  int total = 2 * kEdgeSamples;
  for (const auto& w : params) total += w.samples + w.gap_after;
  track.start_time = 0.0;
  track.step = step;
  track.samples.assign(static_cast<std::size_t>(total), F0Sample{});
  words.clear();
  int pos = kEdgeSamples;
  for (std::size_t j = 0; j < params.size(); ++j) {
    const auto& w = params[j];
    for (int i = 0; i < w.samples; ++i) {
      const double tn = static_cast<double>(i) / static_cast<double>(w.samples - 1);
      const double v = std::max(30.0, w.level + w.slope * (tn - 0.5));
      track.samples[static_cast<std::size_t>(pos + i)] = {round6(v), true};
    }
    words.push_back({text[j], round6(pos * step), round6((pos + w.samples) * step)});
    pos += w.samples + w.gap_after;
  }
}

std::string path_for(const char* dir, const SpeakerId& who, int k, Role role, const char* ext) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s/%s_%03d_%s.%s", dir, who.c_str(), k,
                std::string(role_name(role)).c_str(), ext);
  return buf;
}

// Dyads come in same-sex blocks of two so every speaker has same-sex
// non-partners; a trailing lone dyad joins the first block's sex.
char dyad_sex(int d, int n_dyads) {
  if (d == n_dyads - 1 && d % 2 == 0) return 'F';
  return (d / 2) % 2 == 0 ? 'F' : 'M';
}

}  // namespace

SynthCorpus gen_corpus(const SynthConfig& cfg) {
  cfg.validate();
  SynthCorpus corpus;
  auto& m = corpus.manifest;
  static const char* kL1[] = {"it", "fr", "sk"};

  std::vector<double> base;
  {
    auto rng = stream(cfg.seed, 0, 0, 0);
    std::uniform_real_distribution<double> reg(cfg.f0_min, cfg.f0_max);
    for (int d = 0; d < cfg.n_dyads; ++d) {
      const char sex = dyad_sex(d, cfg.n_dyads);
      const char* l1 = kL1[d % 3];
      SpeakerId ids[2];
      for (int s = 0; s < 2; ++s) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%c%02d", sex, 2 * d + s + 1);
        ids[s] = buf;
        m.speakers.push_back({ids[s], std::string(1, sex), l1});
        base.push_back(reg(rng));
      }
      m.dyads.push_back({ids[0], ids[1]});
    }
  }

  std::vector<std::vector<std::string>> texts;
  for (int k = 0; k < cfg.n_utterances; ++k) texts.push_back(turn_text(cfg, k));

  for (int d = 0; d < cfg.n_dyads; ++d) {
    for (int k = 0; k < cfg.n_utterances; ++k) {
      const int model_slot = k % 2;
      const SpeakerId& model = model_slot == 0 ? m.dyads[d].a : m.dyads[d].b;
      const SpeakerId& imitator = model_slot == 0 ? m.dyads[d].b : m.dyads[d].a;
      const double model_base = base[static_cast<std::size_t>(2 * d + model_slot)];

      auto rng = stream(cfg.seed, 2, static_cast<std::uint64_t>(d),
                        static_cast<std::uint64_t>(k));
      const auto params = model_params(model_base, texts[k].size(), rng);

      // Imitation: same timing, level and slope perturbed in parameter space.
      auto noise_rng = stream(cfg.seed, 3, static_cast<std::uint64_t>(d),
                              static_cast<std::uint64_t>(k));
      std::normal_distribution<double> gauss(0.0, 1.0);
      auto imit_params = params;
      for (auto& w : imit_params) {
        const double dl = gauss(noise_rng), ds = gauss(noise_rng);
        w.level += cfg.noise_eps * kLevelSpread * model_base * dl;
        w.slope += cfg.noise_eps * kSlopeSpread * model_base * ds;
      }

      UtteranceRecord rec;
      rec.index = k;
      rec.imitator = imitator;
      rec.model = model;
      rec.model_f0 = path_for("f0", model, k, Role::kModel, "csv");
      rec.model_align = path_for("align", model, k, Role::kModel, "json");
      rec.imitator_f0 = path_for("f0", imitator, k, Role::kImitation, "csv");
      rec.imitator_align = path_for("align", imitator, k, Role::kImitation, "json");

      render(params, texts[k], cfg.step, corpus.tracks[rec.model_f0],
             corpus.alignments[rec.model_align]);
      render(imit_params, texts[k], cfg.step, corpus.tracks[rec.imitator_f0],
             corpus.alignments[rec.imitator_align]);
      m.utterances.push_back(std::move(rec));
    }
  }
  m.validate();
  return corpus;
}

std::filesystem::path write_corpus(const SynthCorpus& corpus,
                                   const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "f0", ec);
  if (!ec) std::filesystem::create_directories(dir / "align", ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [rel, track] : corpus.tracks) save_f0_csv(dir / rel, track);
  for (const auto& [rel, words] : corpus.alignments) {
    std::ofstream out(dir / rel, std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / rel).string());
    out << alignment_to_json(words);
  }
  const auto manifest_path = dir / "manifest.json";
  write_manifest(corpus.manifest, manifest_path);
  return manifest_path;
}

ScoreTable gen_scores(const std::map<SpeakerId, double>& driver, double coupling,
                      double noise, std::uint64_t seed, int n_raters) {
  if (!(coupling >= -1.0 && coupling <= 1.0))
    throw ValidationError("gen_scores: coupling must lie in [-1, 1]");
  if (!(noise >= 0.0)) throw ValidationError("gen_scores: noise must be >= 0");
  if (n_raters < 1) throw ValidationError("gen_scores: need at least one rater");
  std::vector<double> v;
  for (const auto& [_, x] : driver) v.push_back(x);
  if (v.size() < 2) throw NumericError("gen_scores: need at least two speakers");
  const double mu = mean(v);
  const double sd = std::sqrt(sample_variance(v));
  if (!(sd > 0.0)) throw NumericError("gen_scores: degenerate e_raw spread (all equal)");

  auto rng = stream(seed, 4, 0, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double independent = std::sqrt(std::max(0.0, 1.0 - coupling * coupling));
  std::vector<ScoreRow> rows;
  for (const auto& [id, x] : driver) {
    const double latent = coupling * (x - mu) / sd + independent * gauss(rng);
    for (int r = 0; r < n_raters; ++r) {
      ScoreRow row;
      row.speaker = id;
      char buf[16];
      std::snprintf(buf, sizeof(buf), "R%d", r + 1);
      row.rater = buf;
      for (std::size_t c = 0; c < 4; ++c)
        row.scores[c] = round6(std::clamp(3.0 + 0.4 * latent + noise * gauss(rng), 1.0, 5.0));
      rows.push_back(std::move(row));
    }
  }
  return ScoreTable(std::move(rows));
}

}  // namespace f0entrain
