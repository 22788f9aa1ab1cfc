// core/include/f0entrain/ingest.h

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

#ifndef F0ENTRAIN_INGEST_H_
#define F0ENTRAIN_INGEST_H_

#include <array>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "f0entrain/types.h"

namespace f0entrain {

// ---------------------------------------------------------------------------
// Corpus manifest
// ---------------------------------------------------------------------------

struct Speaker {
  SpeakerId id;
  std::string sex;  // free-form group attributes; empty when unknown
  std::string l1;

  bool operator==(const Speaker&) const = default;
};

struct Dyad {
  SpeakerId a;
  SpeakerId b;

  bool operator==(const Dyad&) const = default;
};

// One imitation turn: `imitator` mimics `model`'s rendition of turn `index`.
// Paths are stored as written in the manifest (relative to its directory).
struct UtteranceRecord {
  int index = 0;
  SpeakerId imitator;
  SpeakerId model;
  std::string imitator_f0;
  std::string model_f0;
  std::string imitator_align;
  std::string model_align;

  bool operator==(const UtteranceRecord&) const = default;
};

struct CorpusManifest {
  std::vector<Speaker> speakers;
  std::vector<Dyad> dyads;
  std::vector<UtteranceRecord> utterances;
  // Directory used to resolve relative paths; not serialized.
  std::filesystem::path base_dir;

  const Speaker* find_speaker(std::string_view id) const;
  // Dyad partner of `id`; throws ValidationError if unknown.
  const SpeakerId& partner_of(std::string_view id) const;
  std::string resolve(const std::string& path) const;

  // Checks all manifest invariants; throws ValidationError naming the
  // offending record.
  void validate() const;

  bool operator==(const CorpusManifest& o) const {
    return speakers == o.speakers && dyads == o.dyads && utterances == o.utterances;
  }
};

CorpusManifest parse_manifest(std::string_view json_text,
                              const std::filesystem::path& base_dir);
CorpusManifest load_manifest(const std::filesystem::path& path);
std::string manifest_to_json(const CorpusManifest& manifest);
void write_manifest(const CorpusManifest& manifest,
                    const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Word alignments
// ---------------------------------------------------------------------------

struct Alignment {
  std::vector<WordSpan> words;
  int dropped = 0;  // words without usable timestamps
};

Alignment parse_alignment(std::string_view json_text, std::string_view source);
Alignment load_alignment(const std::filesystem::path& path);
std::string alignment_to_json(const std::vector<WordSpan>& words);

// ---------------------------------------------------------------------------
// F0 tracks
// ---------------------------------------------------------------------------

F0Track parse_f0_csv(std::istream& in, std::string_view source);
F0Track load_f0_csv(const std::filesystem::path& path);
void write_f0_csv(std::ostream& out, const F0Track& track);
void save_f0_csv(const std::filesystem::path& path, const F0Track& track);

// Samples whose time t satisfies span.start <= t < span.end.  Throws
// NumericError("empty slice") when none qualify.
F0Track slice_track(const F0Track& track, const WordSpan& span);

// ---------------------------------------------------------------------------
// Proficiency scores
// ---------------------------------------------------------------------------

enum class Criterion { kPronunciation = 0, kIntonation, kFluency, kOverall, kFinal };
inline constexpr std::size_t kNumCriteria = 5;
inline constexpr std::array<Criterion, kNumCriteria> kAllCriteria = {
    Criterion::kPronunciation, Criterion::kIntonation, Criterion::kFluency,
    Criterion::kOverall, Criterion::kFinal};

std::string_view criterion_name(Criterion c);
std::optional<Criterion> parse_criterion(std::string_view name);

struct ScoreRow {
  SpeakerId speaker;
  std::string rater;
  std::array<double, kNumCriteria> scores{};  // indexed by Criterion

  double operator[](Criterion c) const { return scores[static_cast<std::size_t>(c)]; }
};

class ScoreTable {
 public:
  ScoreTable() = default;
  // Validates range and uniqueness and fills in the final score.
  explicit ScoreTable(std::vector<ScoreRow> rows);

  const std::vector<ScoreRow>& rows() const { return rows_; }
  std::vector<SpeakerId> speakers() const;  // sorted
  std::vector<std::string> raters() const;  // sorted

  // Mean over raters, per speaker and criterion.
  std::map<SpeakerId, std::array<double, kNumCriteria>> speaker_means() const;

  // n_speakers x n_raters matrix for one criterion, speakers and raters in
  // sorted order.  Throws ValidationError if any cell is missing.
  std::vector<std::vector<double>> rating_matrix(Criterion c) const;

 private:
  std::vector<ScoreRow> rows_;
};

ScoreTable parse_scores(std::istream& in, std::string_view source);
ScoreTable load_scores(const std::filesystem::path& path);
void write_scores(std::ostream& out, const ScoreTable& table);

}  // namespace f0entrain

#endif  // F0ENTRAIN_INGEST_H_
