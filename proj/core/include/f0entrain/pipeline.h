// core/include/f0entrain/pipeline.h

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

#ifndef F0ENTRAIN_PIPELINE_H_
#define F0ENTRAIN_PIPELINE_H_

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "f0entrain/entrain.h"
#include "f0entrain/features.h"
#include "f0entrain/ingest.h"
#include "f0entrain/pitch.h"
#include "f0entrain/preprocess.h"
#include "f0entrain/report.h"
#include "f0entrain/stats.h"
#include "f0entrain/synth.h"

namespace f0entrain {

const char* version();

enum class OutlierScope { kUtterance, kSpeaker };
enum class GridMeasure { kOpt, kRaw };

// Everything that determines the numbers a run produces.  Thread count and
// output directory are deliberately absent: neither changes the results.
struct AnalysisOptions {
  SmoothingConfig smoothing;
  OutlierScope outlier_scope = OutlierScope::kUtterance;
  SurrogatePool surrogate_pool = SurrogatePool::kSameSex;
  EntrainOptions norm;
  Thresholds thresholds;
  double semitone_ref = 0.0;  // 0 = stay in Hz
  IccModel icc_model = IccModel::kConsistency;
  GridMeasure grid_measure = GridMeasure::kOpt;
  bool from_wav = false;
  PitchConfig pitch;
};

struct RunConfig {
  std::string manifest;
  std::string scores;  // optional
  std::string out_dir;
  int threads = 1;
  AnalysisOptions options;

  // Flat key=value setters shared by config files, run.json and CLI flags.
  // Throws ValidationError on an unknown key or bad value.
  void set(const std::string& key, const std::string& value);
  // Reads `key = value` lines ('#' comments) or a run.json document.
  void load(const std::filesystem::path& path);
  void apply_text(std::string_view text, std::string_view source);
  // Canonical key/value view (excludes out_dir and threads).
  std::map<std::string, std::string> to_map() const;
  void validate() const;
};

// Supplies raw tracks and alignments by manifest-relative path.
class CorpusReader {
 public:
  virtual ~CorpusReader() = default;
  virtual F0Track track(const std::string& path) const = 0;
  virtual Alignment alignment(const std::string& path) const = 0;
};

// Reads files relative to the manifest directory.  With `from_wav`, track
// paths name WAV files that are run through estimate_f0.
class DiskCorpusReader : public CorpusReader {
 public:
  DiskCorpusReader(const CorpusManifest& manifest, bool from_wav, PitchConfig pitch);
  F0Track track(const std::string& path) const override;
  Alignment alignment(const std::string& path) const override;

 private:
  const CorpusManifest& manifest_;
  bool from_wav_;
  PitchConfig pitch_;
};

class MemoryCorpusReader : public CorpusReader {
 public:
  explicit MemoryCorpusReader(const SynthCorpus& corpus) : corpus_(corpus) {}
  F0Track track(const std::string& path) const override;
  Alignment alignment(const std::string& path) const override;

 private:
  const SynthCorpus& corpus_;
};

struct Rendition {
  RenditionKey key;
  std::string f0_path;
  std::string align_path;
};

// Distinct renditions referenced by the manifest, sorted by key.
std::vector<Rendition> list_renditions(const CorpusManifest& manifest);

struct Analysis {
  std::vector<UtteranceFeatures> utterances;  // rendition order
  std::map<RenditionKey, F0Track> clean_tracks;
  ContourStore store;
  std::vector<DtwSample> samples;
  std::vector<EntrainmentScore> scores;
  std::vector<PartnerOtherRow> partner_other;
  std::vector<FeatureTest> tests;
  std::vector<DyadScore> dyads;
  int dropped_alignment_words = 0;
  int dropped_short_words = 0;
  int outlier_skipped_tracks = 0;
};

// Runs `fn(i)` for i in [0, n) on `threads` workers.  The first exception
// by index is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Cleans and parameterizes every rendition, then computes all entrainment
// measures.  Results do not depend on `threads`.
Analysis analyze_corpus(const CorpusManifest& manifest, const CorpusReader& reader,
                        const AnalysisOptions& options, int threads = 1,
                        bool keep_tracks = false);

// Per-speaker feature table used for the correlation grid.
FeatureTable speaker_feature_table(std::span<const EntrainmentScore> scores,
                                   GridMeasure measure);

// Dyad-level tables: inner-dyad distance vs. score difference (a - b).
// Keys are "a-b".
FeatureTable dyad_feature_table(std::span<const DyadScore> dyads);
CriterionTable dyad_score_table(const CorpusManifest& manifest, const CriterionTable& scores);

std::vector<IccRow> icc_table(const ScoreTable& scores, double alpha, IccModel model);

struct RunSummary {
  std::vector<std::string> files;  // written, relative to out_dir
  Analysis analysis;
  std::vector<GridCell> grid;
  std::vector<GridCell> dyad_grid;
  std::vector<IccRow> icc;
  std::string checksum;
};

// ingest -> (pitch) -> preprocess -> features -> entrain -> stats, writing
// the CSV bundle and run.json under config.out_dir.
RunSummary run_pipeline(const RunConfig& config);

// FNV-1a over the manifest and every file it references (sorted by path),
// plus the score table when given.
std::string corpus_checksum(const std::filesystem::path& manifest_path,
                            const CorpusManifest& manifest, const std::string& scores_path);

}  // namespace f0entrain

#endif  // F0ENTRAIN_PIPELINE_H_
