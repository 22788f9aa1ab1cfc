// core/src/pipeline.cc

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

#include "f0entrain/pipeline.h"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "f0entrain/csv.h"
#include "json.hpp"

#ifndef F0ENTRAIN_VERSION
#define F0ENTRAIN_VERSION "dev"
#endif

namespace f0entrain {

const char* version() { return F0ENTRAIN_VERSION; }

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double number_value(const std::string& key, const std::string& value) {
  try {
    return parse_double(value, key);
  } catch (const ParseError&) {
    throw ValidationError("config key '" + key + "': not a number: '" + value + "'");
  }
}

int int_value(const std::string& key, const std::string& value) {
  const double v = number_value(key, value);
  if (v != static_cast<int>(v))
    throw ValidationError("config key '" + key + "': expected an integer, got '" + value + "'");
  return static_cast<int>(v);
}

bool bool_value(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ValidationError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

[[noreturn]] void bad_choice(const std::string& key, const std::string& value,
                             const char* choices) {
  throw ValidationError("config key '" + key + "': '" + value + "' is not one of " + choices);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string value(trim(raw));
  auto& o = options;
  if (key == "manifest") {
    manifest = value;
  } else if (key == "scores") {
    scores = value;
  } else if (key == "out" || key == "out_dir") {
    out_dir = value;
  } else if (key == "threads") {
    threads = int_value(key, value);
  } else if (key == "smooth_window") {
    o.smoothing.window = int_value(key, value);
  } else if (key == "smooth_order") {
    o.smoothing.order = int_value(key, value);
  } else if (key == "outlier_scope") {
    if (value == "utterance") o.outlier_scope = OutlierScope::kUtterance;
    else if (value == "speaker") o.outlier_scope = OutlierScope::kSpeaker;
    else bad_choice(key, value, "utterance|speaker");
  } else if (key == "surrogate_pool") {
    if (value == "same-sex") o.surrogate_pool = SurrogatePool::kSameSex;
    else if (value == "all") o.surrogate_pool = SurrogatePool::kAll;
    else bad_choice(key, value, "same-sex|all");
  } else if (key == "norm") {
    if (value == "sd") o.norm.scale = NormScale::kSd;
    else if (value == "se") o.norm.scale = NormScale::kSe;
    else bad_choice(key, value, "sd|se");
  } else if (key == "norm_pool") {
    if (value == "corpus") o.norm.pool = NormPool::kCorpus;
    else if (value == "speaker") o.norm.pool = NormPool::kSpeaker;
    else bad_choice(key, value, "corpus|speaker");
  } else if (key == "alpha") {
    o.thresholds.alpha = number_value(key, value);
  } else if (key == "trend") {
    o.thresholds.trend = number_value(key, value);
  } else if (key == "semitone_ref") {
    o.semitone_ref = value == "off" ? 0.0 : number_value(key, value);
  } else if (key == "icc_model") {
    if (value == "consistency") o.icc_model = IccModel::kConsistency;
    else if (value == "agreement") o.icc_model = IccModel::kAgreement;
    else bad_choice(key, value, "consistency|agreement");
  } else if (key == "grid_measure") {
    if (value == "opt") o.grid_measure = GridMeasure::kOpt;
    else if (value == "raw") o.grid_measure = GridMeasure::kRaw;
    else bad_choice(key, value, "opt|raw");
  } else if (key == "from_wav") {
    o.from_wav = bool_value(key, value);
  } else if (key == "pitch_floor") {
    o.pitch.floor = number_value(key, value);
  } else if (key == "pitch_ceiling") {
    o.pitch.ceiling = number_value(key, value);
  } else if (key == "pitch_step") {
    o.pitch.time_step = number_value(key, value);
  } else if (key == "voicing_threshold") {
    o.pitch.voicing_threshold = number_value(key, value);
  } else if (key == "quantile") {
    if (value != "type7") bad_choice(key, value, "type7");
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

void RunConfig::apply_text(std::string_view text, std::string_view source) {
  const std::string_view body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string(source) + ": " + e.what());
    }
    const nlohmann::json& cfg = doc.contains("config") ? doc.at("config") : doc;
    if (!cfg.is_object()) throw ParseError(std::string(source) + ": 'config' is not an object");
    for (const auto& [k, v] : cfg.items())
      set(k, v.is_string() ? v.get<std::string>() : v.dump());
    return;
  }
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view l = line;
    if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(std::string(source) + ":" + std::to_string(line_no) +
                       ": expected key = value");
    set(std::string(trim(l.substr(0, eq))), std::string(trim(l.substr(eq + 1))));
  }
}

void RunConfig::load(const std::filesystem::path& path) {
  apply_text(read_text(path), path.string());
}

std::map<std::string, std::string> RunConfig::to_map() const {
  const auto& o = options;
  std::map<std::string, std::string> m;
  m["manifest"] = manifest;
  m["scores"] = scores;
  m["smooth_window"] = std::to_string(o.smoothing.window);
  m["smooth_order"] = std::to_string(o.smoothing.order);
  m["outlier_scope"] = o.outlier_scope == OutlierScope::kUtterance ? "utterance" : "speaker";
  m["surrogate_pool"] = o.surrogate_pool == SurrogatePool::kSameSex ? "same-sex" : "all";
  m["norm"] = o.norm.scale == NormScale::kSd ? "sd" : "se";
  m["norm_pool"] = o.norm.pool == NormPool::kCorpus ? "corpus" : "speaker";
  m["alpha"] = shortest(o.thresholds.alpha);
  m["trend"] = shortest(o.thresholds.trend);
  m["semitone_ref"] = o.semitone_ref > 0.0 ? shortest(o.semitone_ref) : "off";
  m["icc_model"] = o.icc_model == IccModel::kConsistency ? "consistency" : "agreement";
  m["grid_measure"] = o.grid_measure == GridMeasure::kOpt ? "opt" : "raw";
  m["from_wav"] = o.from_wav ? "true" : "false";
  m["pitch_floor"] = shortest(o.pitch.floor);
  m["pitch_ceiling"] = shortest(o.pitch.ceiling);
  m["pitch_step"] = shortest(o.pitch.time_step);
  m["voicing_threshold"] = shortest(o.pitch.voicing_threshold);
  m["quantile"] = "type7";
  return m;
}

void RunConfig::validate() const {
  if (manifest.empty()) throw ValidationError("no manifest given");
  if (out_dir.empty()) throw ValidationError("no output directory given");
  if (threads < 1) throw ValidationError("thread count must be >= 1");
  options.smoothing.validate();
  const auto& th = options.thresholds;
  if (!(th.alpha > 0.0 && th.alpha < 1.0)) throw ValidationError("alpha must lie in (0,1)");
  if (!(th.trend > 0.0 && th.trend < 1.0)) throw ValidationError("trend must lie in (0,1)");
  if (options.semitone_ref < 0.0) throw ValidationError("semitone reference must be positive");
  if (!std::filesystem::exists(manifest)) throw IoError("manifest not found: " + manifest);
  if (!scores.empty() && !std::filesystem::exists(scores))
    throw IoError("score table not found: " + scores);
}

// ---------------------------------------------------------------------------
// Readers

DiskCorpusReader::DiskCorpusReader(const CorpusManifest& manifest, bool from_wav,
                                   PitchConfig pitch)
    : manifest_(manifest), from_wav_(from_wav), pitch_(pitch) {}

F0Track DiskCorpusReader::track(const std::string& path) const {
  const std::string full = manifest_.resolve(path);
  if (from_wav_) return estimate_f0(read_wav(full), pitch_);
  return load_f0_csv(full);
}

Alignment DiskCorpusReader::alignment(const std::string& path) const {
  return load_alignment(manifest_.resolve(path));
}

F0Track MemoryCorpusReader::track(const std::string& path) const {
  auto it = corpus_.tracks.find(path);
  if (it == corpus_.tracks.end()) throw IoError("no in-memory track " + path);
  return it->second;
}

Alignment MemoryCorpusReader::alignment(const std::string& path) const {
  auto it = corpus_.alignments.find(path);
  if (it == corpus_.alignments.end()) throw IoError("no in-memory alignment " + path);
  return {it->second, 0};
}

// ---------------------------------------------------------------------------
// Analysis

std::vector<Rendition> list_renditions(const CorpusManifest& manifest) {
  std::map<RenditionKey, Rendition> by_key;
  auto add = [&](RenditionKey key, const std::string& f0, const std::string& align) {
    auto [it, inserted] = by_key.try_emplace(key, Rendition{key, f0, align});
    if (!inserted && (it->second.f0_path != f0 || it->second.align_path != align))
      throw ValidationError("speaker " + key.speaker + " turn " + std::to_string(key.index) +
                            " (" + std::string(role_name(key.role)) +
                            ") is listed with two different files");
  };
  for (const auto& u : manifest.utterances) {
    add({u.imitator, u.index, Role::kImitation}, u.imitator_f0, u.imitator_align);
    add({u.model, u.index, Role::kModel}, u.model_f0, u.model_align);
  }
  std::vector<Rendition> out;
  out.reserve(by_key.size());
  for (auto& [_, r] : by_key) out.push_back(std::move(r));
  return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  auto run_one = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run_one(i);
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Analysis analyze_corpus(const CorpusManifest& manifest, const CorpusReader& reader,
                        const AnalysisOptions& options, int threads, bool keep_tracks) {
  options.smoothing.validate();
  const auto renditions = list_renditions(manifest);
  const std::size_t n = renditions.size();

  std::vector<F0Track> filled(n);
  std::vector<Alignment> aligns(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto& r = renditions[i];
    aligns[i] = reader.alignment(r.align_path);
    const F0Track raw = reader.track(r.f0_path);
    try {
      filled[i] = interpolate_unvoiced(raw);
    } catch (const NumericError& e) {
      throw NumericError(r.f0_path + ": " + e.what());
    }
  });

  std::map<SpeakerId, OutlierBounds> speaker_bounds;
  if (options.outlier_scope == OutlierScope::kSpeaker) {
    std::map<SpeakerId, std::vector<double>> pooled;
    for (std::size_t i = 0; i < n; ++i) {
      auto& v = pooled[renditions[i].key.speaker];
      for (const auto& s : filled[i].samples) v.push_back(s.value);
    }
    for (const auto& [id, v] : pooled)
      if (v.size() >= 4) speaker_bounds[id] = outlier_bounds(v);
  }

  Analysis a;
  a.utterances.resize(n);
  std::vector<ContourSet> contours(n);
  std::vector<F0Track> cleaned(keep_tracks ? n : 0);
  std::vector<int> skipped(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto& r = renditions[i];
    std::optional<OutlierBounds> bounds;
    if (auto it = speaker_bounds.find(r.key.speaker); it != speaker_bounds.end())
      bounds = it->second;
    OutlierResult o;
    try {
      o = two_pass_outlier(filled[i], bounds);
    } catch (const NumericError& e) {
      throw NumericError(r.f0_path + ": " + e.what());
    }
    skipped[i] = o.too_short ? 1 : 0;
    F0Track clean = sg_smooth(o.track, options.smoothing);
    if (options.semitone_ref > 0.0) clean = to_semitones(clean, options.semitone_ref);
    UtteranceFeatures u = parameterize_utterance(clean, aligns[i].words);
    u.speaker = r.key.speaker;
    u.utterance_index = r.key.index;
    u.role = r.key.role;
    try {
      contours[i] = build_contours(u);
    } catch (const NumericError& e) {
      throw NumericError(r.f0_path + " / " + r.align_path + ": " + e.what());
    }
    a.utterances[i] = std::move(u);
    if (keep_tracks) cleaned[i] = std::move(clean);
  });

  for (std::size_t i = 0; i < n; ++i) {
    a.dropped_alignment_words += aligns[i].dropped;
    a.dropped_short_words += a.utterances[i].dropped_words;
    a.outlier_skipped_tracks += skipped[i];
    a.store.insert(renditions[i].key, std::move(contours[i]));
    if (keep_tracks) a.clean_tracks.emplace(renditions[i].key, std::move(cleaned[i]));
  }

  // DTW per record, assembled in manifest order.
  const auto& recs = manifest.utterances;
  std::vector<std::vector<DtwSample>> per_record(recs.size());
  parallel_for(recs.size(), threads, [&](std::size_t i) {
    CorpusManifest one;
    one.utterances = {recs[i]};
    per_record[i] = partner_samples(one, a.store);
  });
  for (auto& v : per_record)
    a.samples.insert(a.samples.end(), std::make_move_iterator(v.begin()),
                     std::make_move_iterator(v.end()));

  a.scores = entrainment_scores(manifest, a.samples, options.norm);
  a.partner_other = partner_other_table(manifest, a.store, a.samples, options.surrogate_pool);
  a.tests = partner_other_tests(a.partner_other, options.thresholds);
  a.dyads = dyad_scores(manifest, a.scores);
  return a;
}

FeatureTable speaker_feature_table(std::span<const EntrainmentScore> scores,
                                   GridMeasure measure) {
  FeatureTable table;
  std::set<SpeakerId> incomplete;
  for (const auto& s : scores) {
    auto& row = table[s.speaker];
    if (measure == GridMeasure::kRaw) {
      row[static_cast<std::size_t>(s.feature)] = s.e_raw;
    } else if (s.e_opt) {
      row[static_cast<std::size_t>(s.feature)] = *s.e_opt;
    } else {
      incomplete.insert(s.speaker);
    }
  }
  for (const auto& id : incomplete) table.erase(id);
  return table;
}

FeatureTable dyad_feature_table(std::span<const DyadScore> dyads) {
  FeatureTable table;
  for (const auto& d : dyads)
    table[d.a + "-" + d.b][static_cast<std::size_t>(d.feature)] = d.inner_dyad;
  return table;
}

CriterionTable dyad_score_table(const CorpusManifest& manifest, const CriterionTable& scores) {
  CriterionTable out;
  for (const auto& d : manifest.dyads) {
    auto ia = scores.find(d.a), ib = scores.find(d.b);
    if (ia == scores.end() || ib == scores.end()) continue;
    auto& row = out[d.a + "-" + d.b];
    for (std::size_t c = 0; c < kNumCriteria; ++c) row[c] = ia->second[c] - ib->second[c];
  }
  return out;
}

std::vector<IccRow> icc_table(const ScoreTable& scores, double alpha, IccModel model) {
  std::vector<IccRow> rows;
  for (Criterion c : kAllCriteria) rows.push_back({c, icc_k(scores.rating_matrix(c), alpha, model)});
  return rows;
}

std::string corpus_checksum(const std::filesystem::path& manifest_path,
                            const CorpusManifest& manifest, const std::string& scores_path) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  feed(read_text(manifest_path));
  std::set<std::string> files;
  for (const auto& u : manifest.utterances)
    for (const auto* p : {&u.imitator_f0, &u.model_f0, &u.imitator_align, &u.model_align})
      files.insert(*p);
  for (const auto& f : files) {
    feed(f);
    feed(read_text(manifest.resolve(f)));
  }
  if (!scores_path.empty()) feed(read_text(scores_path));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunSummary run_pipeline(const RunConfig& config) {
  config.validate();
  const auto& opt = config.options;
  const std::filesystem::path out_dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const CorpusManifest manifest = load_manifest(config.manifest);
  RunSummary summary;
  summary.checksum = corpus_checksum(config.manifest, manifest, config.scores);

  DiskCorpusReader reader(manifest, opt.from_wav, opt.pitch);
  summary.analysis = analyze_corpus(manifest, reader, opt, config.threads);
  const Analysis& a = summary.analysis;

  auto emit = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ostringstream ss;
    body(ss);
    write_text(out_dir / name, ss.str());
    summary.files.push_back(name);
  };

  emit("features.csv", [&](std::ostream& o) { write_features_csv(o, a.utterances); });
  emit("dtw.csv", [&](std::ostream& o) { write_dtw_csv(o, a.samples); });
  emit("entrain.csv", [&](std::ostream& o) {
    write_entrain_csv(o, a.scores, opt.norm.scale == NormScale::kSe);
  });
  emit("validate.csv", [&](std::ostream& o) { write_validate_csv(o, a.partner_other); });
  emit("ttest.csv", [&](std::ostream& o) { write_ttest_csv(o, a.tests); });
  emit("dyads.csv", [&](std::ostream& o) { write_dyads_csv(o, a.dyads); });

  if (!config.scores.empty()) {
    const ScoreTable scores = load_scores(config.scores);
    summary.icc = icc_table(scores, opt.thresholds.alpha, opt.icc_model);
    const CriterionTable means = scores.speaker_means();
    summary.grid = correlate_grid(speaker_feature_table(a.scores, opt.grid_measure), means,
                                  opt.thresholds);
    summary.dyad_grid = correlate_grid(dyad_feature_table(a.dyads),
                                       dyad_score_table(manifest, means), opt.thresholds);
  }
  emit("icc.csv", [&](std::ostream& o) { write_icc_csv(o, summary.icc); });
  emit("grid.csv", [&](std::ostream& o) { report_heatmap_csv(o, summary.grid); });
  emit("dyad_grid.csv", [&](std::ostream& o) { report_heatmap_csv(o, summary.dyad_grid); });

  nlohmann::ordered_json doc;
  doc["tool"] = "f0entrain";
  doc["version"] = version();
  doc["corpus_checksum"] = summary.checksum;
  doc["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.to_map()) doc["config"][k] = v;
  doc["outputs"] = summary.files;
  doc["warnings"] = {{"alignment_words_without_timestamps", a.dropped_alignment_words},
                     {"words_shorter_than_two_samples", a.dropped_short_words},
                     {"tracks_too_short_for_outlier_pass", a.outlier_skipped_tracks}};
  write_text(out_dir / "run.json", doc.dump(2) + "\n");
  summary.files.push_back("run.json");
  return summary;
}

}  // namespace f0entrain
