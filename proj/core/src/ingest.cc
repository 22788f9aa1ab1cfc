// core/src/ingest.cc

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

#include "f0entrain/ingest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "f0entrain/csv.h"
#include "json.hpp"

namespace f0entrain {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json& require(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(ctx + ": missing field '" + key + "'");
  return obj.at(key);
}

std::string require_string(const json& obj, const char* key, const std::string& ctx) {
  const json& v = require(obj, key, ctx);
  if (!v.is_string()) throw ParseError(ctx + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string optional_string(const json& obj, const char* key) {
  if (obj.contains(key) && obj.at(key).is_string()) return obj.at(key).get<std::string>();
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

const Speaker* CorpusManifest::find_speaker(std::string_view id) const {
  for (const auto& s : speakers)
    if (s.id == id) return &s;
  return nullptr;
}

const SpeakerId& CorpusManifest::partner_of(std::string_view id) const {
  for (const auto& d : dyads) {
    if (d.a == id) return d.b;
    if (d.b == id) return d.a;
  }
  throw ValidationError("speaker '" + std::string(id) + "' belongs to no dyad");
}

std::string CorpusManifest::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (base_dir / p).string();
}

void CorpusManifest::validate() const {
  std::set<SpeakerId> ids;
  for (const auto& s : speakers) {
    if (s.id.empty()) throw ValidationError("speaker with empty id");
    if (!ids.insert(s.id).second)
      throw ValidationError("duplicate speaker '" + s.id + "'");
  }
  std::map<SpeakerId, std::size_t> dyad_of;
  for (std::size_t i = 0; i < dyads.size(); ++i) {
    const Dyad& d = dyads[i];
    const std::string ctx = "dyad " + std::to_string(i) + " [" + d.a + "," + d.b + "]";
    if (d.a == d.b) throw ValidationError(ctx + ": self-dyad");
    for (const auto* m : {&d.a, &d.b}) {
      if (!ids.count(*m)) throw ValidationError(ctx + ": unknown speaker '" + *m + "'");
      if (!dyad_of.emplace(*m, i).second)
        throw ValidationError(ctx + ": speaker '" + *m + "' already in dyad " +
                              std::to_string(dyad_of[*m]));
    }
  }
  for (const auto& id : ids)
    if (!dyad_of.count(id)) throw ValidationError("speaker '" + id + "' belongs to no dyad");

  std::set<std::tuple<SpeakerId, SpeakerId, int>> seen;
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    const auto& u = utterances[i];
    const std::string ctx = "utterance record " + std::to_string(i) + " (index " +
                            std::to_string(u.index) + ", " + u.imitator + "<-" +
                            u.model + ")";
    if (u.index < 0) throw ValidationError(ctx + ": negative index");
    if (!ids.count(u.imitator))
      throw ValidationError(ctx + ": unknown imitator '" + u.imitator + "'");
    if (!ids.count(u.model)) throw ValidationError(ctx + ": unknown model '" + u.model + "'");
    if (u.imitator == u.model) throw ValidationError(ctx + ": imitator equals model");
    if (dyad_of.at(u.imitator) != dyad_of.at(u.model))
      throw ValidationError(ctx + ": imitator and model are not dyad partners");
    if (!seen.emplace(u.imitator, u.model, u.index).second)
      throw ValidationError(ctx + ": duplicate utterance index for this pair");
  }
}

CorpusManifest parse_manifest(std::string_view json_text,
                              const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  CorpusManifest m;
  m.base_dir = base_dir;

  const json& speakers = require(doc, "speakers", "manifest");
  if (!speakers.is_array()) throw ParseError("manifest: 'speakers' must be an array");
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    const std::string ctx = "manifest speakers[" + std::to_string(i) + "]";
    const json& s = speakers[i];
    Speaker sp;
    if (s.is_string()) {
      sp.id = s.get<std::string>();
    } else {
      sp.id = require_string(s, "id", ctx);
      sp.sex = optional_string(s, "sex");
      sp.l1 = optional_string(s, "l1");
    }
    m.speakers.push_back(std::move(sp));
  }

  const json& dyads = require(doc, "dyads", "manifest");
  if (!dyads.is_array()) throw ParseError("manifest: 'dyads' must be an array");
  for (std::size_t i = 0; i < dyads.size(); ++i) {
    const json& d = dyads[i];
    if (!d.is_array() || d.size() != 2 || !d[0].is_string() || !d[1].is_string())
      throw ParseError("manifest dyads[" + std::to_string(i) +
                       "]: expected a pair of speaker ids");
    m.dyads.push_back({d[0].get<std::string>(), d[1].get<std::string>()});
  }

  const json& utts = require(doc, "utterances", "manifest");
  if (!utts.is_array()) throw ParseError("manifest: 'utterances' must be an array");
  for (std::size_t i = 0; i < utts.size(); ++i) {
    const std::string ctx = "manifest utterances[" + std::to_string(i) + "]";
    const json& u = utts[i];
    UtteranceRecord r;
    const json& idx = require(u, "index", ctx);
    if (!idx.is_number_integer()) throw ParseError(ctx + ": 'index' must be an integer");
    r.index = idx.get<int>();
    r.imitator = require_string(u, "imitator", ctx);
    r.model = require_string(u, "model", ctx);
    r.imitator_f0 = require_string(u, "imitator_f0", ctx);
    r.model_f0 = require_string(u, "model_f0", ctx);
    r.imitator_align = require_string(u, "imitator_align", ctx);
    r.model_align = require_string(u, "model_align", ctx);
    m.utterances.push_back(std::move(r));
  }
  m.validate();
  return m;
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

std::string manifest_to_json(const CorpusManifest& m) {
  ordered_json doc;
  doc["speakers"] = ordered_json::array();
  for (const auto& s : m.speakers) {
    ordered_json o;
    o["id"] = s.id;
    if (!s.sex.empty()) o["sex"] = s.sex;
    if (!s.l1.empty()) o["l1"] = s.l1;
    doc["speakers"].push_back(std::move(o));
  }
  doc["dyads"] = ordered_json::array();
  for (const auto& d : m.dyads) doc["dyads"].push_back({d.a, d.b});
  doc["utterances"] = ordered_json::array();
  for (const auto& u : m.utterances) {
    ordered_json o;
    o["index"] = u.index;
    o["imitator"] = u.imitator;
    o["model"] = u.model;
    o["imitator_f0"] = u.imitator_f0;
    o["model_f0"] = u.model_f0;
    o["imitator_align"] = u.imitator_align;
    o["model_align"] = u.model_align;
    doc["utterances"].push_back(std::move(o));
  }
  return doc.dump(1) + "\n";
}

void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << manifest_to_json(manifest);
}

// ---------------------------------------------------------------------------
// Alignment

Alignment parse_alignment(std::string_view json_text, std::string_view source) {
  const std::string src(source);
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(src + ": " + e.what());
  }
  const json& segments = require(doc, "segments", src);
  if (!segments.is_array()) throw ParseError(src + ": 'segments' must be an array");

  Alignment out;
  for (const auto& seg : segments) {
    if (!seg.is_object() || !seg.contains("words")) continue;
    const json& words = seg.at("words");
    if (!words.is_array()) throw ParseError(src + ": 'words' must be an array");
    for (const auto& w : words) {
      if (!w.is_object()) throw ParseError(src + ": word entry is not an object");
      const bool timed = w.contains("start") && w.contains("end") &&
                         w.at("start").is_number() && w.at("end").is_number();
      if (!timed) {
        ++out.dropped;
        continue;
      }
      WordSpan span;
      span.text = optional_string(w, "word");
      span.start = w.at("start").get<double>();
      span.end = w.at("end").get<double>();
      out.words.push_back(std::move(span));
    }
  }
  if (out.words.empty()) throw ValidationError(src + ": empty utterance (no timed words)");

  std::stable_sort(out.words.begin(), out.words.end(),
                   [](const WordSpan& a, const WordSpan& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < out.words.size(); ++i) {
    const WordSpan& w = out.words[i];
    if (!(w.end > w.start))
      throw ValidationError(src + ": word " + std::to_string(i) + " '" + w.text +
                            "' has end <= start");
    if (i > 0 && w.start < out.words[i - 1].end - 1e-9)
      throw ValidationError(src + ": overlap between word " + std::to_string(i - 1) +
                            " '" + out.words[i - 1].text + "' and word " +
                            std::to_string(i) + " '" + w.text + "'");
  }
  return out;
}

Alignment load_alignment(const std::filesystem::path& path) {
  return parse_alignment(read_file(path), path.string());
}

std::string alignment_to_json(const std::vector<WordSpan>& words) {
  ordered_json seg;
  seg["words"] = ordered_json::array();
  for (const auto& w : words) {
    ordered_json o;
    o["word"] = w.text;
    // Round to the microsecond so files are stable and human readable.
    o["start"] = std::round(w.start * 1e6) / 1e6;
    o["end"] = std::round(w.end * 1e6) / 1e6;
    seg["words"].push_back(std::move(o));
  }
  ordered_json doc;
  doc["segments"] = ordered_json::array({seg});
  return doc.dump() + "\n";
}

// ---------------------------------------------------------------------------
// F0 CSV

F0Track parse_f0_csv(std::istream& in, std::string_view source) {
  const std::string src(source);
  CsvTable table = CsvTable::parse(in, src);
  const std::size_t tcol = table.column("time_s");
  const std::size_t fcol = table.column("f0_hz");
  const auto& rows = table.rows();
  if (rows.empty()) throw ParseError(src + ": empty file (no samples)");
  if (rows.size() < 2)
    throw ValidationError(src + ": need at least two rows to infer the step");

  std::vector<double> times;
  times.reserve(rows.size());
  F0Track track;
  track.samples.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string ctx = src + " row " + std::to_string(i + 1);
    times.push_back(parse_double(rows[i][tcol], ctx));
    const std::string& f = rows[i][fcol];
    double v = 0.0;
    if (!f.empty()) v = parse_double(f, ctx);
    if (v < 0.0) throw ValidationError(ctx + ": negative F0 " + f);
    track.samples.push_back({v, v > 0.0});
  }

  double step = times[1] - times[0];
  const double snapped = std::round(step * 1e6) / 1e6;
  if (std::abs(snapped - step) < 1e-9) step = snapped;
  if (!(step > 0.0)) throw ValidationError(src + ": times not strictly increasing");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1]))
      throw ValidationError(src + ": times not strictly increasing at row " +
                            std::to_string(i + 1));
    const double expected = times[0] + static_cast<double>(i) * step;
    if (std::abs(times[i] - expected) > 1e-6 + 1e-12)
      throw ValidationError(src + ": non-uniform step at row " + std::to_string(i + 1));
  }
  track.start_time = times[0];
  track.step = step;
  return track;
}

F0Track load_f0_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_f0_csv(in, path.string());
}

void write_f0_csv(std::ostream& out, const F0Track& track) {
  out << "time_s,f0_hz\n";
  for (std::size_t i = 0; i < track.size(); ++i) {
    out << format_fixed(track.time_at(i)) << ',';
    if (track.samples[i].voiced) out << format_fixed(track.samples[i].value);
    out << '\n';
  }
}

void save_f0_csv(const std::filesystem::path& path, const F0Track& track) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_f0_csv(out, track);
}

F0Track slice_track(const F0Track& track, const WordSpan& span) {
  // Index of the first sample with time >= x; the epsilon absorbs the
  // rounding in start_time + i * step so grid-aligned boundaries are exact.
  auto first_at_or_after = [&](double x) -> std::ptrdiff_t {
    const double pos = (x - track.start_time) / track.step;
    const double idx = std::ceil(pos - 1e-6);
    const double n = static_cast<double>(track.size());
    return static_cast<std::ptrdiff_t>(std::clamp(idx, 0.0, n));
  };
  const std::ptrdiff_t lo = first_at_or_after(span.start);
  const std::ptrdiff_t hi = first_at_or_after(span.end);
  if (hi <= lo)
    throw NumericError("empty slice for word '" + span.text + "' [" +
                       format_fixed(span.start) + ", " + format_fixed(span.end) + ")");
  F0Track out;
  out.step = track.step;
  out.start_time = track.time_at(static_cast<std::size_t>(lo));
  out.samples.assign(track.samples.begin() + lo, track.samples.begin() + hi);
  return out;
}

// ---------------------------------------------------------------------------
// Scores

std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::kPronunciation: return "pronunciation";
    case Criterion::kIntonation: return "intonation";
    case Criterion::kFluency: return "fluency";
    case Criterion::kOverall: return "overall";
    case Criterion::kFinal: return "final";
  }
  return "?";
}

std::optional<Criterion> parse_criterion(std::string_view name) {
  for (Criterion c : kAllCriteria)
    if (criterion_name(c) == name) return c;
  return std::nullopt;
}

ScoreTable::ScoreTable(std::vector<ScoreRow> rows) : rows_(std::move(rows)) {
  std::set<std::pair<SpeakerId, std::string>> seen;
  for (auto& r : rows_) {
    const std::string ctx = "score row (" + r.speaker + "," + r.rater + ")";
    if (!seen.emplace(r.speaker, r.rater).second)
      throw ValidationError(ctx + ": duplicate (speaker, rater)");
    double sum = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      const double v = r.scores[c];
      if (!(v >= 1.0 && v <= 5.0))
        throw ValidationError(ctx + ": " + std::string(criterion_name(kAllCriteria[c])) +
                              " score " + format_general(v) + " out of range [1,5]");
      sum += v;
    }
    r.scores[static_cast<std::size_t>(Criterion::kFinal)] = sum / 4.0;
  }
}

std::vector<SpeakerId> ScoreTable::speakers() const {
  std::set<SpeakerId> s;
  for (const auto& r : rows_) s.insert(r.speaker);
  return {s.begin(), s.end()};
}

std::vector<std::string> ScoreTable::raters() const {
  std::set<std::string> s;
  for (const auto& r : rows_) s.insert(r.rater);
  return {s.begin(), s.end()};
}

std::map<SpeakerId, std::array<double, kNumCriteria>> ScoreTable::speaker_means() const {
  std::map<SpeakerId, std::array<double, kNumCriteria>> sums;
  std::map<SpeakerId, int> counts;
  for (const auto& r : rows_) {
    auto& acc = sums[r.speaker];
    for (std::size_t c = 0; c < kNumCriteria; ++c) acc[c] += r.scores[c];
    ++counts[r.speaker];
  }
  for (auto& [id, acc] : sums)
    for (auto& v : acc) v /= counts[id];
  return sums;
}

std::vector<std::vector<double>> ScoreTable::rating_matrix(Criterion c) const {
  const auto spk = speakers();
  const auto rat = raters();
  std::map<std::pair<SpeakerId, std::string>, double> cell;
  for (const auto& r : rows_) cell[{r.speaker, r.rater}] = r[c];
  std::vector<std::vector<double>> m(spk.size(), std::vector<double>(rat.size()));
  for (std::size_t i = 0; i < spk.size(); ++i)
    for (std::size_t j = 0; j < rat.size(); ++j) {
      auto it = cell.find({spk[i], rat[j]});
      if (it == cell.end())
        throw ValidationError("incomplete rating matrix: no score from rater '" +
                              rat[j] + "' for speaker '" + spk[i] + "'");
      m[i][j] = it->second;
    }
  return m;
}

ScoreTable parse_scores(std::istream& in, std::string_view source) {
  const std::string src(source);
  CsvTable t = CsvTable::parse(in, src);
  const std::size_t sc = t.column("speaker");
  const std::size_t rc = t.column("rater");
  std::array<std::size_t, 4> cols{};
  for (std::size_t c = 0; c < 4; ++c) cols[c] = t.column(criterion_name(kAllCriteria[c]));
  const bool has_final = t.has_column("final");
  const std::size_t fc = has_final ? t.column("final") : 0;

  std::vector<ScoreRow> rows;
  for (std::size_t i = 0; i < t.rows().size(); ++i) {
    const auto& f = t.rows()[i];
    const std::string ctx = src + " row " + std::to_string(i + 2);
    ScoreRow r;
    r.speaker = f[sc];
    r.rater = f[rc];
    if (r.speaker.empty() || r.rater.empty())
      throw ParseError(ctx + ": empty speaker or rater");
    for (std::size_t c = 0; c < 4; ++c) r.scores[c] = parse_double(f[cols[c]], ctx);
    rows.push_back(std::move(r));
  }
  ScoreTable table(std::move(rows));
  if (has_final) {
    for (std::size_t i = 0; i < t.rows().size(); ++i) {
      const double given = parse_double(t.rows()[i][fc], src);
      const double computed = table.rows()[i][Criterion::kFinal];
      if (std::abs(given - computed) > 1e-9)
        throw ValidationError(src + " row " + std::to_string(i + 2) +
                              ": final score is not the mean of the four criteria");
    }
  }
  return table;
}

ScoreTable load_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_scores(in, path.string());
}

void write_scores(std::ostream& out, const ScoreTable& table) {
  out << "speaker,rater,pronunciation,intonation,fluency,overall\n";
  for (const auto& r : table.rows()) {
    write_csv_row(out, {r.speaker, r.rater, format_fixed(r.scores[0]),
                        format_fixed(r.scores[1]), format_fixed(r.scores[2]),
                        format_fixed(r.scores[3])});
  }
}

}  // namespace f0entrain
