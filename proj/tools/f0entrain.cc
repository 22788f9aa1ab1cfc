// tools/f0entrain.cc

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

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "f0entrain/csv.h"
#include "f0entrain/pipeline.h"

using namespace f0entrain;

namespace {

// Options shared by every subcommand that runs analysis code.  Flags are
// collected as key=value overrides and applied on top of --config.
struct SharedOptions {
  std::string config_file;
  std::map<std::string, std::string> overrides;
  std::optional<int> threads;
  bool from_wav = false;
};

void add_string_key(CLI::App* cmd, SharedOptions& so, const std::string& flag,
                    const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&so, key](const std::string& v) { so.overrides[key] = v; }, help);
}

void add_shared_options(CLI::App* cmd, SharedOptions& so) {
  cmd->add_option("--config", so.config_file, "key=value config file or run.json")
      ->check(CLI::ExistingFile);
  cmd->add_option("--threads", so.threads, "worker threads (default: $F0ENTRAIN_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--from-wav", so.from_wav, "track paths name WAV files; estimate F0 first");
  add_string_key(cmd, so, "--window", "smooth_window", "Savitzky-Golay window (odd)");
  add_string_key(cmd, so, "--order", "smooth_order", "Savitzky-Golay polynomial order");
  add_string_key(cmd, so, "--outlier-scope", "outlier_scope", "utterance|speaker");
  add_string_key(cmd, so, "--surrogate-pool", "surrogate_pool", "same-sex|all");
  add_string_key(cmd, so, "--norm", "norm", "sd|se");
  add_string_key(cmd, so, "--norm-pool", "norm_pool", "corpus|speaker");
  add_string_key(cmd, so, "--alpha", "alpha", "significance level");
  add_string_key(cmd, so, "--trend", "trend", "trend threshold");
  add_string_key(cmd, so, "--semitone", "semitone_ref", "convert to semitones re this Hz");
  add_string_key(cmd, so, "--icc-model", "icc_model", "consistency|agreement");
  add_string_key(cmd, so, "--grid-measure", "grid_measure", "opt|raw");
  add_string_key(cmd, so, "--pitch-floor", "pitch_floor", "pitch floor, Hz");
  add_string_key(cmd, so, "--pitch-ceiling", "pitch_ceiling", "pitch ceiling, Hz");
}

int env_threads() {
  const char* env = std::getenv("F0ENTRAIN_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  const long n = parse_int(env, "F0ENTRAIN_THREADS");
  if (n < 1) throw ValidationError("F0ENTRAIN_THREADS must be >= 1");
  return static_cast<int>(n);
}

RunConfig build_config(const SharedOptions& so) {
  RunConfig cfg;
  cfg.threads = env_threads();
  if (!so.config_file.empty()) cfg.load(so.config_file);
  for (const auto& [k, v] : so.overrides) cfg.set(k, v);
  if (so.from_wav) cfg.options.from_wav = true;
  if (so.threads) cfg.threads = *so.threads;
  return cfg;
}

// Writes to `path`, or to stdout when it is empty or "-".
void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  body(out);
  if (!out) throw IoError("write failed: " + path);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

Analysis analyze(const std::string& manifest_path, const RunConfig& cfg,
                 CorpusManifest& manifest) {
  manifest = load_manifest(manifest_path);
  DiskCorpusReader reader(manifest, cfg.options.from_wav, cfg.options.pitch);
  return analyze_corpus(manifest, reader, cfg.options, cfg.threads);
}

std::vector<PartnerOtherRow> read_validate_csv(const std::string& path) {
  const CsvTable t = CsvTable::load(path);
  const std::size_t cs = t.column("speaker"), cf = t.column("feature"),
                    cp = t.column("partner_distance"), co = t.column("other_distance"),
                    cn = t.column("n_surrogates");
  std::vector<PartnerOtherRow> rows;
  for (std::size_t i = 0; i < t.rows().size(); ++i) {
    const auto& row = t.rows()[i];
    const std::string ctx = path + " row " + std::to_string(i + 2);
    PartnerOtherRow r;
    r.speaker = row[cs];
    auto f = parse_feature(row[cf]);
    if (!f) throw ParseError(ctx + ": unknown feature '" + row[cf] + "'");
    r.feature = *f;
    r.partner = parse_double(row[cp], ctx);
    if (row[co] != "nan") r.other = parse_double(row[co], ctx);
    r.n_surrogates = static_cast<int>(parse_int(row[cn], ctx));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<EntrainmentScore> load_entrain(const std::string& path) {
  auto in = open_input(path);
  return read_entrain_csv(in, path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"F0 entrainment analysis for speech-imitation corpora"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  // preprocess
  SharedOptions pre_opts;
  std::string pre_in, pre_out;
  bool pre_raw = false;
  auto* pre = app.add_subcommand("preprocess", "clean one F0 track (interpolate, outliers, smooth)");
  pre->add_option("input", pre_in, "F0 CSV, or WAV with --from-wav")->required();
  pre->add_option("-o,--out", pre_out, "output F0 CSV (default stdout)");
  pre->add_flag("--raw", pre_raw, "with --from-wav: write the pitch estimate uncleaned");
  add_shared_options(pre, pre_opts);

  // features
  SharedOptions feat_opts;
  std::string feat_manifest, feat_f0, feat_align, feat_out, feat_speaker = "S", feat_role = "imit";
  int feat_utt = 0;
  auto* feat = app.add_subcommand("features", "per-word F0 parameters");
  feat->add_option("--manifest", feat_manifest, "corpus manifest (clean and parameterize all)");
  feat->add_option("--f0", feat_f0, "single cleaned F0 CSV");
  feat->add_option("--align", feat_align, "word alignment JSON for --f0");
  feat->add_option("--speaker", feat_speaker, "speaker label for --f0");
  feat->add_option("--utterance", feat_utt, "utterance index for --f0");
  feat->add_option("--role", feat_role, "imit|model for --f0");
  feat->add_option("-o,--out", feat_out, "features CSV (default stdout)");
  add_shared_options(feat, feat_opts);

  // entrain
  SharedOptions ent_opts;
  std::string ent_manifest, ent_features, ent_dtw_out, ent_out;
  auto* ent = app.add_subcommand("entrain", "DTW samples and per-speaker entrainment");
  ent->add_option("--manifest", ent_manifest, "corpus manifest")->required();
  ent->add_option("--features", ent_features, "features CSV (default: computed from manifest)");
  ent->add_option("--dtw-out", ent_dtw_out, "per-sample DTW CSV");
  ent->add_option("-o,--out", ent_out, "per-speaker CSV (default stdout)");
  add_shared_options(ent, ent_opts);

  // validate
  SharedOptions val_opts;
  std::string val_manifest, val_features, val_out, val_ttest_out;
  auto* val = app.add_subcommand("validate", "partner vs non-partner distances");
  val->add_option("--manifest", val_manifest, "corpus manifest")->required();
  val->add_option("--features", val_features, "features CSV (default: computed from manifest)");
  val->add_option("-o,--out", val_out, "partner/other CSV (default stdout)");
  val->add_option("--ttest-out", val_ttest_out, "paired t-test CSV");
  add_shared_options(val, val_opts);

  // dyads
  std::string dy_manifest, dy_entrain, dy_out;
  auto* dy = app.add_subcommand("dyads", "inner-dyad distance");
  dy->add_option("--manifest", dy_manifest, "corpus manifest")->required();
  dy->add_option("--entrain", dy_entrain, "per-speaker entrainment CSV")->required();
  dy->add_option("-o,--out", dy_out, "dyads CSV (default stdout)");

  // stats
  SharedOptions st_opts;
  auto* st = app.add_subcommand("stats", "statistical tests on intermediate CSVs");
  st->require_subcommand(1);
  std::string tt_in, tt_out;
  auto* tt = st->add_subcommand("ttest", "paired t-test per feature, partner < other");
  tt->add_option("validate_csv", tt_in, "partner/other CSV")->required();
  tt->add_option("-o,--out", tt_out, "t-test CSV (default: printed table)");
  add_shared_options(tt, st_opts);
  std::string pr_in, pr_x, pr_y;
  auto* pr = st->add_subcommand("pearson", "Pearson r between two CSV columns");
  pr->add_option("csv", pr_in, "input CSV")->required();
  pr->add_option("--x", pr_x, "first column")->required();
  pr->add_option("--y", pr_y, "second column")->required();
  add_shared_options(pr, st_opts);
  std::string icc_in, icc_out;
  auto* icc = st->add_subcommand("icc", "inter-rater reliability per criterion");
  icc->add_option("scores", icc_in, "score CSV")->required();
  icc->add_option("-o,--out", icc_out, "ICC CSV (default: printed table)");
  add_shared_options(icc, st_opts);

  // grid (also reachable as `stats grid`)
  SharedOptions grid_opts;
  std::string grid_entrain, grid_scores, grid_out, grid_dyads, grid_manifest;
  auto setup_grid = [&](CLI::App* g) {
    g->add_option("--entrain", grid_entrain, "per-speaker entrainment CSV");
    g->add_option("--scores", grid_scores, "score CSV")->required();
    g->add_option("--dyads", grid_dyads, "dyads CSV: correlate dyad-level instead");
    g->add_option("--manifest", grid_manifest, "manifest (required with --dyads)");
    g->add_option("-o,--out", grid_out, "grid CSV (default stdout)");
    add_shared_options(g, grid_opts);
  };
  auto* grid = app.add_subcommand("grid", "feature x criterion correlation grid");
  setup_grid(grid);
  auto* st_grid = st->add_subcommand("grid", "feature x criterion correlation grid");
  setup_grid(st_grid);

  // synth
  SynthConfig syn;
  std::string syn_out;
  std::optional<double> syn_coupling;
  double syn_noise = 0.3;
  std::string syn_feature = "mean";
  auto* sy = app.add_subcommand("synth", "generate a synthetic imitation corpus");
  sy->add_option("--dyads", syn.n_dyads, "number of dyads")->capture_default_str();
  sy->add_option("--utts", syn.n_utterances, "turns per dyad")->capture_default_str();
  sy->add_option("--eps", syn.noise_eps, "imitation noise")->capture_default_str();
  sy->add_option("--seed", syn.seed, "random seed")->capture_default_str();
  sy->add_option("--out", syn_out, "output directory")->required();
  sy->add_option("--scores-coupling", syn_coupling, "also write scores.csv with this coupling");
  sy->add_option("--scores-noise", syn_noise, "rater noise sd")->capture_default_str();
  sy->add_option("--scores-feature", syn_feature, "feature whose e_raw drives the scores")
      ->capture_default_str();

  // run
  SharedOptions run_opts;
  std::string run_manifest, run_scores, run_out;
  auto* run = app.add_subcommand("run", "full pipeline, writing the CSV bundle and run.json");
  run->add_option("--manifest", run_manifest, "corpus manifest");
  run->add_option("--scores", run_scores, "score CSV");
  run->add_option("-o,--out", run_out, "output directory")->required();
  add_shared_options(run, run_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*pre) {
      const RunConfig cfg = build_config(pre_opts);
      F0Track track = cfg.options.from_wav ? estimate_f0(read_wav(pre_in), cfg.options.pitch)
                                            : load_f0_csv(pre_in);
      if (!(cfg.options.from_wav && pre_raw)) {
        std::optional<OutlierBounds> none;
        track = clean_track(track, cfg.options.smoothing, none).track;
        if (cfg.options.semitone_ref > 0.0) track = to_semitones(track, cfg.options.semitone_ref);
      }
      emit(pre_out, [&](std::ostream& o) { write_f0_csv(o, track); });

    } else if (*feat) {
      const RunConfig cfg = build_config(feat_opts);
      if (!feat_manifest.empty()) {
        CorpusManifest manifest;
        const Analysis a = analyze(feat_manifest, cfg, manifest);
        emit(feat_out, [&](std::ostream& o) { write_features_csv(o, a.utterances); });
      } else {
        if (feat_f0.empty() || feat_align.empty())
          throw ValidationError("features: give --manifest, or both --f0 and --align");
        auto role = parse_role(feat_role);
        if (!role) throw ValidationError("features: --role must be imit or model");
        const Alignment al = load_alignment(feat_align);
        UtteranceFeatures u = parameterize_utterance(load_f0_csv(feat_f0), al.words);
        u.speaker = feat_speaker;
        u.utterance_index = feat_utt;
        u.role = *role;
        std::vector<UtteranceFeatures> one{u};
        emit(feat_out, [&](std::ostream& o) { write_features_csv(o, one); });
      }

    } else if (*ent || *val) {
      const bool is_ent = ent->parsed();
      const RunConfig cfg = build_config(is_ent ? ent_opts : val_opts);
      const std::string& manifest_path = is_ent ? ent_manifest : val_manifest;
      const std::string& features_path = is_ent ? ent_features : val_features;
      CorpusManifest manifest;
      ContourStore store;
      if (features_path.empty()) {
        store = analyze(manifest_path, cfg, manifest).store;
      } else {
        manifest = load_manifest(manifest_path);
        auto in = open_input(features_path);
        store = read_features_csv(in, features_path);
      }
      const auto samples = partner_samples(manifest, store);
      if (is_ent) {
        if (!ent_dtw_out.empty())
          emit(ent_dtw_out, [&](std::ostream& o) { write_dtw_csv(o, samples); });
        const auto scores = entrainment_scores(manifest, samples, cfg.options.norm);
        emit(ent_out, [&](std::ostream& o) {
          write_entrain_csv(o, scores, cfg.options.norm.scale == NormScale::kSe);
        });
      } else {
        const auto rows =
            partner_other_table(manifest, store, samples, cfg.options.surrogate_pool);
        emit(val_out, [&](std::ostream& o) { write_validate_csv(o, rows); });
        const auto tests = partner_other_tests(rows, cfg.options.thresholds);
        if (!val_ttest_out.empty())
          emit(val_ttest_out, [&](std::ostream& o) { write_ttest_csv(o, tests); });
        if (!val_out.empty()) print_ttest_report(std::cout, tests);
      }

    } else if (*dy) {
      const CorpusManifest manifest = load_manifest(dy_manifest);
      const auto dyads = dyad_scores(manifest, load_entrain(dy_entrain));
      emit(dy_out, [&](std::ostream& o) { write_dyads_csv(o, dyads); });

    } else if (*tt) {
      const RunConfig cfg = build_config(st_opts);
      const auto tests = partner_other_tests(read_validate_csv(tt_in), cfg.options.thresholds);
      if (tt_out.empty()) print_ttest_report(std::cout, tests);
      else emit(tt_out, [&](std::ostream& o) { write_ttest_csv(o, tests); });

    } else if (*pr) {
      const RunConfig cfg = build_config(st_opts);
      const CsvTable t = CsvTable::load(pr_in);
      const std::size_t cx = t.column(pr_x), cy = t.column(pr_y);
      std::vector<double> x, y;
      for (std::size_t i = 0; i < t.rows().size(); ++i) {
        const std::string ctx = pr_in + " row " + std::to_string(i + 2);
        x.push_back(parse_double(t.rows()[i][cx], ctx));
        y.push_back(parse_double(t.rows()[i][cy], ctx));
      }
      const TestResult r = pearson(x, y, cfg.options.thresholds);
      std::cout << "r,p,n,significant,trend\n";
      write_csv_row(std::cout, {format_fixed(r.statistic), format_general(r.p_value),
                                std::to_string(x.size()), bool_field(r.significant),
                                bool_field(r.trend)});

    } else if (*icc) {
      const RunConfig cfg = build_config(st_opts);
      const auto rows =
          icc_table(load_scores(icc_in), cfg.options.thresholds.alpha, cfg.options.icc_model);
      if (icc_out.empty()) print_icc_report(std::cout, rows);
      else emit(icc_out, [&](std::ostream& o) { write_icc_csv(o, rows); });

    } else if (*grid || *st_grid) {
      const RunConfig cfg = build_config(grid_opts);
      const CriterionTable means = load_scores(grid_scores).speaker_means();
      std::vector<GridCell> cells;
      if (!grid_dyads.empty()) {
        if (grid_manifest.empty()) throw ValidationError("grid: --dyads needs --manifest");
        auto in = open_input(grid_dyads);
        const auto dyads = read_dyads_csv(in, grid_dyads);
        cells = correlate_grid(dyad_feature_table(dyads),
                               dyad_score_table(load_manifest(grid_manifest), means),
                               cfg.options.thresholds);
      } else {
        if (grid_entrain.empty()) throw ValidationError("grid: give --entrain or --dyads");
        cells = correlate_grid(
            speaker_feature_table(load_entrain(grid_entrain), cfg.options.grid_measure), means,
            cfg.options.thresholds);
      }
      emit(grid_out, [&](std::ostream& o) { report_heatmap_csv(o, cells); });

    } else if (*sy) {
      const SynthCorpus corpus = gen_corpus(syn);
      const auto manifest_path = write_corpus(corpus, syn_out);
      std::cout << manifest_path.string() << '\n';
      if (syn_coupling) {
        auto feature = parse_feature(syn_feature);
        if (!feature) throw ValidationError("synth: unknown --scores-feature '" + syn_feature + "'");
        MemoryCorpusReader reader(corpus);
        const Analysis a = analyze_corpus(corpus.manifest, reader, {}, env_threads());
        std::map<SpeakerId, double> driver;
        for (const auto& s : a.scores)
          if (s.feature == *feature) driver[s.speaker] = s.e_raw;
        const ScoreTable scores = gen_scores(driver, *syn_coupling, syn_noise, syn.seed);
        const auto scores_path = std::filesystem::path(syn_out) / "scores.csv";
        emit(scores_path.string(), [&](std::ostream& o) { write_scores(o, scores); });
        std::cout << scores_path.string() << '\n';
      }

    } else if (*run) {
      RunConfig cfg = build_config(run_opts);
      if (!run_manifest.empty()) cfg.manifest = run_manifest;
      if (!run_scores.empty()) cfg.scores = run_scores;
      cfg.out_dir = run_out;
      const RunSummary s = run_pipeline(cfg);
      const Analysis& a = s.analysis;
      std::cout << "renditions " << a.utterances.size() << ", dtw samples " << a.samples.size()
                << ", speakers " << a.scores.size() / kNumFeatures << '\n';
      if (a.dropped_alignment_words > 0)
        std::cerr << "warning: " << a.dropped_alignment_words
                  << " aligned words without timestamps were skipped\n";
      if (a.dropped_short_words > 0)
        std::cerr << "warning: " << a.dropped_short_words
                  << " words shorter than two F0 samples were skipped\n";
      if (a.outlier_skipped_tracks > 0)
        std::cerr << "warning: " << a.outlier_skipped_tracks
                  << " tracks too short for outlier removal\n";
      print_ttest_report(std::cout, a.tests);
      if (!s.icc.empty()) print_icc_report(std::cout, s.icc);
      std::cout << "checksum " << s.checksum << '\n';
      for (const auto& f : s.files) std::cout << (std::filesystem::path(run_out) / f).string() << '\n';
    }
  } catch (const IoError& e) {
    std::cerr << "f0entrain: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "f0entrain: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "f0entrain: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
