// tests/pipeline_test.cc

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

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "f0entrain/csv.h"
#include "f0entrain/pipeline.h"
#include "oracles.h"

using namespace f0entrain;
using ::testing::HasSubstr;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Shell {
  int code = 0;
  std::string output;
};

Shell sh(const std::string& args) {
  const std::string cmd = std::string(F0ENTRAIN_CLI) + " " + args + " 2>&1";
  Shell r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return {-1, "popen failed"};
  std::array<char, 4096> buf;
  while (auto n = fread(buf.data(), 1, buf.size(), p)) r.output.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path make_corpus(const std::filesystem::path& dir, int dyads = 4,
                                  int utts = 12, std::uint64_t seed = 2) {
  SynthConfig cfg;
  cfg.n_dyads = dyads;
  cfg.n_utterances = utts;
  cfg.seed = seed;
  const auto corpus = gen_corpus(cfg);
  const auto path = write_corpus(corpus, dir);
  MemoryCorpusReader reader(corpus);
  const auto a = analyze_corpus(corpus.manifest, reader, {});
  std::map<SpeakerId, double> driver;
  for (const auto& s : a.scores)
    if (s.feature == Feature::kMean) driver[s.speaker] = s.e_raw;
  std::ofstream out(dir / "scores.csv");
  write_scores(out, gen_scores(driver, 0.5, 0.3, seed));
  return path;
}

}  // namespace

TEST(RunConfig, KeyValueAndOverrides) {
  RunConfig c;
  c.apply_text("# comment\nnorm = se\nsmooth_window=9\n\nsurrogate_pool = all\n", "cfg");
  EXPECT_EQ(c.options.norm.scale, NormScale::kSe);
  EXPECT_EQ(c.options.smoothing.window, 9);
  EXPECT_EQ(c.options.surrogate_pool, SurrogatePool::kAll);
  c.set("norm", "sd");
  EXPECT_EQ(c.options.norm.scale, NormScale::kSd);
  EXPECT_THROW(c.set("bogus", "1"), ValidationError);
  EXPECT_THROW(c.set("norm", "mad"), ValidationError);
  EXPECT_THROW(c.set("quantile", "type6"), ValidationError);
  EXPECT_THROW(c.apply_text("no equals sign\n", "cfg"), ParseError);
}

TEST(RunConfig, MapRoundTrip) {
  RunConfig c;
  c.set("alpha", "0.01");
  c.set("semitone_ref", "100");
  c.set("outlier_scope", "speaker");
  c.set("icc_model", "agreement");
  c.set("grid_measure", "raw");
  c.set("norm_pool", "speaker");
  RunConfig d;
  for (const auto& [k, v] : c.to_map()) d.set(k, v);
  EXPECT_EQ(d.to_map(), c.to_map());
  EXPECT_EQ(c.to_map().count("threads"), 0u);
  EXPECT_EQ(c.to_map().count("out"), 0u);
}

TEST(ParallelFor, FirstErrorByIndexWins) {
  for (int threads : {1, 4}) {
    try {
      parallel_for(50, threads, [](std::size_t i) {
        if (i == 7 || i == 30) throw ValidationError("at " + std::to_string(i));
      });
      FAIL();
    } catch (const ValidationError& e) {
      EXPECT_STREQ(e.what(), "at 7");
    }
  }
}

TEST(Pipeline, BundleContents) {
  oracle::TempDir dir("bundle");
  RunConfig cfg;
  cfg.manifest = make_corpus(dir.path() / "corpus").string();
  cfg.scores = (dir.path() / "corpus" / "scores.csv").string();
  cfg.out_dir = (dir.path() / "out").string();
  const auto s = run_pipeline(cfg);
  for (const char* f : {"features.csv", "dtw.csv", "entrain.csv", "validate.csv", "ttest.csv",
                        "dyads.csv", "grid.csv", "dyad_grid.csv", "icc.csv", "run.json"})
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "out" / f)) << f;
  const auto grid = CsvTable::load((dir.path() / "out" / "grid.csv").string());
  EXPECT_EQ(grid.header(), (std::vector<std::string>{"feature", "criterion", "r", "p", "n",
                                                     "significant", "trend"}));
  EXPECT_EQ(grid.rows().size(), 25u);
  const auto feat = CsvTable::load((dir.path() / "out" / "features.csv").string());
  EXPECT_EQ(feat.header()[0], "speaker");
  EXPECT_EQ(feat.header()[10], "drop");
  EXPECT_EQ(s.icc.size(), 5u);
  EXPECT_THAT(slurp(dir.path() / "out" / "run.json"), HasSubstr(s.checksum));
}

TEST(Pipeline, NoScoresGivesHeaderOnlyGrid) {
  oracle::TempDir dir("noscores");
  RunConfig cfg;
  cfg.manifest = make_corpus(dir.path() / "corpus", 2, 4).string();
  cfg.out_dir = (dir.path() / "out").string();
  run_pipeline(cfg);
  EXPECT_EQ(slurp(dir.path() / "out" / "grid.csv"), "feature,criterion,r,p,n,significant,trend\n");
}

TEST(Pipeline, RunJsonRoundTripsAndThreadsAgree) {
  oracle::TempDir dir("roundtrip");
  RunConfig cfg;
  cfg.manifest = make_corpus(dir.path() / "corpus").string();
  cfg.scores = (dir.path() / "corpus" / "scores.csv").string();
  cfg.out_dir = (dir.path() / "a").string();
  cfg.set("norm", "se");
  cfg.set("outlier_scope", "speaker");
  run_pipeline(cfg);

  RunConfig again;
  again.load(dir.path() / "a" / "run.json");
  again.out_dir = (dir.path() / "b").string();
  again.threads = 3;
  run_pipeline(again);
  for (const auto& e : std::filesystem::directory_iterator(dir.path() / "a"))
    EXPECT_EQ(slurp(e.path()), slurp(dir.path() / "b" / e.path().filename())) << e.path();
}

TEST(Pipeline, ChecksumTracksContent) {
  oracle::TempDir dir("checksum");
  const auto manifest_path = make_corpus(dir.path(), 2, 4);
  const auto m = load_manifest(manifest_path);
  const auto before = corpus_checksum(manifest_path, m, "");
  EXPECT_EQ(before, corpus_checksum(manifest_path, m, ""));
  {
    std::ofstream out(dir.path() / m.utterances[0].model_f0, std::ios::app);
    out << "\n";
  }
  EXPECT_NE(before, corpus_checksum(manifest_path, m, ""));
}

TEST(Pipeline, MissingF0IsIoErrorWithPath) {
  oracle::TempDir dir("missing");
  const auto manifest_path = make_corpus(dir.path(), 2, 4);
  const auto m = load_manifest(manifest_path);
  std::filesystem::remove(dir.path() / m.utterances[1].imitator_f0);
  RunConfig cfg;
  cfg.manifest = manifest_path.string();
  cfg.out_dir = (dir.path() / "out").string();
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_THAT(e.what(), HasSubstr(m.utterances[1].imitator_f0));
  }
}

TEST(Cli, RunExitCodes) {
  oracle::TempDir dir("cli");
  const auto manifest = make_corpus(dir.path() / "corpus", 2, 4);
  const auto out = dir.path() / "out";
  auto ok = sh("run --manifest " + manifest.string() + " --out " + out.string());
  EXPECT_EQ(ok.code, 0) << ok.output;
  EXPECT_TRUE(std::filesystem::exists(out / "run.json"));

  const auto m = load_manifest(manifest);
  std::filesystem::remove(dir.path() / "corpus" / m.utterances[0].model_f0);
  auto missing = sh("run --manifest " + manifest.string() + " --out " + out.string());
  EXPECT_EQ(missing.code, 2);
  EXPECT_THAT(missing.output, HasSubstr(m.utterances[0].model_f0));

  auto bad = sh("run --manifest " + manifest.string() + " --out " + out.string() + " --norm mad");
  EXPECT_EQ(bad.code, 1);
  EXPECT_THAT(bad.output, HasSubstr("norm"));
}

TEST(Cli, ValidationErrorExitsOne) {
  oracle::TempDir dir("cli_invalid");
  std::ofstream(dir.path() / "manifest.json")
      << R"({"speakers":[{"id":"A"}],"dyads":[["A","A"]],"utterances":[]})";
  auto r = sh("run --manifest " + (dir.path() / "manifest.json").string() + " --out " +
              (dir.path() / "out").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_THAT(r.output, HasSubstr("self-dyad"));
}

namespace {

// Cells must agree as text, or as numbers up to the 6-decimal CSV precision.
void expect_csv_close(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::ifstream fa(a), fb(b);
  const auto ta = CsvTable::parse(fa, a.string()), tb = CsvTable::parse(fb, b.string());
  ASSERT_EQ(ta.header(), tb.header()) << a;
  ASSERT_EQ(ta.rows().size(), tb.rows().size()) << a;
  for (std::size_t r = 0; r < ta.rows().size(); ++r)
    for (std::size_t c = 0; c < ta.header().size(); ++c) {
      const std::string& x = ta.rows()[r][c];
      const std::string& y = tb.rows()[r][c];
      if (x == y) continue;
      const double dx = parse_double(x, "x"), dy = parse_double(y, "y");
      EXPECT_NEAR(dx, dy, 1e-5 + 1e-5 * std::abs(dy)) << a << " row " << r << " col " << c;
    }
}

}  // namespace

TEST(Cli, StagedSubcommandsMatchRun) {
  oracle::TempDir dir("cli_staged");
  const auto manifest = make_corpus(dir.path() / "corpus", 4, 8).string();
  const auto scores = (dir.path() / "corpus" / "scores.csv").string();
  const auto p = [&](const std::string& f) { return (dir.path() / f).string(); };
  ASSERT_EQ(sh("run --manifest " + manifest + " --scores " + scores + " --out " + p("run")).code, 0);
  ASSERT_EQ(sh("features --manifest " + manifest + " -o " + p("features.csv")).code, 0);
  ASSERT_EQ(sh("stats icc " + scores + " -o " + p("icc.csv")).code, 0);

  // Chain "m" recomputes features from the manifest; chain "f" reads them
  // back from features.csv.
  for (const std::string tag : {"m", "f"}) {
    const std::string feats = tag == "f" ? " --features " + p("features.csv") : "";
    ASSERT_EQ(sh("entrain --manifest " + manifest + feats + " --dtw-out " + p(tag + "_dtw.csv") +
                 " -o " + p(tag + "_entrain.csv"))
                  .code,
              0);
    ASSERT_EQ(sh("validate --manifest " + manifest + feats + " -o " + p(tag + "_validate.csv") +
                 " --ttest-out " + p(tag + "_ttest.csv"))
                  .code,
              0);
    ASSERT_EQ(sh("dyads --manifest " + manifest + " --entrain " + p(tag + "_entrain.csv") + " -o " +
                 p(tag + "_dyads.csv"))
                  .code,
              0);
    ASSERT_EQ(sh("grid --entrain " + p(tag + "_entrain.csv") + " --scores " + scores + " -o " +
                 p(tag + "_grid.csv"))
                  .code,
              0);
    ASSERT_EQ(sh("stats grid --dyads " + p(tag + "_dyads.csv") + " --manifest " + manifest +
                 " --scores " + scores + " -o " + p(tag + "_dyad_grid.csv"))
                  .code,
              0);
  }
  for (const char* f : {"features.csv", "icc.csv", "m_dtw.csv", "m_entrain.csv", "m_validate.csv",
                        "m_ttest.csv"}) {
    const std::string name = f[1] == '_' ? std::string(f + 2) : std::string(f);
    EXPECT_EQ(slurp(dir.path() / f), slurp(dir.path() / "run" / name)) << f;
  }
  for (const char* f :
       {"dtw.csv", "entrain.csv", "validate.csv", "ttest.csv", "dyads.csv", "grid.csv",
        "dyad_grid.csv"}) {
    expect_csv_close(dir.path() / ("m_" + std::string(f)), dir.path() / "run" / f);
    expect_csv_close(dir.path() / ("f_" + std::string(f)), dir.path() / "run" / f);
  }

  const auto tt = sh("stats ttest " + p("m_validate.csv"));
  EXPECT_EQ(tt.code, 0);
  EXPECT_THAT(tt.output, HasSubstr("Median"));
  const auto pr = sh("stats pearson " + p("m_validate.csv") + " --x partner_distance --y other_distance");
  EXPECT_EQ(pr.code, 0) << pr.output;
  EXPECT_THAT(pr.output, HasSubstr("r,p,n,significant,trend"));
}

TEST(Cli, PreprocessAndSynth) {
  oracle::TempDir dir("cli_pre");
  auto s = sh("synth --dyads 2 --utts 3 --eps 0.5 --seed 4 --out " + (dir.path() / "c").string() +
              " --scores-coupling 0.5");
  ASSERT_EQ(s.code, 0) << s.output;
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "c" / "scores.csv"));
  const auto m = load_manifest(dir.path() / "c" / "manifest.json");
  const auto raw = (dir.path() / "c" / m.utterances[0].model_f0).string();
  const auto out = (dir.path() / "clean.csv").string();
  ASSERT_EQ(sh("preprocess " + raw + " -o " + out).code, 0);
  const auto clean = load_f0_csv(out);
  const auto expect = clean_track(load_f0_csv(raw)).track;
  ASSERT_EQ(clean.size(), expect.size());
  for (std::size_t i = 0; i < clean.size(); ++i)
    EXPECT_NEAR(clean.samples[i].value, expect.samples[i].value, 5e-7);
}

TEST(Cli, FromWav) {
  oracle::TempDir dir("cli_wav");
  Wave w;
  for (int i = 0; i < 8000; ++i) w.samples.push_back(0.4 * std::sin(2 * 3.14159265358979 * 150.0 * i / 16000.0));
  write_wav(dir.path() / "a.wav", w);
  auto r = sh("preprocess --from-wav --raw " + (dir.path() / "a.wav").string() + " -o " +
              (dir.path() / "a.csv").string());
  ASSERT_EQ(r.code, 0) << r.output;
  const auto t = load_f0_csv(dir.path() / "a.csv");
  EXPECT_GT(t.voiced_count(), 40u);
}

TEST(Cli, UsageErrorAndVersion) {
  EXPECT_EQ(sh("").code, 1);
  EXPECT_EQ(sh("frobnicate").code, 1);
  const auto v = sh("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_THAT(v.output, HasSubstr(version()));
}
