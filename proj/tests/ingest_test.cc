// tests/ingest_test.cc

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

#include <fstream>
#include <random>
#include <sstream>

#include "f0entrain/csv.h"
#include "f0entrain/ingest.h"
#include "oracles.h"

using namespace f0entrain;
using ::testing::HasSubstr;

namespace {

std::string two_speaker_manifest(const std::string& dyad = R"(["A","B"])") {
  return R"({"speakers":[{"id":"A","sex":"F","l1":"fr"},{"id":"B","sex":"F","l1":"fr"}],
    "dyads":[)" + dyad + R"(],
    "utterances":[
      {"index":0,"imitator":"A","model":"B","imitator_f0":"f0/A_0.csv","model_f0":"f0/B_0.csv",
       "imitator_align":"al/A_0.json","model_align":"al/B_0.json"},
      {"index":1,"imitator":"B","model":"A","imitator_f0":"f0/B_1.csv","model_f0":"f0/A_1.csv",
       "imitator_align":"al/B_1.json","model_align":"al/A_1.json"}]})";
}

template <typename E>
std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  }
  return "<no error>";
}

F0Track parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_f0_csv(in, "test.csv");
}

}  // namespace

TEST(Manifest, SmallestLegalCorpus) {
  const auto m = parse_manifest(two_speaker_manifest(), "/data");
  EXPECT_EQ(m.speakers.size(), 2u);
  EXPECT_EQ(m.dyads.size(), 1u);
  EXPECT_EQ(m.utterances.size(), 2u);
  EXPECT_EQ(m.partner_of("A"), "B");
  EXPECT_EQ(m.resolve("f0/A_0.csv"), "/data/f0/A_0.csv");
}

TEST(Manifest, SelfDyadIsRejected) {
  const auto msg = error_of<ValidationError>(
      [] { parse_manifest(two_speaker_manifest(R"(["A","A"])"), "."); });
  EXPECT_THAT(msg, HasSubstr("self-dyad"));
}

TEST(Manifest, DanglingSpeakerNamesRecord) {
  std::string text = two_speaker_manifest();
  text.replace(text.find(R"("imitator":"A")"), 14, R"("imitator":"Z")");
  const auto msg = error_of<ValidationError>([&] { parse_manifest(text, "."); });
  EXPECT_THAT(msg, HasSubstr("Z"));
}

TEST(Manifest, MalformedJsonIsParseError) {
  EXPECT_THROW(parse_manifest("{\"speakers\": [", "."), ParseError);
}

TEST(Manifest, NonPartnerRecordRejected) {
  const std::string text = R"({"speakers":[{"id":"A"},{"id":"B"},{"id":"C"},{"id":"D"}],
    "dyads":[["A","B"],["C","D"]],
    "utterances":[{"index":0,"imitator":"A","model":"C","imitator_f0":"a","model_f0":"c",
      "imitator_align":"a","model_align":"c"}]})";
  EXPECT_THROW(parse_manifest(text, "."), ValidationError);
}

TEST(Manifest, DuplicateIndexPerPairRejected) {
  std::string text = two_speaker_manifest();
  text.replace(text.find(R"("index":1,"imitator":"B","model":"A")"), 36,
               R"("index":0,"imitator":"A","model":"B")");
  EXPECT_THROW(parse_manifest(text, "."), ValidationError);
}

TEST(Manifest, SpeakerInTwoDyadsRejected) {
  const std::string text = R"({"speakers":[{"id":"A"},{"id":"B"},{"id":"C"}],
    "dyads":[["A","B"],["A","C"]], "utterances":[]})";
  EXPECT_THROW(parse_manifest(text, "."), ValidationError);
}

TEST(Manifest, FullSizeCorpusLoads) {
  CorpusManifest m;
  for (int d = 0; d < 29; ++d) {
    const std::string a = "S" + std::to_string(2 * d), b = "S" + std::to_string(2 * d + 1);
    m.speakers.push_back({a, "F", "it"});
    m.speakers.push_back({b, "F", "it"});
    m.dyads.push_back({a, b});
    for (int k = 0; k < 40; ++k) {
      m.utterances.push_back({k, a, b, "x", "y", "x", "y"});
      m.utterances.push_back({k, b, a, "x", "y", "x", "y"});
    }
  }
  const auto back = parse_manifest(manifest_to_json(m), ".");
  EXPECT_EQ(back.speakers.size(), 58u);
  EXPECT_EQ(back.dyads.size(), 29u);
  EXPECT_EQ(back.utterances.size(), 2320u);
}

TEST(Manifest, RoundTrip) {
  const auto m = parse_manifest(two_speaker_manifest(), ".");
  const auto back = parse_manifest(manifest_to_json(m), ".");
  EXPECT_EQ(m, back);
  EXPECT_EQ(manifest_to_json(back), manifest_to_json(m));
}

TEST(Manifest, LoadMissingFileIsIoError) {
  EXPECT_THROW(load_manifest("/nonexistent/manifest.json"), IoError);
}

TEST(Alignment, TwoWords) {
  const auto a = parse_alignment(
      R"({"segments":[{"words":[{"word":"the","start":0.10,"end":0.22},
                                {"word":"north","start":0.22,"end":0.58}]}]})",
      "t");
  ASSERT_EQ(a.words.size(), 2u);
  EXPECT_EQ(a.words[0].text, "the");
  EXPECT_DOUBLE_EQ(a.words[1].start, 0.22);
  EXPECT_DOUBLE_EQ(a.words[1].end, 0.58);
  EXPECT_EQ(a.dropped, 0);
}

TEST(Alignment, MissingEndIsDroppedAndCounted) {
  const auto a = parse_alignment(
      R"({"segments":[{"words":[{"word":"the","start":0.10,"end":0.22},
                                {"word":"north","start":0.22}]}]})",
      "t");
  EXPECT_EQ(a.words.size(), 1u);
  EXPECT_EQ(a.dropped, 1);
}

TEST(Alignment, OverlapIsValidationError) {
  const auto msg = error_of<ValidationError>([] {
    parse_alignment(R"({"segments":[{"words":[{"word":"a","start":0.1,"end":0.5},
                                             {"word":"b","start":0.4,"end":0.9}]}]})",
                    "t");
  });
  EXPECT_THAT(msg, HasSubstr("overlap"));
}

TEST(Alignment, NoTimedWordsIsEmptyUtterance) {
  const auto msg = error_of<ValidationError>([] {
    parse_alignment(R"({"segments":[{"words":[{"word":"a"}]}]})", "t");
  });
  EXPECT_THAT(msg, HasSubstr("empty utterance"));
}

TEST(Alignment, SortedAcrossSegments) {
  const auto a = parse_alignment(
      R"({"segments":[{"words":[{"word":"b","start":0.5,"end":0.6}]},
                      {"words":[{"word":"a","start":0.1,"end":0.2}]}]})",
      "t");
  ASSERT_EQ(a.words.size(), 2u);
  EXPECT_EQ(a.words[0].text, "a");
}

TEST(Alignment, MalformedIsParseError) {
  EXPECT_THROW(parse_alignment("not json", "t"), ParseError);
}

TEST(F0Csv, ThreeRows) {
  const auto t = parse_csv("time_s,f0_hz\n0.00,200\n0.01,210\n0.02,0\n");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_DOUBLE_EQ(t.step, 0.01);
  EXPECT_TRUE(t.samples[0].voiced);
  EXPECT_DOUBLE_EQ(t.samples[1].value, 210.0);
  EXPECT_FALSE(t.samples[2].voiced);
}

TEST(F0Csv, EmptyFieldIsUnvoiced) {
  const auto t = parse_csv("time_s,f0_hz\n0.00,\n0.01,210\n");
  EXPECT_FALSE(t.samples[0].voiced);
  EXPECT_TRUE(t.samples[1].voiced);
}

TEST(F0Csv, NonUniformStep) {
  const auto msg =
      error_of<ValidationError>([] { parse_csv("time_s,f0_hz\n0.00,200\n0.01,210\n0.025,0\n"); });
  EXPECT_THAT(msg, HasSubstr("non-uniform step"));
}

TEST(F0Csv, NegativeF0) {
  EXPECT_THROW(parse_csv("time_s,f0_hz\n0.00,-5\n0.01,210\n"), ValidationError);
}

TEST(F0Csv, EmptyFile) {
  EXPECT_THROW(parse_csv(""), Error);
  EXPECT_THROW(parse_csv("time_s,f0_hz\n"), Error);
}

TEST(F0Csv, FiveHundredRowsIsFiveSeconds) {
  std::ostringstream s;
  s << "time_s,f0_hz\n";
  for (int i = 0; i < 500; ++i) s << format_fixed(i * 0.01) << ",150\n";
  const auto t = parse_csv(s.str());
  EXPECT_EQ(t.size(), 500u);
  EXPECT_NEAR(t.duration(), 5.0, 1e-12);
}

TEST(F0Csv, RoundTripIsExactAtSixDecimals) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> f(60.0, 400.0);
  std::bernoulli_distribution voiced(0.8);
  for (int trial = 0; trial < 50; ++trial) {
    F0Track t;
    t.start_time = std::round(f(rng)) / 1000.0;
    t.step = 0.01;
    for (int i = 0; i < 100; ++i) {
      const bool v = voiced(rng);
      t.samples.push_back({v ? std::round(f(rng) * 1e6) / 1e6 : 0.0, v});
    }
    std::ostringstream out;
    write_f0_csv(out, t);
    std::istringstream in(out.str());
    const auto back = parse_f0_csv(in, "rt");
    ASSERT_EQ(back.size(), t.size());
    EXPECT_DOUBLE_EQ(back.start_time, t.start_time);
    EXPECT_DOUBLE_EQ(back.step, t.step);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(back.samples[i], t.samples[i]);
  }
}

TEST(SliceTrack, HalfOpenTenSamples) {
  const auto t = F0Track::from_values(std::vector<double>(100, 150.0), 0.0, 0.01);
  const auto s = slice_track(t, {"w", 0.40, 0.50});
  ASSERT_EQ(s.size(), 10u);
  EXPECT_NEAR(s.start_time, 0.40, 1e-12);
  EXPECT_NEAR(s.time_at(9), 0.49, 1e-12);
  EXPECT_DOUBLE_EQ(s.step, 0.01);
}

TEST(SliceTrack, ShortWordIsEmptySlice) {
  const auto t = F0Track::from_values(std::vector<double>(100, 150.0), 0.0, 0.01);
  const auto msg = error_of<NumericError>([&] { slice_track(t, {"w", 0.995, 0.999}); });
  EXPECT_THAT(msg, HasSubstr("empty slice"));
}

TEST(SliceTrack, WholeTrackIsIdentity) {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(100.0 + i);
  const auto t = F0Track::from_values(v, 0.0, 0.01);
  EXPECT_EQ(slice_track(t, {"w", 0.0, 1.0}), t);
}

TEST(SliceTrack, ConsecutiveSpansPartitionSamples) {
  std::mt19937_64 rng(11);
  std::vector<double> v;
  for (int i = 0; i < 300; ++i) v.push_back(100.0 + i);
  const auto t = F0Track::from_values(v, 0.05, 0.01);
  std::uniform_real_distribution<double> len(0.02, 0.3);
  for (int trial = 0; trial < 100; ++trial) {
    double x = 0.05;
    std::vector<double> seen;
    while (true) {
      const double end = x + len(rng);
      if (end > 3.0) break;
      try {
        for (double s : slice_track(t, {"w", x, end}).values()) seen.push_back(s);
      } catch (const NumericError&) {
      }
      x = end;
    }
    // Values are distinct, so disjointness means no repeats.
    auto sorted = seen;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
    for (double s : seen) EXPECT_NE(std::find(v.begin(), v.end(), s), v.end());
  }
}

TEST(Scores, FinalIsMeanOfCriteria) {
  std::istringstream in("speaker,rater,pronunciation,intonation,fluency,overall\nS1,R1,4,3,5,4\n");
  const auto t = parse_scores(in, "s");
  ASSERT_EQ(t.rows().size(), 1u);
  EXPECT_DOUBLE_EQ(t.rows()[0][Criterion::kFinal], 4.0);
}

TEST(Scores, OutOfRange) {
  std::istringstream in("speaker,rater,pronunciation,intonation,fluency,overall\nS1,R1,6,3,5,4\n");
  const auto msg = error_of<ValidationError>([&] { parse_scores(in, "s"); });
  EXPECT_THAT(msg, HasSubstr("out of range"));
}

TEST(Scores, DuplicateRow) {
  std::istringstream in(
      "speaker,rater,pronunciation,intonation,fluency,overall\nS1,R1,4,3,5,4\nS1,R1,4,3,5,4\n");
  EXPECT_THROW(parse_scores(in, "s"), ValidationError);
}

TEST(Scores, InconsistentFinalColumn) {
  std::istringstream in(
      "speaker,rater,pronunciation,intonation,fluency,overall,final\nS1,R1,4,3,5,4,3.5\n");
  EXPECT_THROW(parse_scores(in, "s"), ValidationError);
}

TEST(Scores, FiftyEightBySix) {
  std::ostringstream s;
  s << "speaker,rater,pronunciation,intonation,fluency,overall\n";
  for (int i = 0; i < 58; ++i)
    for (int r = 0; r < 6; ++r)
      s << "S" << i << ",R" << r << "," << 1 + (i + r) % 5 << ",3,3," << 1 + i % 5 << "\n";
  std::istringstream in(s.str());
  const auto t = parse_scores(in, "s");
  EXPECT_EQ(t.rows().size(), 348u);
  const auto means = t.speaker_means();
  EXPECT_EQ(means.size(), 58u);
  EXPECT_EQ(t.rating_matrix(Criterion::kFinal).size(), 58u);
  EXPECT_EQ(t.rating_matrix(Criterion::kFinal)[0].size(), 6u);
  // speaker S0: pronunciation 1,2,3,4,5,1 -> mean 16/6
  EXPECT_NEAR(means.at("S0")[0], 16.0 / 6.0, 1e-12);
}

TEST(Scores, RoundTrip) {
  std::istringstream in(
      "speaker,rater,pronunciation,intonation,fluency,overall\nS1,R1,4,3,5,4\nS2,R1,2.5,3,1,4\n");
  const auto t = parse_scores(in, "s");
  std::ostringstream out;
  write_scores(out, t);
  std::istringstream in2(out.str());
  const auto back = parse_scores(in2, "s2");
  ASSERT_EQ(back.rows().size(), 2u);
  EXPECT_EQ(back.rows()[1].scores, t.rows()[1].scores);
}

TEST(Csv, QuotedFieldsAndFormatting) {
  const auto f = split_csv_line(R"(a,"b,c","d""e")");
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[1], "b,c");
  EXPECT_EQ(f[2], "d\"e");
  EXPECT_EQ(format_fixed(-0.0000001), "0.000000");
  EXPECT_EQ(format_fixed(1.5), "1.500000");
  EXPECT_EQ(format_general(0.0219), "0.0219");
  EXPECT_EQ(csv_escape("x,y"), "\"x,y\"");
}
