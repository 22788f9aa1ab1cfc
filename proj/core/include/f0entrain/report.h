// core/include/f0entrain/report.h

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

#ifndef F0ENTRAIN_REPORT_H_
#define F0ENTRAIN_REPORT_H_

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "f0entrain/entrain.h"
#include "f0entrain/features.h"
#include "f0entrain/stats.h"

namespace f0entrain {

// CSV schemas shared by the `run` bundle and the standalone subcommands.
// Reals are printed with 6 decimals; p-values with 6 significant digits.

// speaker,utterance,word_index,word,start_s,end_s,mean,median,slope,range,drop,role
void write_features_csv(std::ostream& out, std::span<const UtteranceFeatures> utts);
// Rebuilds the per-rendition contours from a features CSV.
ContourStore read_features_csv(std::istream& in, std::string_view source);

// imitator,model,utterance,feature,dtw
void write_dtw_csv(std::ostream& out, std::span<const DtwSample> samples);
std::vector<DtwSample> read_dtw_csv(std::istream& in, std::string_view source);

// speaker,feature,e_raw,e_opt,n_used[,e_opt_se]
void write_entrain_csv(std::ostream& out, std::span<const EntrainmentScore> scores,
                       bool with_se);
std::vector<EntrainmentScore> read_entrain_csv(std::istream& in, std::string_view source);

// speaker,feature,partner_distance,other_distance,n_surrogates
void write_validate_csv(std::ostream& out, std::span<const PartnerOtherRow> rows);

struct FeatureTest {
  Feature feature = Feature::kMean;
  TestResult result;
  std::size_t n = 0;
};

// Partner vs other distance, paired over speakers, one-sided (partner <
// other).  Speakers without a surrogate are left out.
std::vector<FeatureTest> partner_other_tests(std::span<const PartnerOtherRow> rows,
                                             const Thresholds& th);

// feature,t,df,p_value,significant,trend,n
void write_ttest_csv(std::ostream& out, std::span<const FeatureTest> tests);
// Human-readable table: Feature, t, df, p-value, Sig.
void print_ttest_report(std::ostream& out, std::span<const FeatureTest> tests);

// speaker_a,speaker_b,feature,inner_dyad
void write_dyads_csv(std::ostream& out, std::span<const DyadScore> dyads);
std::vector<DyadScore> read_dyads_csv(std::istream& in, std::string_view source);

// feature,criterion,r,p,n,significant,trend
void report_heatmap_csv(std::ostream& out, std::span<const GridCell> grid);

struct IccRow {
  Criterion criterion = Criterion::kFinal;
  IccResult result;
};

// criterion,icc,f,df1,df2,p_value,ci_low,ci_high
void write_icc_csv(std::ostream& out, std::span<const IccRow> rows);
// Indicator, ICC, p-value ("<0.001" floor), CI95%.
void print_icc_report(std::ostream& out, std::span<const IccRow> rows);

std::string bool_field(bool b);

}  // namespace f0entrain

#endif  // F0ENTRAIN_REPORT_H_
