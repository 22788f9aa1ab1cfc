// core/src/report.cc

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

#include "f0entrain/report.h"

#include <cctype>
#include <iomanip>
#include <limits>
#include <map>

#include "f0entrain/csv.h"

namespace f0entrain {

std::string bool_field(bool b) { return b ? "true" : "false"; }

namespace {

Feature feature_field(const std::string& s, const std::string& ctx) {
  auto f = parse_feature(s);
  if (!f) throw ParseError(ctx + ": unknown feature '" + s + "'");
  return *f;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_fixed(*v) : std::string("nan");
}

}  // namespace

void write_features_csv(std::ostream& out, std::span<const UtteranceFeatures> utts) {
  out << "speaker,utterance,word_index,word,start_s,end_s,mean,median,slope,range,drop,role\n";
  for (const auto& u : utts) {
    for (const auto& w : u.words) {
      write_csv_row(out, {u.speaker, std::to_string(u.utterance_index),
                          std::to_string(w.word_index), w.span.text,
                          format_fixed(w.span.start), format_fixed(w.span.end),
                          format_fixed(w.features.mean), format_fixed(w.features.median),
                          format_fixed(w.features.slope), format_fixed(w.features.range),
                          format_fixed(w.features.drop), std::string(role_name(u.role))});
    }
  }
}

ContourStore read_features_csv(std::istream& in, std::string_view source) {
  const CsvTable t = CsvTable::parse(in, source);
  const std::size_t cs = t.column("speaker"), cu = t.column("utterance"),
                    cw = t.column("word_index"), cr = t.column("role");
  std::array<std::size_t, kNumFeatures> cf{};
  for (Feature f : kAllFeatures) cf[static_cast<std::size_t>(f)] = t.column(feature_name(f));

  std::map<RenditionKey, std::map<long, WordFeatures>> grouped;
  for (std::size_t i = 0; i < t.rows().size(); ++i) {
    const auto& row = t.rows()[i];
    const std::string ctx = t.source() + " row " + std::to_string(i + 2);
    auto role = parse_role(row[cr]);
    if (!role) throw ParseError(ctx + ": unknown role '" + row[cr] + "'");
    RenditionKey key{row[cs], static_cast<int>(parse_int(row[cu], ctx)), *role};
    WordFeatures wf;
    wf.mean = parse_double(row[cf[0]], ctx);
    wf.median = parse_double(row[cf[1]], ctx);
    wf.slope = parse_double(row[cf[2]], ctx);
    wf.range = parse_double(row[cf[3]], ctx);
    wf.drop = parse_double(row[cf[4]], ctx);
    if (!grouped[key].emplace(parse_int(row[cw], ctx), wf).second)
      throw ValidationError(ctx + ": duplicate word index");
  }
  ContourStore store;
  for (const auto& [key, words] : grouped) {
    ContourSet set;
    for (Feature f : kAllFeatures) {
      auto& c = set[static_cast<std::size_t>(f)];
      c.feature = f;
      for (const auto& [_, wf] : words) c.values.push_back(wf[f]);
    }
    store.insert(key, std::move(set));
  }
  return store;
}

void write_dtw_csv(std::ostream& out, std::span<const DtwSample> samples) {
  out << "imitator,model,utterance,feature,dtw\n";
  for (const auto& s : samples)
    write_csv_row(out, {s.imitator, s.model, std::to_string(s.utterance_index),
                        std::string(feature_name(s.feature)), format_fixed(s.distance)});
}

std::vector<DtwSample> read_dtw_csv(std::istream& in, std::string_view source) {
  const CsvTable t = CsvTable::parse(in, source);
  const std::size_t ci = t.column("imitator"), cm = t.column("model"),
                    cu = t.column("utterance"), cf = t.column("feature"),
                    cd = t.column("dtw");
  std::vector<DtwSample> out;
  for (std::size_t i = 0; i < t.rows().size(); ++i) {
    const auto& row = t.rows()[i];
    const std::string ctx = t.source() + " row " + std::to_string(i + 2);
    out.push_back({row[ci], row[cm], static_cast<int>(parse_int(row[cu], ctx)),
                   feature_field(row[cf], ctx), parse_double(row[cd], ctx)});
  }
  return out;
}

void write_entrain_csv(std::ostream& out, std::span<const EntrainmentScore> scores,
                       bool with_se) {
  out << "speaker,feature,e_raw,e_opt,n_used" << (with_se ? ",e_opt_se" : "") << '\n';
  for (const auto& s : scores) {
    std::vector<std::string> row{s.speaker, std::string(feature_name(s.feature)),
                                 format_fixed(s.e_raw), opt_field(s.e_opt),
                                 std::to_string(s.n_used)};
    if (with_se) row.push_back(opt_field(s.e_opt_se));
    write_csv_row(out, row);
  }
}

std::vector<EntrainmentScore> read_entrain_csv(std::istream& in, std::string_view source) {
  const CsvTable t = CsvTable::parse(in, source);
  const std::size_t cs = t.column("speaker"), cf = t.column("feature"),
                    cr = t.column("e_raw"), co = t.column("e_opt"), cn = t.column("n_used");
  std::vector<EntrainmentScore> out;
  for (std::size_t i = 0; i < t.rows().size(); ++i) {
    const auto& row = t.rows()[i];
    const std::string ctx = t.source() + " row " + std::to_string(i + 2);
    EntrainmentScore s;
    s.speaker = row[cs];
    s.feature = feature_field(row[cf], ctx);
    s.e_raw = parse_double(row[cr], ctx);
    if (row[co] != "nan") s.e_opt = parse_double(row[co], ctx);
    s.n_used = static_cast<std::size_t>(parse_int(row[cn], ctx));
    out.push_back(std::move(s));
  }
  return out;
}

void write_validate_csv(std::ostream& out, std::span<const PartnerOtherRow> rows) {
  out << "speaker,feature,partner_distance,other_distance,n_surrogates\n";
  for (const auto& r : rows)
    write_csv_row(out, {r.speaker, std::string(feature_name(r.feature)),
                        format_fixed(r.partner), opt_field(r.other),
                        std::to_string(r.n_surrogates)});
}

std::vector<FeatureTest> partner_other_tests(std::span<const PartnerOtherRow> rows,
                                             const Thresholds& th) {
  std::vector<FeatureTest> out;
  for (Feature f : kAllFeatures) {
    std::vector<double> partner, other;
    for (const auto& r : rows) {
      if (r.feature != f || !r.other) continue;
      partner.push_back(r.partner);
      other.push_back(*r.other);
    }
    FeatureTest ft;
    ft.feature = f;
    ft.n = partner.size();
    try {
      ft.result = paired_t_test(partner, other, th, Alternative::kLess);
    } catch (const NumericError&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      ft.result = {nan, partner.empty() ? 0.0 : static_cast<double>(partner.size() - 1), nan,
                   false, false};
    }
    out.push_back(ft);
  }
  return out;
}

void write_ttest_csv(std::ostream& out, std::span<const FeatureTest> tests) {
  out << "feature,t,df,p_value,significant,trend,n\n";
  for (const auto& t : tests)
    write_csv_row(out, {std::string(feature_name(t.feature)),
                        format_fixed(t.result.statistic), format_fixed(t.result.df, 0),
                        format_general(t.result.p_value), bool_field(t.result.significant),
                        bool_field(t.result.trend), std::to_string(t.n)});
}

void print_ttest_report(std::ostream& out, std::span<const FeatureTest> tests) {
  out << std::left << std::setw(8) << "Feature" << std::right << std::setw(8) << "t"
      << std::setw(6) << "df" << std::setw(12) << "p-value" << std::setw(6) << "Sig." << '\n';
  for (const auto& t : tests) {
    std::string name(feature_name(t.feature));
    name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    out << std::left << std::setw(8) << name << std::right << std::setw(8)
        << format_fixed(t.result.statistic, 2) << std::setw(6)
        << format_fixed(t.result.df, 0) << std::setw(12) << format_p(t.result.p_value)
        << std::setw(6) << (t.result.significant ? "*" : (t.result.trend ? "." : ""))
        << '\n';
  }
}

void write_dyads_csv(std::ostream& out, std::span<const DyadScore> dyads) {
  out << "speaker_a,speaker_b,feature,inner_dyad\n";
  for (const auto& d : dyads)
    write_csv_row(out, {d.a, d.b, std::string(feature_name(d.feature)),
                        format_fixed(d.inner_dyad)});
}

std::vector<DyadScore> read_dyads_csv(std::istream& in, std::string_view source) {
  const CsvTable t = CsvTable::parse(in, source);
  const std::size_t ca = t.column("speaker_a"), cb = t.column("speaker_b"),
                    cf = t.column("feature"), cv = t.column("inner_dyad");
  std::vector<DyadScore> out;
  for (std::size_t i = 0; i < t.rows().size(); ++i) {
    const auto& row = t.rows()[i];
    const std::string ctx = t.source() + " row " + std::to_string(i + 2);
    out.push_back({row[ca], row[cb], feature_field(row[cf], ctx), parse_double(row[cv], ctx)});
  }
  return out;
}

void report_heatmap_csv(std::ostream& out, std::span<const GridCell> grid) {
  out << "feature,criterion,r,p,n,significant,trend\n";
  for (const auto& c : grid)
    write_csv_row(out, {std::string(feature_name(c.feature)),
                        std::string(criterion_name(c.criterion)), format_fixed(c.r),
                        format_general(c.p), std::to_string(c.n), bool_field(c.significant),
                        bool_field(c.trend)});
}

void write_icc_csv(std::ostream& out, std::span<const IccRow> rows) {
  out << "criterion,icc,f,df1,df2,p_value,ci_low,ci_high\n";
  for (const auto& r : rows)
    write_csv_row(out, {std::string(criterion_name(r.criterion)), format_fixed(r.result.icc),
                        format_fixed(r.result.f_statistic), format_fixed(r.result.df1, 0),
                        format_fixed(r.result.df2, 0), format_general(r.result.p_value),
                        format_fixed(r.result.ci_low), format_fixed(r.result.ci_high)});
}

void print_icc_report(std::ostream& out, std::span<const IccRow> rows) {
  out << std::left << std::setw(15) << "Indicator" << std::setw(8) << "ICC" << std::setw(10)
      << "p-value" << "CI95%" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(15) << criterion_name(r.criterion) << std::setw(8)
        << format_fixed(r.result.icc, 3) << std::setw(10) << format_p(r.result.p_value, true)
        << '[' << format_fixed(r.result.ci_low, 2) << ", " << format_fixed(r.result.ci_high, 2)
        << "]\n";
  }
}

}  // namespace f0entrain
