// core/include/f0entrain/csv.h

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

#ifndef F0ENTRAIN_CSV_H_
#define F0ENTRAIN_CSV_H_

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace f0entrain {

// Locale-independent number formatting for all CSV output.
std::string format_fixed(double v, int decimals = 6);
// Shortest form with at most `digits` significant digits (p-values).
std::string format_general(double v, int digits = 6);

// Parses a floating-point field; throws ParseError naming `what` on failure.
double parse_double(std::string_view field, std::string_view what);
long parse_int(std::string_view field, std::string_view what);

std::string csv_escape(std::string_view field);

// Minimal RFC 4180 reader: comma separated, optional double-quoted fields,
// CRLF tolerated.  Embedded newlines inside quotes are not supported.
class CsvTable {
 public:
  static CsvTable parse(std::istream& in, std::string_view source);
  static CsvTable load(const std::string& path);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  // Column index by name; throws ParseError if absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::vector<std::string> split_csv_line(std::string_view line);

// Writes `row` joined by commas, escaping as needed, terminated by '\n'.
void write_csv_row(std::ostream& out, const std::vector<std::string>& row);

}  // namespace f0entrain

#endif  // F0ENTRAIN_CSV_H_
