// Copyright 2026 The tdulab Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TDULAB_METRICS_CSV_H_
#define TDULAB_METRICS_CSV_H_

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tdulab {

using CsvRow = std::vector<std::string>;

// 17 significant digits ("%.17g"), enough to round-trip any double.
std::string FormatDouble(double value);
// Parses a full field; throws std::invalid_argument otherwise.
double ParseDouble(std::string_view field);
long long ParseInt(std::string_view field);

// Quotes a field when it contains a comma, quote, CR or LF.
std::string QuoteCsvField(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void WriteRow(std::span<const std::string> fields);
  void WriteRow(std::initializer_list<std::string> fields);

 private:
  std::ostream& out_;
};

// RFC 4180 parsing: quoted fields may contain commas, doubled quotes and line
// breaks. Both LF and CRLF row endings are accepted. Throws
// std::invalid_argument on an unterminated quote.
std::vector<CsvRow> ParseCsv(std::string_view text);
std::vector<CsvRow> ReadCsvFile(const std::string& path);

// Episode log rows. Column order:
//   run_id, seed, env, N_or_L, episode, return, regret, avg_regret, head,
//   beta, lambda, variant
struct EpisodeRow {
  std::string run_id;
  uint64_t seed = 0;
  std::string env;
  int size = 0;
  int64_t episode = 0;
  double episode_return = 0.0;
  double regret = 0.0;
  double average_regret = 0.0;
  int head = 0;
  double beta = 0.0;
  double lambda = 0.0;
  std::string variant;

  bool operator==(const EpisodeRow&) const = default;
};

const std::vector<std::string>& EpisodeCsvHeader();
void WriteEpisodeCsv(std::span<const EpisodeRow> rows, std::ostream& out);
// Throws std::invalid_argument on a wrong header or malformed row.
std::vector<EpisodeRow> ParseEpisodeCsv(std::string_view text);

// Writes `text` to `path` atomically enough for our use (write then rename).
void WriteTextFile(const std::string& path, std::string_view text);
std::string ReadTextFile(const std::string& path);

}  // namespace tdulab

#endif  // TDULAB_METRICS_CSV_H_
