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

#include "tdulab/metrics/csv.h"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tdulab {

std::string FormatDouble(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double ParseDouble(std::string_view field) {
  // strtod rather than from_chars so inf/nan spellings from %g parse back.
  const std::string s(field);
  if (s.empty()) throw std::invalid_argument("ParseDouble: empty field");
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) {
    throw std::invalid_argument("ParseDouble: malformed number '" + s + "'");
  }
  return value;
}

long long ParseInt(std::string_view field) {
  long long value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::invalid_argument("ParseInt: malformed integer '" +
                                std::string(field) + "'");
  }
  return value;
}

std::string QuoteCsvField(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::WriteRow(std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << QuoteCsvField(fields[i]);
  }
  out_ << '\n';
}

void CsvWriter::WriteRow(std::initializer_list<std::string> fields) {
  WriteRow(std::span<const std::string>(fields.begin(), fields.size()));
}

std::vector<CsvRow> ParseCsv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool in_quotes = false;
  bool row_started = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field += c;
      }
      ++i;
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      row_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      row_started = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      row_started = false;
    } else {
      field += c;
      row_started = true;
    }
    ++i;
  }
  if (in_quotes) throw std::invalid_argument("ParseCsv: unterminated quote");
  if (row_started) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, std::string_view text) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::filesystem::create_directories(target.parent_path());
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, target);
}

std::vector<CsvRow> ReadCsvFile(const std::string& path) {
  return ParseCsv(ReadTextFile(path));
}

const std::vector<std::string>& EpisodeCsvHeader() {
  static const std::vector<std::string> header = {
      "run_id", "seed",   "env",        "N_or_L", "episode", "return",
      "regret", "avg_regret", "head",   "beta",   "lambda",  "variant"};
  return header;
}

void WriteEpisodeCsv(std::span<const EpisodeRow> rows, std::ostream& out) {
  CsvWriter writer(out);
  writer.WriteRow(EpisodeCsvHeader());
  for (const EpisodeRow& r : rows) {
    writer.WriteRow({r.run_id, std::to_string(r.seed), r.env,
                     std::to_string(r.size), std::to_string(r.episode),
                     FormatDouble(r.episode_return), FormatDouble(r.regret),
                     FormatDouble(r.average_regret), std::to_string(r.head),
                     FormatDouble(r.beta), FormatDouble(r.lambda), r.variant});
  }
}

std::vector<EpisodeRow> ParseEpisodeCsv(std::string_view text) {
  const std::vector<CsvRow> rows = ParseCsv(text);
  if (rows.empty() || rows.front() != EpisodeCsvHeader()) {
    throw std::invalid_argument("ParseEpisodeCsv: missing or wrong header");
  }
  std::vector<EpisodeRow> out;
  out.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const CsvRow& f = rows[i];
    if (f.size() != EpisodeCsvHeader().size()) {
      throw std::invalid_argument("ParseEpisodeCsv: row " + std::to_string(i) +
                                  " has " + std::to_string(f.size()) +
                                  " fields");
    }
    EpisodeRow r;
    r.run_id = f[0];
    r.seed = static_cast<uint64_t>(std::stoull(f[1]));
    r.env = f[2];
    r.size = static_cast<int>(ParseInt(f[3]));
    r.episode = ParseInt(f[4]);
    r.episode_return = ParseDouble(f[5]);
    r.regret = ParseDouble(f[6]);
    r.average_regret = ParseDouble(f[7]);
    r.head = static_cast<int>(ParseInt(f[8]));
    r.beta = ParseDouble(f[9]);
    r.lambda = ParseDouble(f[10]);
    r.variant = f[11];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tdulab
