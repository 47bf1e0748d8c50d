// Copyright 2026 The btrank Authors.
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

#include "btrank/comparisons_io.h"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <ostream>

#include "btrank/error.h"

namespace btrank {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void ParseError(int line_number, const std::string& what) {
  throw Error(ErrorCode::kParse,
              "line " + std::to_string(line_number) + ": " + what);
}

std::optional<std::int64_t> ParseInteger(std::string_view s) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return value;
}

bool IsBlank(std::string_view line) { return Trim(line).empty(); }

}  // namespace

std::vector<std::string> SplitCsvLine(std::string_view line, int line_number) {
  std::vector<std::string> fields;
  std::string field;
  size_t pos = 0;
  while (true) {
    field.clear();
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos < line.size() && line[pos] == '"') {
      ++pos;
      bool closed = false;
      while (pos < line.size()) {
        if (line[pos] == '"') {
          if (pos + 1 < line.size() && line[pos + 1] == '"') {
            field.push_back('"');
            pos += 2;
          } else {
            ++pos;
            closed = true;
            break;
          }
        } else {
          field.push_back(line[pos++]);
        }
      }
      if (!closed) ParseError(line_number, "unterminated quoted field");
      const size_t comma = line.find(',', pos);
      if (!Trim(line.substr(pos, comma == std::string_view::npos
                                     ? std::string_view::npos
                                     : comma - pos))
               .empty()) {
        ParseError(line_number, "unexpected text after quoted field");
      }
      fields.push_back(field);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    } else {
      const size_t comma = line.find(',', pos);
      const std::string_view raw =
          line.substr(pos, comma == std::string_view::npos
                               ? std::string_view::npos
                               : comma - pos);
      fields.emplace_back(Trim(raw));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  }
  return fields;
}

void WriteCsvField(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

CitationMatrix ReadCitationCsv(std::istream& in) {
  std::string line;
  int line_number = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_number;
    if (IsBlank(line)) continue;
    header = SplitCsvLine(line, line_number);
    break;
  }
  if (header.size() < 2) {
    throw Error(ErrorCode::kParse, "citation matrix has no header labels");
  }
  CitationMatrix matrix;
  matrix.labels.assign(header.begin() + 1, header.end());
  const size_t size = matrix.labels.size();
  std::map<std::string, size_t> column_of;
  for (size_t c = 0; c < size; ++c) {
    if (matrix.labels[c].empty()) {
      ParseError(line_number, "empty journal label in header");
    }
    if (!column_of.emplace(matrix.labels[c], c).second) {
      ParseError(line_number, "duplicate header label '" + matrix.labels[c] +
                                  "'");
    }
  }
  matrix.counts.assign(size, {});
  std::vector<char> seen(size, 0);
  while (std::getline(in, line)) {
    ++line_number;
    if (IsBlank(line)) continue;
    const std::vector<std::string> fields = SplitCsvLine(line, line_number);
    const auto it = column_of.find(fields.front());
    if (it == column_of.end()) {
      ParseError(line_number,
                 "row label '" + fields.front() + "' is not in the header");
    }
    const size_t row = it->second;
    if (seen[row]) {
      ParseError(line_number, "row label '" + fields.front() + "' repeated");
    }
    seen[row] = 1;
    if (fields.size() != size + 1) {
      ParseError(line_number, "expected " + std::to_string(size) +
                                  " counts, found " +
                                  std::to_string(fields.size() - 1));
    }
    matrix.counts[row].resize(size);
    for (size_t c = 0; c < size; ++c) {
      const auto value = ParseInteger(fields[c + 1]);
      if (!value) {
        ParseError(line_number, "count '" + fields[c + 1] +
                                    "' is not an integer");
      }
      if (*value < 0) {
        ParseError(line_number, "negative count for '" + fields.front() +
                                    "' / '" + matrix.labels[c] + "'");
      }
      matrix.counts[row][c] = *value;
    }
  }
  for (size_t r = 0; r < size; ++r) {
    if (!seen[r]) {
      throw Error(ErrorCode::kParse,
                  "no row for header label '" + matrix.labels[r] + "'");
    }
  }
  return matrix;
}

MatchLog ReadMatchLog(std::istream& in,
                      const std::vector<std::string>* roster) {
  std::string line;
  int line_number = 0;
  bool have_header = false;
  struct RawMatch {
    std::string winner, loser;
    int line_number;
  };
  std::vector<RawMatch> raw;
  while (std::getline(in, line)) {
    ++line_number;
    if (IsBlank(line)) continue;
    std::vector<std::string> fields = SplitCsvLine(line, line_number);
    if (!have_header) {
      if (fields.size() != 2 || fields[0] != "winner" || fields[1] != "loser") {
        ParseError(line_number, "expected header 'winner,loser'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 2) {
      ParseError(line_number, "expected 2 fields, found " +
                                  std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      ParseError(line_number, "empty player field");
    }
    if (fields[0] == fields[1]) {
      ParseError(line_number, "player '" + fields[0] + "' matched against itself");
    }
    raw.push_back({std::move(fields[0]), std::move(fields[1]), line_number});
  }
  if (!have_header) throw Error(ErrorCode::kParse, "match log is empty");

  MatchLog log;
  std::map<std::string, int> index_of;
  if (roster != nullptr) {
    log.labels = *roster;
    for (size_t k = 0; k < roster->size(); ++k) {
      index_of.emplace((*roster)[k], static_cast<int>(k));
    }
    log.num_players = static_cast<int>(roster->size());
  } else {
    const bool all_indices =
        std::all_of(raw.begin(), raw.end(), [](const RawMatch& m) {
          const auto w = ParseInteger(m.winner);
          const auto l = ParseInteger(m.loser);
          return w && l && *w >= 0 && *l >= 0;
        });
    if (all_indices) {
      int max_index = -1;
      for (const RawMatch& m : raw) {
        const int w = static_cast<int>(*ParseInteger(m.winner));
        const int l = static_cast<int>(*ParseInteger(m.loser));
        log.records.push_back({w, l, true});
        max_index = std::max({max_index, w, l});
      }
      log.num_players = max_index + 1;
      return log;
    }
  }
  for (const RawMatch& m : raw) {
    int ids[2];
    const std::string* names[2] = {&m.winner, &m.loser};
    for (int s = 0; s < 2; ++s) {
      auto it = index_of.find(*names[s]);
      if (it == index_of.end()) {
        if (roster != nullptr) {
          ParseError(m.line_number, "unknown player label '" + *names[s] + "'");
        }
        it = index_of.emplace(*names[s], static_cast<int>(log.labels.size()))
                 .first;
        log.labels.push_back(*names[s]);
      }
      ids[s] = it->second;
    }
    log.records.push_back({ids[0], ids[1], true});
  }
  if (roster == nullptr) log.num_players = static_cast<int>(log.labels.size());
  return log;
}

std::vector<std::string> ReadRoster(std::istream& in) {
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view label = Trim(line);
    if (!label.empty()) labels.emplace_back(label);
  }
  return labels;
}

nlohmann::json DatasetToJson(const ComparisonDataset& dataset) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const PairCount& pc : dataset.pairs()) {
    pairs.push_back({pc.i, pc.j, pc.matches, pc.wins});
  }
  return {
      {"num_players", dataset.num_players()},
      {"labels", dataset.labels()},
      {"total_matches", dataset.total_matches()},
      {"pairs", std::move(pairs)},
  };
}

ComparisonDataset DatasetFromJson(const nlohmann::json& json) {
  try {
    std::vector<PairCount> pairs;
    for (const auto& entry : json.at("pairs")) {
      if (!entry.is_array() || entry.size() != 4) {
        throw Error(ErrorCode::kParse, "dataset pair entries must have 4 values");
      }
      pairs.push_back({entry[0].get<int>(), entry[1].get<int>(),
                       entry[2].get<std::int64_t>(),
                       entry[3].get<std::int64_t>()});
    }
    std::vector<std::string> labels;
    if (json.contains("labels")) {
      labels = json.at("labels").get<std::vector<std::string>>();
    }
    ComparisonDataset dataset(json.at("num_players").get<int>(),
                              std::move(pairs), std::move(labels));
    if (json.contains("total_matches") &&
        json.at("total_matches").get<std::int64_t>() !=
            dataset.total_matches()) {
      throw Error(ErrorCode::kParse,
                  "total_matches does not equal the sum over pairs");
    }
    return dataset;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed dataset: ") + e.what());
  }
}

}  // namespace btrank
