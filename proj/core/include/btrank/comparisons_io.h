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

// File formats for comparison data.
//
//   Citation matrix CSV: the header row holds journal labels after a corner
//   cell; each following row starts with a label and holds the counts
//   C[row][col]. Rows may come in any order but must cover exactly the header
//   labels.
//
//   Match log CSV: header `winner,loser`, then one match per row. Players are
//   labels or non-negative integer indices.
//
//   Dataset JSON: {"num_players", "labels", "total_matches",
//   "pairs": [[i, j, matches, wins_of_i], ...]}.

#ifndef BTRANK_COMPARISONS_IO_H_
#define BTRANK_COMPARISONS_IO_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "btrank/comparisons.h"
#include "json.hpp"

namespace btrank {

// Splits one CSV record. Double-quoted fields may contain commas and doubled
// quotes. Surrounding whitespace of unquoted fields is trimmed.
std::vector<std::string> SplitCsvLine(std::string_view line, int line_number);

// Writes a field, quoting it when it contains a comma, quote, or newline.
void WriteCsvField(std::ostream& out, std::string_view field);

CitationMatrix ReadCitationCsv(std::istream& in);

struct MatchLog {
  // Empty when the log uses integer indices.
  std::vector<std::string> labels;
  int num_players = 0;
  std::vector<MatchRecord> records;
};

// With a roster, every name in the log must be one of its labels and player
// indices follow roster order. Without one, integer-only logs are read as
// indices and anything else assigns indices in order of first appearance.
MatchLog ReadMatchLog(std::istream& in,
                      const std::vector<std::string>* roster = nullptr);

// One label per non-empty line.
std::vector<std::string> ReadRoster(std::istream& in);

nlohmann::json DatasetToJson(const ComparisonDataset& dataset);
ComparisonDataset DatasetFromJson(const nlohmann::json& json);

}  // namespace btrank

#endif  // BTRANK_COMPARISONS_IO_H_
