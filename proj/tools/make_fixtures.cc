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

// Writes the small datasets under data/. Output is deterministic, and a test
// regenerates it and compares byte for byte.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "btrank/comparisons.h"
#include "btrank/comparisons_io.h"
#include "btrank/simlab.h"

namespace {

namespace fs = std::filesystem;

void WriteCitations(const fs::path& path, const btrank::CitationMatrix& m) {
  std::ofstream out(path);
  out << "cited\\citing";
  for (const auto& label : m.labels) {
    out << ',';
    btrank::WriteCsvField(out, label);
  }
  out << '\n';
  for (size_t i = 0; i < m.labels.size(); ++i) {
    btrank::WriteCsvField(out, m.labels[i]);
    for (std::int64_t c : m.counts[i]) out << ',' << c;
    out << '\n';
  }
}

struct PairWins {
  int i;
  int j;
  int i_wins;
  int j_wins;
};

void WriteMatches(const fs::path& path, const std::vector<std::string>& labels,
                  const std::vector<PairWins>& pairs) {
  std::ofstream out(path);
  out << "winner,loser\n";
  // Interleave outcomes so the file is not sorted by result.
  for (const PairWins& p : pairs) {
    int a = p.i_wins;
    int b = p.j_wins;
    while (a > 0 || b > 0) {
      if (a > 0) {
        out << labels[p.i] << ',' << labels[p.j] << '\n';
        --a;
      }
      if (b > 0) {
        out << labels[p.j] << ',' << labels[p.i] << '\n';
        --b;
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures OUT_DIR\n";
    return 2;
  }
  const fs::path dir(argv[1]);
  fs::create_directories(dir);

  WriteCitations(dir / "citations_synthetic86.csv",
                 btrank::SyntheticCitationMatrix({}));

  btrank::CitationFixtureOptions dominant;
  dominant.journals = 12;
  dominant.mean_volume = 60.0;
  dominant.dominant_first = true;
  dominant.seed = 11;
  WriteCitations(dir / "citations_dominant.csv",
                 btrank::SyntheticCitationMatrix(dominant));

  WriteCitations(dir / "citations_2x2.csv",
                 btrank::CitationMatrix{{"JA", "JB"}, {{5, 3}, {7, 4}}});

  // Every pair meets 10 times, so win totals are sufficient.
  WriteMatches(dir / "matches_balanced.csv",
               {"ann", "bob", "cy", "dee", "eve"},
               {{0, 1, 7, 3}, {0, 2, 6, 4}, {0, 3, 8, 2}, {0, 4, 9, 1},
                {1, 2, 5, 5}, {1, 3, 6, 4}, {1, 4, 7, 3}, {2, 3, 5, 5},
                {2, 4, 6, 4}, {3, 4, 7, 3}});
  WriteMatches(dir / "matches_three.csv", {"x", "y", "z"},
               {{0, 1, 6, 4}, {0, 2, 7, 3}, {1, 2, 6, 4}});
  return 0;
}
