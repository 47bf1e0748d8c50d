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

// Paired-comparison data: individual match outcomes, their aggregation into
// per-pair binomial counts, and citation matrices read as comparisons.
//
// Players are dense indices 0..num_players-1. Player 0 is the anchor used for
// identification by the estimators downstream, so ingestion always preserves
// the input order of players.

#ifndef BTRANK_COMPARISONS_H_
#define BTRANK_COMPARISONS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace btrank {

// One match between players i and j. `i_wins` is the binary outcome y_k.
struct MatchRecord {
  int i = 0;
  int j = 0;
  bool i_wins = false;
};

// Aggregated results of every meeting between i and j, stored with i < j.
// `wins` counts the wins of i over j, so j won `matches - wins` times.
struct PairCount {
  int i = 0;
  int j = 0;
  std::int64_t matches = 0;
  std::int64_t wins = 0;

  friend bool operator==(const PairCount&, const PairCount&) = default;
};

// Immutable set of aggregated comparisons. Only observed pairs are stored,
// sorted by (i, j).
class ComparisonDataset {
 public:
  ComparisonDataset() = default;

  // Throws Error(kInvalidInput) unless every pair has 0 <= i < j <
  // num_players, 1 <= matches, 0 <= wins <= matches, and appears once.
  // `labels` is either empty or holds one unique label per player.
  ComparisonDataset(int num_players, std::vector<PairCount> pairs,
                    std::vector<std::string> labels = {});

  int num_players() const { return num_players_; }
  std::span<const PairCount> pairs() const { return pairs_; }
  std::int64_t total_matches() const { return total_matches_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool has_labels() const { return !labels_.empty(); }

  // Display label; falls back to the decimal index.
  std::string Label(int player) const;

  friend bool operator==(const ComparisonDataset&,
                         const ComparisonDataset&) = default;

 private:
  int num_players_ = 0;
  std::vector<PairCount> pairs_;
  std::int64_t total_matches_ = 0;
  std::vector<std::string> labels_;
};

// Square matrix of citation counts. counts[i][j] is the number of citations
// appearing in journal j to papers of journal i; it is read as wins of i over
// j, since being cited is the measure of influence.
struct CitationMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::int64_t>> counts;
};

// Tallies binary outcomes into per-pair counts. Records may name either
// player first. Throws Error(kInvalidInput) on self-matches and out-of-range
// indices.
ComparisonDataset Aggregate(std::span<const MatchRecord> records,
                            int num_players,
                            std::vector<std::string> labels = {});

// Drops the diagonal (self citations) and pairs with no citations either way.
// A warning is appended when the resulting comparison graph is disconnected.
ComparisonDataset FromCitationMatrix(const CitationMatrix& matrix,
                                     std::vector<std::string>* warnings =
                                         nullptr);

// w_i: total wins of each player over all opponents.
std::vector<std::int64_t> WinTotals(const ComparisonDataset& dataset);

// Total matches played by each player.
std::vector<std::int64_t> MatchTotals(const ComparisonDataset& dataset);

// Components of the undirected comparison graph. Each component is sorted and
// components are ordered by their smallest member.
std::vector<std::vector<int>> ConnectedComponents(
    const ComparisonDataset& dataset);

bool IsConnected(const ComparisonDataset& dataset);

// Strongly connected components of the directed "i beat j" graph, ordered as
// ConnectedComponents. The maximum likelihood ratings are finite exactly when
// there is a single such component.
std::vector<std::vector<int>> WinGraphComponents(
    const ComparisonDataset& dataset);

// Relabels players: player `i` of the input becomes `permutation[i]`.
ComparisonDataset PermutePlayers(const ComparisonDataset& dataset,
                                 std::span<const int> permutation);

}  // namespace btrank

#endif  // BTRANK_COMPARISONS_H_
