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

#include "btrank/comparisons.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "btrank/error.h"

namespace btrank {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int size) : parent_(size) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int Find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void Union(int a, int b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

std::vector<std::vector<int>> GroupByRoot(std::span<const int> root) {
  std::map<int, std::vector<int>> by_root;
  for (int v = 0; v < static_cast<int>(root.size()); ++v) {
    by_root[root[v]].push_back(v);
  }
  std::vector<std::vector<int>> groups;
  groups.reserve(by_root.size());
  for (auto& [_, members] : by_root) groups.push_back(std::move(members));
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return groups;
}

}  // namespace

ComparisonDataset::ComparisonDataset(int num_players,
                                     std::vector<PairCount> pairs,
                                     std::vector<std::string> labels)
    : num_players_(num_players),
      pairs_(std::move(pairs)),
      labels_(std::move(labels)) {
  if (num_players_ < 0) {
    throw Error(ErrorCode::kInvalidInput, "negative player count");
  }
  if (!labels_.empty()) {
    if (static_cast<int>(labels_.size()) != num_players_) {
      throw Error(ErrorCode::kInvalidInput,
                  "label count does not match player count");
    }
    std::set<std::string> seen;
    for (const auto& label : labels_) {
      if (!seen.insert(label).second) {
        throw Error(ErrorCode::kInvalidInput, "duplicate label: " + label);
      }
    }
  }
  std::sort(pairs_.begin(), pairs_.end(), [](const auto& a, const auto& b) {
    return std::pair(a.i, a.j) < std::pair(b.i, b.j);
  });
  for (size_t k = 0; k < pairs_.size(); ++k) {
    const PairCount& pc = pairs_[k];
    if (pc.i < 0 || pc.j >= num_players_ || pc.i >= pc.j) {
      throw Error(ErrorCode::kInvalidInput,
                  "pair (" + std::to_string(pc.i) + ", " +
                      std::to_string(pc.j) +
                      ") is not an ordered pair of valid players");
    }
    if (pc.matches < 1 || pc.wins < 0 || pc.wins > pc.matches) {
      throw Error(ErrorCode::kInvalidInput,
                  "pair (" + std::to_string(pc.i) + ", " +
                      std::to_string(pc.j) + ") has inconsistent counts");
    }
    if (k > 0 && pairs_[k - 1].i == pc.i && pairs_[k - 1].j == pc.j) {
      throw Error(ErrorCode::kInvalidInput,
                  "pair (" + std::to_string(pc.i) + ", " +
                      std::to_string(pc.j) + ") appears twice");
    }
    total_matches_ += pc.matches;
  }
}

std::string ComparisonDataset::Label(int player) const {
  if (has_labels()) return labels_.at(player);
  return std::to_string(player);
}

ComparisonDataset Aggregate(std::span<const MatchRecord> records,
                            int num_players, std::vector<std::string> labels) {
  std::map<std::pair<int, int>, PairCount> tally;
  for (const MatchRecord& r : records) {
    if (r.i < 0 || r.j < 0 || r.i >= num_players || r.j >= num_players) {
      throw Error(ErrorCode::kInvalidInput,
                  "match (" + std::to_string(r.i) + ", " +
                      std::to_string(r.j) + ") names a player out of range");
    }
    if (r.i == r.j) {
      throw Error(ErrorCode::kInvalidInput,
                  "player " + std::to_string(r.i) + " matched against itself");
    }
    const int lo = std::min(r.i, r.j);
    const int hi = std::max(r.i, r.j);
    PairCount& pc = tally[{lo, hi}];
    pc.i = lo;
    pc.j = hi;
    ++pc.matches;
    const int winner = r.i_wins ? r.i : r.j;
    if (winner == lo) ++pc.wins;
  }
  std::vector<PairCount> pairs;
  pairs.reserve(tally.size());
  for (const auto& [_, pc] : tally) pairs.push_back(pc);
  return ComparisonDataset(num_players, std::move(pairs), std::move(labels));
}

ComparisonDataset FromCitationMatrix(const CitationMatrix& matrix,
                                     std::vector<std::string>* warnings) {
  const int size = static_cast<int>(matrix.counts.size());
  for (int r = 0; r < size; ++r) {
    if (static_cast<int>(matrix.counts[r].size()) != size) {
      throw Error(ErrorCode::kInvalidInput,
                  "citation matrix is not square (row " + std::to_string(r) +
                      " has " + std::to_string(matrix.counts[r].size()) +
                      " entries, expected " + std::to_string(size) + ")");
    }
    for (int c = 0; c < size; ++c) {
      if (matrix.counts[r][c] < 0) {
        throw Error(ErrorCode::kInvalidInput,
                    "negative citation count at (" + std::to_string(r) +
                        ", " + std::to_string(c) + ")");
      }
    }
  }
  if (!matrix.labels.empty() && static_cast<int>(matrix.labels.size()) != size) {
    throw Error(ErrorCode::kInvalidInput,
                "citation matrix label count does not match its size");
  }
  std::vector<PairCount> pairs;
  for (int i = 0; i < size; ++i) {
    for (int j = i + 1; j < size; ++j) {
      const std::int64_t wins = matrix.counts[i][j];
      const std::int64_t matches = wins + matrix.counts[j][i];
      if (matches > 0) pairs.push_back({i, j, matches, wins});
    }
  }
  ComparisonDataset dataset(size, std::move(pairs), matrix.labels);
  if (warnings != nullptr && size > 1 && !IsConnected(dataset)) {
    warnings->push_back(
        "comparison graph is disconnected (" +
        std::to_string(ConnectedComponents(dataset).size()) +
        " components); ratings are not identifiable across components");
  }
  return dataset;
}

std::vector<std::int64_t> WinTotals(const ComparisonDataset& dataset) {
  std::vector<std::int64_t> wins(dataset.num_players(), 0);
  for (const PairCount& pc : dataset.pairs()) {
    wins[pc.i] += pc.wins;
    wins[pc.j] += pc.matches - pc.wins;
  }
  return wins;
}

std::vector<std::int64_t> MatchTotals(const ComparisonDataset& dataset) {
  std::vector<std::int64_t> totals(dataset.num_players(), 0);
  for (const PairCount& pc : dataset.pairs()) {
    totals[pc.i] += pc.matches;
    totals[pc.j] += pc.matches;
  }
  return totals;
}

std::vector<std::vector<int>> ConnectedComponents(
    const ComparisonDataset& dataset) {
  DisjointSets sets(dataset.num_players());
  for (const PairCount& pc : dataset.pairs()) sets.Union(pc.i, pc.j);
  std::vector<int> root(dataset.num_players());
  for (int v = 0; v < dataset.num_players(); ++v) root[v] = sets.Find(v);
  return GroupByRoot(root);
}

bool IsConnected(const ComparisonDataset& dataset) {
  return ConnectedComponents(dataset).size() <= 1;
}

std::vector<std::vector<int>> WinGraphComponents(
    const ComparisonDataset& dataset) {
  const int n = dataset.num_players();
  std::vector<std::vector<int>> out(n), in(n);
  for (const PairCount& pc : dataset.pairs()) {
    if (pc.wins > 0) {
      out[pc.i].push_back(pc.j);
      in[pc.j].push_back(pc.i);
    }
    if (pc.wins < pc.matches) {
      out[pc.j].push_back(pc.i);
      in[pc.i].push_back(pc.j);
    }
  }
  // Kosaraju: finishing order on the forward graph, then sweep the reverse.
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> visited(n, 0);
  for (int s = 0; s < n; ++s) {
    if (visited[s]) continue;
    std::vector<std::pair<int, size_t>> stack{{s, 0}};
    visited[s] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < out[v].size()) {
        const int w = out[v][next++];
        if (!visited[w]) {
          visited[w] = 1;
          stack.push_back({w, 0});
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<int> root(n, -1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (root[*it] >= 0) continue;
    std::vector<int> stack{*it};
    root[*it] = *it;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : in[v]) {
        if (root[w] < 0) {
          root[w] = *it;
          stack.push_back(w);
        }
      }
    }
  }
  return GroupByRoot(root);
}

ComparisonDataset PermutePlayers(const ComparisonDataset& dataset,
                                 std::span<const int> permutation) {
  const int n = dataset.num_players();
  if (static_cast<int>(permutation.size()) != n) {
    throw Error(ErrorCode::kInvalidInput, "permutation has the wrong size");
  }
  std::vector<PairCount> pairs;
  pairs.reserve(dataset.pairs().size());
  for (const PairCount& pc : dataset.pairs()) {
    const int a = permutation[pc.i];
    const int b = permutation[pc.j];
    if (a < b) {
      pairs.push_back({a, b, pc.matches, pc.wins});
    } else {
      pairs.push_back({b, a, pc.matches, pc.matches - pc.wins});
    }
  }
  std::vector<std::string> labels;
  if (dataset.has_labels()) {
    labels.resize(n);
    for (int v = 0; v < n; ++v) labels[permutation[v]] = dataset.labels()[v];
  }
  return ComparisonDataset(n, std::move(pairs), std::move(labels));
}

}  // namespace btrank
