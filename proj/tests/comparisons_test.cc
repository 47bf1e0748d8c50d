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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <random>

#include "btrank/error.h"
#include "test_util.h"

namespace btrank {
namespace {

TEST(Aggregate, CountsBothOrientationsOfAPair) {
  const std::vector<MatchRecord> records = {
      {0, 1, true}, {0, 1, false}, {1, 0, true}};
  const ComparisonDataset d = Aggregate(records, 2);
  ASSERT_EQ(d.pairs().size(), 1u);
  EXPECT_EQ(d.pairs()[0], (PairCount{0, 1, 3, 1}));
  EXPECT_EQ(d.total_matches(), 3);
}

TEST(Aggregate, EmptyInput) {
  const ComparisonDataset d = Aggregate({}, 4);
  EXPECT_EQ(d.num_players(), 4);
  EXPECT_TRUE(d.pairs().empty());
  EXPECT_EQ(d.total_matches(), 0);
}

TEST(Aggregate, RejectsSelfMatchAndBadIndex) {
  const std::vector<MatchRecord> self = {{1, 1, true}};
  const std::vector<MatchRecord> high = {{0, 3, true}};
  const std::vector<MatchRecord> negative = {{-1, 0, true}};
  for (const auto* records : {&self, &high, &negative}) {
    try {
      Aggregate(*records, 3);
      FAIL() << "accepted invalid records";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidInput);
    }
  }
}

TEST(Aggregate, MatchesIndependentTally) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> player(0, 99);
  std::bernoulli_distribution coin(0.5);
  std::vector<MatchRecord> records;
  while (records.size() < 1000) {
    const int i = player(rng);
    const int j = player(rng);
    if (i != j) records.push_back({i, j, coin(rng)});
  }
  std::map<std::pair<int, int>, std::pair<std::int64_t, std::int64_t>> tally;
  for (const MatchRecord& r : records) {
    const int lo = std::min(r.i, r.j);
    const int hi = std::max(r.i, r.j);
    auto& [n, w] = tally[{lo, hi}];
    ++n;
    const int winner = r.i_wins ? r.i : r.j;
    if (winner == lo) ++w;
  }
  const ComparisonDataset d = Aggregate(records, 100);
  EXPECT_EQ(d.total_matches(), 1000);
  ASSERT_EQ(d.pairs().size(), tally.size());
  for (const PairCount& pc : d.pairs()) {
    const auto& [n, w] = tally.at({pc.i, pc.j});
    EXPECT_EQ(pc.matches, n);
    EXPECT_EQ(pc.wins, w);
  }
}

TEST(Aggregate, OrderInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> player(0, 9);
  std::bernoulli_distribution coin(0.3);
  std::vector<MatchRecord> records;
  while (records.size() < 300) {
    const int i = player(rng);
    const int j = player(rng);
    if (i != j) records.push_back({i, j, coin(rng)});
  }
  const ComparisonDataset reference = Aggregate(records, 10);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(records.begin(), records.end(), rng);
    EXPECT_EQ(Aggregate(records, 10), reference);
  }
}

TEST(Dataset, ValidatesPairs) {
  EXPECT_THROW(ComparisonDataset(2, {{1, 0, 1, 0}}), Error);
  EXPECT_THROW(ComparisonDataset(2, {{0, 1, 0, 0}}), Error);
  EXPECT_THROW(ComparisonDataset(2, {{0, 1, 2, 3}}), Error);
  EXPECT_THROW(ComparisonDataset(2, {{0, 1, 2, 1}, {0, 1, 2, 1}}), Error);
  EXPECT_THROW(ComparisonDataset(3, {{0, 1, 2, 1}}, {"a", "a", "b"}), Error);
  EXPECT_THROW(ComparisonDataset(3, {{0, 1, 2, 1}}, {"a", "b"}), Error);
  const ComparisonDataset ok(3, {{0, 2, 5, 2}, {1, 2, 4, 4}}, {"a", "b", "c"});
  EXPECT_EQ(ok.total_matches(), 9);
  EXPECT_EQ(ok.Label(1), "b");
  EXPECT_EQ(ComparisonDataset(2, {}).Label(1), "1");
}

TEST(FromCitationMatrix, DropsDiagonal) {
  const ComparisonDataset d =
      FromCitationMatrix({{"A", "B"}, {{5, 3}, {1, 7}}});
  ASSERT_EQ(d.pairs().size(), 1u);
  EXPECT_EQ(d.pairs()[0], (PairCount{0, 1, 4, 3}));
  EXPECT_EQ(d.labels(), (std::vector<std::string>{"A", "B"}));
}

TEST(FromCitationMatrix, EmptyOffDiagonalWarnsDisconnected) {
  std::vector<std::string> warnings;
  const ComparisonDataset d = FromCitationMatrix(
      {{"A", "B", "C"}, {{4, 0, 0}, {0, 2, 0}, {0, 0, 9}}}, &warnings);
  EXPECT_TRUE(d.pairs().empty());
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("disconnected"), std::string::npos);
}

TEST(FromCitationMatrix, SymmetricCountsGiveEvenSplits) {
  const ComparisonDataset d = FromCitationMatrix(
      {{"A", "B", "C"}, {{1, 6, 2}, {6, 0, 8}, {2, 8, 3}}});
  for (const PairCount& pc : d.pairs()) {
    EXPECT_EQ(2 * pc.wins, pc.matches);
  }
}

TEST(FromCitationMatrix, RejectsMalformedMatrices) {
  EXPECT_THROW(FromCitationMatrix({{"A", "B"}, {{1, 2}}}), Error);
  EXPECT_THROW(FromCitationMatrix({{"A", "B"}, {{1, 2}, {3}}}), Error);
  EXPECT_THROW(FromCitationMatrix({{"A", "B"}, {{1, -2}, {3, 4}}}), Error);
}

TEST(FromCitationMatrix, WinTotalsAreOffDiagonalRowSums) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::int64_t> count(0, 20);
  const int size = 8;
  CitationMatrix m;
  for (int i = 0; i < size; ++i) {
    m.labels.push_back("J" + std::to_string(i));
    m.counts.emplace_back();
    for (int j = 0; j < size; ++j) m.counts.back().push_back(count(rng));
  }
  const ComparisonDataset d = FromCitationMatrix(m);
  const std::vector<std::int64_t> totals = WinTotals(d);
  for (int i = 0; i < size; ++i) {
    std::int64_t row = 0;
    for (int j = 0; j < size; ++j) row += (i == j) ? 0 : m.counts[i][j];
    EXPECT_EQ(totals[i], row);
  }
}

TEST(WinTotals, Examples) {
  const ComparisonDataset d(2, {{0, 1, 3, 1}});
  EXPECT_EQ(WinTotals(d), (std::vector<std::int64_t>{1, 2}));
  EXPECT_EQ(MatchTotals(d), (std::vector<std::int64_t>{3, 3}));
  EXPECT_EQ(WinTotals(ComparisonDataset(3, {})),
            (std::vector<std::int64_t>{0, 0, 0}));
}

TEST(WinTotals, RoundRobinMatchesRecordTally) {
  std::mt19937_64 rng(13);
  std::bernoulli_distribution coin(0.6);
  const int size = 7;
  std::vector<MatchRecord> records;
  std::vector<std::int64_t> tally(size, 0);
  for (int round = 0; round < 3; ++round) {
    for (int i = 0; i < size; ++i) {
      for (int j = i + 1; j < size; ++j) {
        const bool i_wins = coin(rng);
        records.push_back({i, j, i_wins});
        ++tally[i_wins ? i : j];
      }
    }
  }
  const ComparisonDataset d = Aggregate(records, size);
  EXPECT_EQ(WinTotals(d), tally);
  const auto totals = WinTotals(d);
  EXPECT_EQ(std::accumulate(totals.begin(), totals.end(), std::int64_t{0}),
            d.total_matches());
}

TEST(ConnectedComponents, Examples) {
  EXPECT_EQ(ConnectedComponents(ComparisonDataset(3, {{0, 1, 1, 0}, {1, 2, 1, 1}})),
            (std::vector<std::vector<int>>{{0, 1, 2}}));
  EXPECT_EQ(ConnectedComponents(ComparisonDataset(4, {{0, 1, 2, 1}})),
            (std::vector<std::vector<int>>{{0, 1}, {2}, {3}}));
  EXPECT_FALSE(IsConnected(ComparisonDataset(4, {{0, 1, 2, 1}})));
}

std::vector<std::vector<int>> BfsComponents(int n,
                                            std::span<const PairCount> pairs) {
  std::vector<std::vector<int>> adj(n);
  for (const PairCount& pc : pairs) {
    adj[pc.i].push_back(pc.j);
    adj[pc.j].push_back(pc.i);
  }
  std::vector<int> seen(n, 0);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<int> comp;
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      comp.push_back(v);
      for (int u : adj[v]) {
        if (!seen[u]) {
          seen[u] = 1;
          q.push(u);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(comp);
  }
  return out;
}

TEST(ConnectedComponents, MatchesBreadthFirstSearch) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 40;
    std::bernoulli_distribution edge(0.02 + 0.002 * trial);
    std::vector<PairCount> pairs;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (edge(rng)) pairs.push_back({i, j, 1, 0});
      }
    }
    const ComparisonDataset d(n, pairs);
    EXPECT_EQ(ConnectedComponents(d), BfsComponents(n, d.pairs()));
  }
}

TEST(WinGraphComponents, SeparatesUnbeatenPlayers) {
  // Player 0 beat everyone it met; 1 and 2 beat each other.
  const ComparisonDataset d(3, {{0, 1, 2, 2}, {0, 2, 1, 1}, {1, 2, 3, 1}});
  EXPECT_EQ(WinGraphComponents(d),
            (std::vector<std::vector<int>>{{0}, {1, 2}}));
  const ComparisonDataset mixed(3, {{0, 1, 2, 1}, {1, 2, 3, 1}});
  EXPECT_EQ(WinGraphComponents(mixed).size(), 1u);
}

TEST(PermutePlayers, RelabelsPairsAndLabels) {
  const ComparisonDataset d(3, {{0, 1, 4, 1}, {1, 2, 2, 2}}, {"a", "b", "c"});
  const std::vector<int> perm = {2, 0, 1};
  const ComparisonDataset p = PermutePlayers(d, perm);
  EXPECT_EQ(p.labels(), (std::vector<std::string>{"b", "c", "a"}));
  // Old pair (0,1) with 1 win for 0 becomes (0,2) with 3 wins for new 0.
  ASSERT_EQ(p.pairs().size(), 2u);
  EXPECT_EQ(p.pairs()[0], (PairCount{0, 1, 2, 2}));
  EXPECT_EQ(p.pairs()[1], (PairCount{0, 2, 4, 3}));
}

}  // namespace
}  // namespace btrank
