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

#include "btrank/scores.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>

#include "btrank/comparisons_io.h"
#include "btrank/error.h"
#include "btrank/format.h"

namespace btrank {
namespace {

std::int64_t TiedPairs(std::int64_t run) { return run * (run - 1) / 2; }

// Stable merge sort of `values` counting inversions (strictly decreasing
// pairs).
std::int64_t SortCountingInversions(std::vector<double>& values,
                                    std::vector<double>& scratch, size_t lo,
                                    size_t hi) {
  if (hi - lo < 2) return 0;
  const size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = SortCountingInversions(values, scratch, lo, mid) +
                       SortCountingInversions(values, scratch, mid, hi);
  size_t left = lo, right = mid, out = lo;
  while (left < mid && right < hi) {
    if (values[right] < values[left]) {
      swaps += static_cast<std::int64_t>(mid - left);
      scratch[out++] = values[right++];
    } else {
      scratch[out++] = values[left++];
    }
  }
  while (left < mid) scratch[out++] = values[left++];
  while (right < hi) scratch[out++] = values[right++];
  std::copy(scratch.begin() + lo, scratch.begin() + hi, values.begin() + lo);
  return swaps;
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kMle:
      return "MLE";
    case Method::kKwpm:
      return "KWPM";
    case Method::kKwpms:
      return "KWPMs";
    case Method::kKwpr:
      return "KWPR";
    case Method::kRmle:
      return "RMLE";
    case Method::kBorda:
      return "B";
    case Method::kWeightedBorda:
      return "WB";
  }
  return "?";
}

std::optional<Method> ParseMethod(std::string_view name) {
  for (Method m : kAllMethods) {
    if (MethodName(m) == name) return m;
  }
  return std::nullopt;
}

Eigen::VectorXd BordaScores(const ComparisonDataset& dataset) {
  const auto wins = WinTotals(dataset);
  Eigen::VectorXd scores(dataset.num_players());
  for (int v = 0; v < dataset.num_players(); ++v) {
    scores[v] = static_cast<double>(wins[v]);
  }
  return scores;
}

Eigen::VectorXd WeightedBordaScores(const ComparisonDataset& dataset) {
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(dataset.num_players());
  for (const PairCount& pc : dataset.pairs()) {
    const double share = static_cast<double>(pc.wins) / static_cast<double>(pc.matches);
    scores[pc.i] += share;
    scores[pc.j] += 1.0 - share;
  }
  return scores;
}

Eigen::VectorXd RanksFromScores(const Eigen::VectorXd& scores,
                                bool higher_is_better) {
  const Eigen::Index n = scores.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return higher_is_better ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  Eigen::VectorXd ranks(n);
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && scores[order[end]] == scores[order[start]]) ++end;
    // Positions start..end-1 hold ranks start+1..end.
    const double shared = 0.5 * static_cast<double>(start + 1 + end);
    for (Eigen::Index k = start; k < end; ++k) ranks[order[k]] = shared;
    start = end;
  }
  return ranks;
}

double KendallTau(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "Kendall tau needs vectors of equal length");
  }
  const size_t n = static_cast<size_t>(a.size());
  if (n < 2) {
    throw Error(ErrorCode::kInvalidInput, "Kendall tau needs two entries");
  }
  std::vector<std::pair<double, double>> joint(n);
  for (size_t k = 0; k < n; ++k) joint[k] = {a[k], b[k]};
  std::sort(joint.begin(), joint.end());

  // Knight's algorithm: ties in a, joint ties, then inversions of b.
  std::int64_t ties_a = 0, ties_joint = 0, ties_b = 0;
  for (size_t start = 0; start < n;) {
    size_t end = start + 1;
    while (end < n && joint[end].first == joint[start].first) ++end;
    ties_a += TiedPairs(static_cast<std::int64_t>(end - start));
    for (size_t s = start; s < end;) {
      size_t e = s + 1;
      while (e < end && joint[e].second == joint[s].second) ++e;
      ties_joint += TiedPairs(static_cast<std::int64_t>(e - s));
      s = e;
    }
    start = end;
  }
  std::vector<double> second(n), scratch(n);
  for (size_t k = 0; k < n; ++k) second[k] = joint[k].second;
  const std::int64_t swaps = SortCountingInversions(second, scratch, 0, n);
  for (size_t start = 0; start < n;) {
    size_t end = start + 1;
    while (end < n && second[end] == second[start]) ++end;
    ties_b += TiedPairs(static_cast<std::int64_t>(end - start));
    start = end;
  }

  const std::int64_t total = TiedPairs(static_cast<std::int64_t>(n));
  if (ties_a == total || ties_b == total) {
    throw Error(ErrorCode::kInvalidInput,
                "Kendall tau is undefined for a constant vector");
  }
  const double numerator = static_cast<double>(total - ties_a - ties_b +
                                               ties_joint - 2 * swaps);
  const double denominator = std::sqrt(static_cast<double>(total - ties_a)) *
                             std::sqrt(static_cast<double>(total - ties_b));
  return std::clamp(numerator / denominator, -1.0, 1.0);
}

RankingTable MakeRankingTable(Method method, const Eigen::VectorXd& scores) {
  return {method, scores, RanksFromScores(scores, /*higher_is_better=*/true)};
}

void WriteRankingCsv(std::ostream& out,
                     const std::vector<RankingTable>& tables,
                     const ComparisonDataset& dataset) {
  out << "method,label,score,rank\n";
  for (const RankingTable& table : tables) {
    for (int v = 0; v < dataset.num_players(); ++v) {
      out << MethodName(table.method) << ',';
      WriteCsvField(out, dataset.Label(v));
      out << ',' << FormatDouble(table.scores[v]) << ','
          << FormatDouble(table.ranks[v]) << '\n';
    }
  }
}

}  // namespace btrank
