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

// Count-based scores, rank construction, and rank agreement.

#ifndef BTRANK_SCORES_H_
#define BTRANK_SCORES_H_

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "btrank/comparisons.h"

namespace btrank {

enum class Method {
  kMle,             // MLE: logistic maximum likelihood
  kKwpm,            // KWPM: posterior mean ratings
  kKwpms,           // KWPMs: smoothed posterior means
  kKwpr,            // KWPR: posterior mean ranks
  kRmle,            // RMLE: grouped-lasso MLE at the BIC-selected lambda
  kBorda,           // B: win totals
  kWeightedBorda,   // WB: per-opponent win fractions
};

inline constexpr Method kAllMethods[] = {
    Method::kMle,  Method::kKwpm,  Method::kKwpms,         Method::kKwpr,
    Method::kRmle, Method::kBorda, Method::kWeightedBorda,
};

std::string_view MethodName(Method method);
std::optional<Method> ParseMethod(std::string_view name);

// score_i = w_i.
Eigen::VectorXd BordaScores(const ComparisonDataset& dataset);

// score_i = sum over opponents j of w_ij / n_ij. Under a complete design with
// equal n_ij this is the Borda score divided by n_ij.
Eigen::VectorXd WeightedBordaScores(const ComparisonDataset& dataset);

// 1-based ranks, 1 for the best score; tied scores share the average of the
// ranks they span.
Eigen::VectorXd RanksFromScores(const Eigen::VectorXd& scores,
                                bool higher_is_better = true);

// Kendall's tau-b. Throws Error(kInvalidInput) on a length mismatch, fewer
// than two entries, or a constant argument.
double KendallTau(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct RankingTable {
  Method method = Method::kMle;
  Eigen::VectorXd scores;
  Eigen::VectorXd ranks;
};

RankingTable MakeRankingTable(Method method, const Eigen::VectorXd& scores);

// Long format: method, label, score, rank.
void WriteRankingCsv(std::ostream& out,
                     const std::vector<RankingTable>& tables,
                     const ComparisonDataset& dataset);

}  // namespace btrank

#endif  // BTRANK_SCORES_H_
