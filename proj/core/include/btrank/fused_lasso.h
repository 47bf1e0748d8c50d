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

// Grouped-lasso Bradley-Terry estimation:
//
//   minimize  -loglik(theta) + lambda * sum_{i<j} |theta_i - theta_j|
//
// The penalty runs over every unordered pair of players, observed or not. As
// lambda grows, ratings fuse into fewer groups; at lambda_max everyone shares
// one rating.
//
// The penalty is applied on the log-ability scale. The likelihood only sees
// rating differences, so a penalty on alpha = exp(theta) would interact with
// the arbitrary scale of alpha; on theta both terms are shift invariant.
// Solutions are computed with sum(theta) = 0 and reported with theta_0 = 0.

#ifndef BTRANK_FUSED_LASSO_H_
#define BTRANK_FUSED_LASSO_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "btrank/comparisons.h"

namespace btrank {

struct LassoOptions {
  // Bound on the per-coordinate subgradient residual at the solution.
  double tol = 1e-6;
  // Ratings within group_tol * max(1, max|theta|) of each other are fused.
  double group_tol = 1e-6;
  // Each round runs `prox_iterations` accelerated proximal-gradient steps and
  // then Newton on the group structure they identified.
  int max_rounds = 60;
  int prox_iterations = 200;
  int newton_iterations = 100;
};

struct LassoSolution {
  double lambda = 0.0;
  // Ratings on the alpha scale, alpha_0 = 1.
  Eigen::VectorXd alpha;
  // log(alpha), theta_0 = 0.
  Eigen::VectorXd theta;
  // Group id per player; group 0 holds the highest rating.
  std::vector<int> group;
  int num_groups = 0;
  double loglik = 0.0;
  double bic = 0.0;
  double objective = 0.0;
  double certificate = 0.0;

  std::vector<std::vector<int>> Groups() const;
};

struct LassoPath {
  // Strictly increasing lambda.
  std::vector<LassoSolution> solutions;
  // Points where the number of groups increased along the path.
  std::vector<std::string> warnings;
};

// sum_{i<j} |v_i - v_j|, computed from the sorted values.
double Penalty(const Eigen::VectorXd& values);

// argmin_x 0.5 * ||x - v||^2 + scale * Penalty(x).
Eigen::VectorXd ProxPenalty(const Eigen::VectorXd& v, double scale);

double PenalizedObjective(const Eigen::VectorXd& theta,
                          const ComparisonDataset& dataset, double lambda);

// Fuses ratings within the grouping tolerance. Ids are assigned from the top
// rating down.
std::vector<int> GroupRatings(const Eigen::VectorXd& theta, double group_tol,
                              int* num_groups = nullptr);

// Largest per-coordinate violation of the subgradient optimality condition at
// theta, in units of the log-likelihood gradient. Zero at the exact optimum.
double OptimalityCertificate(const ComparisonDataset& dataset,
                             const Eigen::VectorXd& theta, double lambda,
                             double group_tol);

// Throws Error(kDisconnected) for disconnected data, Error(kDivergent) at
// lambda = 0 when the plain maximum likelihood ratings diverge, and
// Error(kNotConverged) when the certificate is not met after max_rounds.
LassoSolution FitPenalized(const ComparisonDataset& dataset, double lambda,
                           const LassoOptions& options = {},
                           const Eigen::VectorXd* warm_start = nullptr);

// Smallest lambda at which equal ratings for everyone are optimal.
double CollapseLambda(const ComparisonDataset& dataset);

// Smallest power of two at which the fit has a single group.
double LambdaMax(const ComparisonDataset& dataset);

// 0 followed by points-1 log-spaced values from 1e-3 * LambdaMax to LambdaMax.
std::vector<double> DefaultLambdaGrid(const ComparisonDataset& dataset,
                                      int points = 51);

// Warm-started fits along `lambdas`, which must be strictly increasing and
// non-negative. Solver errors are rethrown with the failing lambda.
LassoPath SolvePath(const ComparisonDataset& dataset,
                    const std::vector<double>& lambdas,
                    const LassoOptions& options = {});

// -2 loglik + num_groups * log(n).
double Bic(const LassoSolution& solution, std::int64_t total_matches);

// Minimum-BIC solution; ties go to the larger lambda.
const LassoSolution& SelectLambda(const LassoPath& path);

// Columns lambda, player_label, alpha, group_id.
void WritePathCsv(std::ostream& out, const LassoPath& path,
                  const ComparisonDataset& dataset);

// Columns lambda, k, loglik, bic, selected.
void WritePathSummaryCsv(std::ostream& out, const LassoPath& path);

}  // namespace btrank

#endif  // BTRANK_FUSED_LASSO_H_
