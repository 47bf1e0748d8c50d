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

// Maximum likelihood Bradley-Terry ratings.
//
// With theta_i = log(alpha_i), player i beats j with probability
// 1 / (1 + exp(-(theta_i - theta_j))). Ratings are identified by fixing
// theta_0 = 0; the remaining p = num_players - 1 coordinates are free.

#ifndef BTRANK_BTMLE_H_
#define BTRANK_BTMLE_H_

#include <Eigen/Core>

#include "btrank/comparisons.h"
#include "json.hpp"

namespace btrank {

struct SolverOptions {
  // Max-norm of the log-likelihood gradient at which Newton stops.
  double tol = 1e-10;
  int max_iter = 100;
  // |theta_i| beyond this is treated as divergence to infinity.
  double theta_cap = 30.0;
};

struct FitResult {
  // num_players log-ratings with theta[0] == 0.
  Eigen::VectorXd theta;
  // Standard errors of the free coordinates theta[1..p].
  Eigen::VectorXd se;
  // Inverse observed information of the free coordinates (p x p).
  Eigen::MatrixXd cov;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;

  int num_players() const { return static_cast<int>(theta.size()); }
};

// Logistic win probability, evaluated without overflow.
double WinProbability(double theta_i, double theta_j);

// Binomial log-likelihood without the theta-free binomial coefficients. The
// value depends on theta only through differences.
double LogLikelihood(const Eigen::VectorXd& theta,
                     const ComparisonDataset& dataset);

// Gradient of LogLikelihood with respect to every coordinate of theta.
Eigen::VectorXd LogLikelihoodGradient(const Eigen::VectorXd& theta,
                                      const ComparisonDataset& dataset);

// Negative Hessian of LogLikelihood over all coordinates (a weighted graph
// Laplacian; singular along the all-ones direction).
Eigen::MatrixXd ObservedInformation(const Eigen::VectorXd& theta,
                                    const ComparisonDataset& dataset);

// Damped Newton with step halving, started at theta = 0.
//
// Throws Error(kDisconnected) when the comparison graph has several
// components, Error(kDivergent) when some players won or lost every match
// against the rest (the likelihood has no finite maximizer) or theta leaves
// the cap, and Error(kNotConverged) after max_iter iterations.
FitResult FitMle(const ComparisonDataset& dataset,
                 const SolverOptions& options = {});

// [[Var_i, Cov_ij], [Cov_ij, Var_j]] of (theta_i, theta_j). The anchor has
// zero variance.
Eigen::Matrix2d PairwiseCovariance(const FitResult& fit, int i, int j);

// Full num_players x num_players covariance with a zero row and column for the
// anchor.
Eigen::MatrixXd FullCovariance(const FitResult& fit);

// {labels, theta, se, loglik, converged}. `se` carries one entry per player,
// 0 for the anchor.
nlohmann::json FitResultToJson(const FitResult& fit,
                               const ComparisonDataset& dataset);

}  // namespace btrank

#endif  // BTRANK_BTMLE_H_
