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

// Kiefer-Wolfowitz nonparametric maximum likelihood for the distribution of
// ratings, and the empirical Bayes rules built on it.
//
// The MLE ratings are treated as a Gaussian sequence: theta_hat_i is normal
// around the true rating theta_i with known scale sigma_hat_i, and theta_i is
// drawn from an unknown G. G is estimated on a fixed grid of atoms by
// maximizing sum_i log f_G(theta_hat_i), with
//
//   f_G(x) = sum_k g_k phi((x - t_k) / sigma) / sigma.
//
// Everything here works on the log-ability scale.

#ifndef BTRANK_NPMLE_H_
#define BTRANK_NPMLE_H_

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "btrank/btmle.h"
#include "btrank/comparisons.h"

namespace btrank {

// Variance assigned to the anchor player, whose rating is fixed by
// convention. Also the ridge added to singular 2x2 covariance blocks.
inline constexpr double kAnchorVariance = 1e-10;

struct MixingDistribution {
  // Strictly increasing support points.
  Eigen::VectorXd atoms;
  // Probability masses, summing to one. Zero masses are allowed.
  Eigen::VectorXd weights;

  double Mean() const { return atoms.dot(weights); }
  // Atoms with positive mass only.
  MixingDistribution Support() const;
};

struct GaussianObservations {
  Eigen::VectorXd theta_hat;
  Eigen::VectorXd sigma_hat;

  int size() const { return static_cast<int>(theta_hat.size()); }
};

struct GridSpec {
  int num_atoms = 301;
  // The grid spans [min theta_hat - margin * max sigma_hat,
  //                 max theta_hat + margin * max sigma_hat].
  double sigma_margin = 3.0;
};

struct NpmleOptions {
  // Stop once max_t D(t) <= p (1 + kkt_tol) and |D(t) / p - 1| <= kkt_tol on
  // the support.
  double kkt_tol = 1e-6;
  int max_iter = 500;
};

struct NpmleDiagnostics {
  double log_likelihood = 0.0;
  double kkt_gap = 0.0;
  int iterations = 0;
};

// Free coordinates of an MLE fit: theta[1..p] with their standard errors.
GaussianObservations ObservationsFromFit(const FitResult& fit);

// Throws Error(kInvalidInput) on mismatched lengths or non-positive scales.
void ValidateObservations(const GaussianObservations& obs);

Eigen::VectorXd MakeGrid(const GaussianObservations& obs,
                         const GridSpec& spec = {});

double NormalDensity(double x, double mean, double sd);

double MarginalDensity(const MixingDistribution& g, double theta_hat,
                       double sigma_hat);

// sum_i log f_G(theta_hat_i).
double MixtureLogLikelihood(const MixingDistribution& g,
                            const GaussianObservations& obs);

// D(t_k) = sum_i phi_sigma_i(theta_hat_i - t_k) / f_G(theta_hat_i) at every
// atom of g. At the NPMLE, D <= p everywhere with equality on the support.
Eigen::VectorXd GradientFunctional(const MixingDistribution& g,
                                   const GaussianObservations& obs);

// max_k D(t_k) / p - 1.
double KktGap(const MixingDistribution& g, const GaussianObservations& obs);

// Constrained Newton iterations: each step minimizes the quadratic expansion
// of the log-likelihood over non-negative weights on the current support and
// the local maxima of D, followed by a backtracking line search. Throws
// Error(kNotConverged) with the final KKT gap.
MixingDistribution FitNpmle(const GaussianObservations& obs,
                            const GridSpec& grid = {},
                            const NpmleOptions& options = {},
                            NpmleDiagnostics* diagnostics = nullptr);

MixingDistribution FitNpmleOnGrid(const GaussianObservations& obs,
                                  const Eigen::VectorXd& atoms,
                                  const NpmleOptions& options = {},
                                  NpmleDiagnostics* diagnostics = nullptr);

// Bayes rule E[theta | theta_hat] under g.
double PosteriorMean(const MixingDistribution& g, double theta_hat,
                     double sigma_hat);

Eigen::VectorXd PosteriorMeans(const MixingDistribution& g,
                               const GaussianObservations& obs);

// 1.06 * sd(theta_hat) * p^(-1/5).
double DefaultBandwidth(const GaussianObservations& obs);

// Posterior mean when every atom of g is spread into a normal bump of sd
// `bandwidth`: the effective kernel variance is sigma_hat^2 + bandwidth^2 and
// each bump contributes t_k + (theta_hat - t_k) h^2 / (sigma_hat^2 + h^2).
double SmoothedPosteriorMean(const MixingDistribution& g, double theta_hat,
                             double sigma_hat, double bandwidth);

Eigen::VectorXd SmoothedPosteriorMeans(const MixingDistribution& g,
                                       const GaussianObservations& obs,
                                       double bandwidth);

// g convolved with a normal of sd `bandwidth`, discretized back onto the
// atoms of g.
MixingDistribution SmoothMixing(const MixingDistribution& g, double bandwidth);

enum class TieRule {
  // P(alpha_i >= alpha_j): a shared atom counts fully for both players.
  kWeak,
  // P(alpha_i > alpha_j) + P(alpha_i == alpha_j) / 2; ranks sum to
  // n (n - 1) / 2.
  kHalf,
};

// P(alpha_i >= alpha_j | theta_hat_i, theta_hat_j) for every ordered pair,
// with the pair's bivariate normal likelihood (covariance from the fit) and
// prior g x g. The diagonal is zero.
Eigen::MatrixXd PosteriorOrderProbabilities(const MixingDistribution& g,
                                            const FitResult& fit,
                                            TieRule ties = TieRule::kWeak);

// R_i = sum_{j != i} P(alpha_i >= alpha_j | data), for every player including
// the anchor. Larger is better; values lie in [0, n - 1].
Eigen::VectorXd PosteriorMeanRanks(const MixingDistribution& g,
                                   const FitResult& fit,
                                   TieRule ties = TieRule::kWeak);

// Posterior mean for every player, anchor included with kAnchorVariance.
Eigen::VectorXd PlayerPosteriorMeans(const MixingDistribution& g,
                                     const FitResult& fit);
Eigen::VectorXd PlayerSmoothedPosteriorMeans(const MixingDistribution& g,
                                             const FitResult& fit,
                                             double bandwidth);

struct PosteriorSummary {
  Eigen::VectorXd post_mean;
  Eigen::VectorXd post_mean_smoothed;
  double bandwidth = 0.0;
  Eigen::VectorXd post_rank;
};

// Columns atom, weight.
void WriteMixingCsv(std::ostream& out, const MixingDistribution& g);

// Columns label, theta_hat, se, post_mean, post_mean_smoothed, post_rank.
void WritePosteriorCsv(std::ostream& out, const ComparisonDataset& dataset,
                       const FitResult& fit, const PosteriorSummary& summary);

}  // namespace btrank

#endif  // BTRANK_NPMLE_H_
