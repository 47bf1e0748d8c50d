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

#include "btrank/npmle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "btrank/comparisons_io.h"
#include "btrank/error.h"
#include "btrank/format.h"
#include "btrank/nnls.h"

namespace btrank {
namespace {

constexpr double kLogSqrtTwoPi = 0.91893853320467274178;  // log(sqrt(2 pi))

double LogNormalKernel(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - kLogSqrtTwoPi;
}

// log sum_k g_k phi_sd(x - t_k) over atoms with positive mass.
double LogMarginal(const MixingDistribution& g, double x, double sd) {
  double peak = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < g.atoms.size(); ++k) {
    if (g.weights[k] <= 0.0) continue;
    peak = std::max(peak, std::log(g.weights[k]) + LogNormalKernel(x, g.atoms[k], sd));
  }
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < g.atoms.size(); ++k) {
    if (g.weights[k] <= 0.0) continue;
    sum += std::exp(std::log(g.weights[k]) +
                    LogNormalKernel(x, g.atoms[k], sd) - peak);
  }
  return peak + std::log(sum);
}

void ValidateMixing(const MixingDistribution& g) {
  if (g.atoms.size() != g.weights.size() || g.atoms.size() == 0) {
    throw Error(ErrorCode::kInvalidInput,
                "mixing distribution needs matching, non-empty atoms and "
                "weights");
  }
}

// Posterior-weighted average of `value(k)` with log-weights
// log g_k + log phi_sd(x - t_k).
template <typename Value>
double PosteriorAverage(const MixingDistribution& g, double x, double sd,
                        Value value) {
  ValidateMixing(g);
  double peak = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < g.atoms.size(); ++k) {
    if (g.weights[k] <= 0.0) continue;
    const double z = (x - g.atoms[k]) / sd;
    peak = std::max(peak, std::log(g.weights[k]) - 0.5 * z * z);
  }
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index k = 0; k < g.atoms.size(); ++k) {
    if (g.weights[k] <= 0.0) continue;
    const double z = (x - g.atoms[k]) / sd;
    const double w = std::exp(std::log(g.weights[k]) - 0.5 * z * z - peak);
    num += w * value(k);
    den += w;
  }
  return num / den;
}

double PlayerSd(const FitResult& fit, int player) {
  const double anchor_sd = std::sqrt(kAnchorVariance);
  if (player == 0) return anchor_sd;
  const double se = fit.se[player - 1];
  return se > 0.0 ? se : anchor_sd;
}

}  // namespace

MixingDistribution MixingDistribution::Support() const {
  MixingDistribution out;
  const Eigen::Index count = (weights.array() > 0.0).count();
  out.atoms.resize(count);
  out.weights.resize(count);
  Eigen::Index next = 0;
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    if (weights[k] > 0.0) {
      out.atoms[next] = atoms[k];
      out.weights[next] = weights[k];
      ++next;
    }
  }
  return out;
}

GaussianObservations ObservationsFromFit(const FitResult& fit) {
  const int p = fit.num_players() - 1;
  GaussianObservations obs;
  obs.theta_hat = p > 0 ? Eigen::VectorXd(fit.theta.tail(p)) : Eigen::VectorXd();
  obs.sigma_hat = fit.se;
  return obs;
}

void ValidateObservations(const GaussianObservations& obs) {
  if (obs.theta_hat.size() != obs.sigma_hat.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "theta_hat and sigma_hat differ in length");
  }
  if (obs.size() < 1) {
    throw Error(ErrorCode::kInvalidInput, "no observations");
  }
  for (Eigen::Index i = 0; i < obs.sigma_hat.size(); ++i) {
    if (!(obs.sigma_hat[i] > 0.0) || !std::isfinite(obs.theta_hat[i])) {
      throw Error(ErrorCode::kInvalidInput,
                  "observation " + std::to_string(i) +
                      " needs a finite estimate and a positive scale");
    }
  }
}

Eigen::VectorXd MakeGrid(const GaussianObservations& obs,
                         const GridSpec& spec) {
  ValidateObservations(obs);
  if (spec.num_atoms < 1) {
    throw Error(ErrorCode::kInvalidInput, "grid needs at least one atom");
  }
  const double margin = spec.sigma_margin * obs.sigma_hat.maxCoeff();
  const double lo = obs.theta_hat.minCoeff() - margin;
  const double hi = obs.theta_hat.maxCoeff() + margin;
  if (spec.num_atoms == 1 || hi <= lo) {
    return Eigen::VectorXd::Constant(1, 0.5 * (lo + hi));
  }
  return Eigen::VectorXd::LinSpaced(spec.num_atoms, lo, hi);
}

double NormalDensity(double x, double mean, double sd) {
  return std::exp(LogNormalKernel(x, mean, sd));
}

double MarginalDensity(const MixingDistribution& g, double theta_hat,
                       double sigma_hat) {
  ValidateMixing(g);
  double total = 0.0;
  for (Eigen::Index k = 0; k < g.atoms.size(); ++k) {
    total += g.weights[k] * NormalDensity(theta_hat, g.atoms[k], sigma_hat);
  }
  return total;
}

double MixtureLogLikelihood(const MixingDistribution& g,
                            const GaussianObservations& obs) {
  ValidateMixing(g);
  ValidateObservations(obs);
  double total = 0.0;
  for (int i = 0; i < obs.size(); ++i) {
    total += LogMarginal(g, obs.theta_hat[i], obs.sigma_hat[i]);
  }
  return total;
}

Eigen::VectorXd GradientFunctional(const MixingDistribution& g,
                                   const GaussianObservations& obs) {
  ValidateMixing(g);
  ValidateObservations(obs);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(g.atoms.size());
  for (int i = 0; i < obs.size(); ++i) {
    const double log_f = LogMarginal(g, obs.theta_hat[i], obs.sigma_hat[i]);
    for (Eigen::Index k = 0; k < g.atoms.size(); ++k) {
      d[k] += std::exp(
          LogNormalKernel(obs.theta_hat[i], g.atoms[k], obs.sigma_hat[i]) -
          log_f);
    }
  }
  return d;
}

double KktGap(const MixingDistribution& g, const GaussianObservations& obs) {
  return GradientFunctional(g, obs).maxCoeff() / obs.size() - 1.0;
}

MixingDistribution FitNpmle(const GaussianObservations& obs,
                            const GridSpec& grid, const NpmleOptions& options,
                            NpmleDiagnostics* diagnostics) {
  return FitNpmleOnGrid(obs, MakeGrid(obs, grid), options, diagnostics);
}

MixingDistribution FitNpmleOnGrid(const GaussianObservations& obs,
                                  const Eigen::VectorXd& atoms,
                                  const NpmleOptions& options,
                                  NpmleDiagnostics* diagnostics) {
  ValidateObservations(obs);
  const int p = obs.size();
  const Eigen::Index m = atoms.size();
  if (m < 1) throw Error(ErrorCode::kInvalidInput, "empty grid");
  for (Eigen::Index k = 1; k < m; ++k) {
    if (!(atoms[k] > atoms[k - 1])) {
      throw Error(ErrorCode::kInvalidInput, "grid must be strictly increasing");
    }
  }

  // Kernel rows scaled to a maximum of one; D(t) and the maximizer do not
  // depend on row scaling.
  Eigen::MatrixXd kernel(p, m);
  for (int i = 0; i < p; ++i) {
    double peak = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < m; ++k) {
      const double z = (obs.theta_hat[i] - atoms[k]) / obs.sigma_hat[i];
      kernel(i, k) = -0.5 * z * z;
      peak = std::max(peak, kernel(i, k));
    }
    kernel.row(i) = (kernel.row(i).array() - peak).exp();
  }

  auto objective = [&](const Eigen::VectorXd& w) {
    return (kernel * w).array().log().sum();
  };

  Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));

  double gap = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    const Eigen::VectorXd f = kernel * w;
    const Eigen::MatrixXd scaled = f.cwiseInverse().asDiagonal() * kernel;
    const Eigen::VectorXd d = scaled.colwise().sum().transpose();
    gap = d.maxCoeff() / p - 1.0;
    double support_gap = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      if (w[k] > 0.0) support_gap = std::max(support_gap, std::abs(d[k] / p - 1.0));
    }
    if (gap <= options.kkt_tol && support_gap <= options.kkt_tol) break;

    // Newton step: with s = S w', the quadratic expansion of sum log f plus
    // the multiplier p of the mass constraint gives
    //   min 0.5 ||S w' - 2||^2 + p sum(w'),  w' >= 0,
    // solved over the current support and the local maxima of D above p.
    std::vector<Eigen::Index> active;
    for (Eigen::Index k = 0; k < m; ++k) {
      const bool peak = d[k] > p && (k == 0 || d[k] >= d[k - 1]) &&
                        (k + 1 == m || d[k] >= d[k + 1]);
      if (w[k] > 0.0 || peak) active.push_back(k);
    }
    Eigen::MatrixXd columns(p, static_cast<Eigen::Index>(active.size()));
    Eigen::VectorXd linear(columns.cols());
    for (size_t c = 0; c < active.size(); ++c) {
      columns.col(c) = scaled.col(active[c]);
      linear[c] = 2.0 * d[active[c]] - p;
    }
    const Eigen::VectorXd x =
        NonNegativeQuadratic(columns.transpose() * columns, linear);
    Eigen::VectorXd target = Eigen::VectorXd::Zero(m);
    for (size_t c = 0; c < active.size(); ++c) target[active[c]] = x[c];
    const double mass = target.sum();
    Eigen::VectorXd direction;
    double slope = 0.0;
    if (mass > 0.0) {
      target /= mass;
      direction = target - w;
      slope = d.dot(direction);
    }
    if (!(slope > 0.0)) {
      // EM step as a fallback; it never decreases the likelihood.
      w = (w.array() * d.array() / p).matrix();
      w /= w.sum();
      continue;
    }
    const double base = objective(w);
    double step = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 50; ++halving) {
      const Eigen::VectorXd candidate = w + step * direction;
      if (objective(candidate) >= base + step * slope / 3.0) {
        w = candidate;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      w = (w.array() * d.array() / p).matrix();
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      if (w[k] < 1e-13) w[k] = 0.0;
    }
    w /= w.sum();
  }

  MixingDistribution g{atoms, w};
  if (diagnostics != nullptr) {
    diagnostics->log_likelihood = MixtureLogLikelihood(g, obs);
    diagnostics->kkt_gap = gap;
    diagnostics->iterations = iter;
  }
  if (iter == options.max_iter) {
    throw Error(ErrorCode::kNotConverged,
                "NPMLE stopped after " + std::to_string(iter) +
                    " iterations with KKT gap " + FormatDouble(gap));
  }
  return g;
}

double PosteriorMean(const MixingDistribution& g, double theta_hat,
                     double sigma_hat) {
  return PosteriorAverage(g, theta_hat, sigma_hat,
                          [&](Eigen::Index k) { return g.atoms[k]; });
}

Eigen::VectorXd PosteriorMeans(const MixingDistribution& g,
                               const GaussianObservations& obs) {
  ValidateObservations(obs);
  Eigen::VectorXd out(obs.size());
  for (int i = 0; i < obs.size(); ++i) {
    out[i] = PosteriorMean(g, obs.theta_hat[i], obs.sigma_hat[i]);
  }
  return out;
}

double DefaultBandwidth(const GaussianObservations& obs) {
  const int p = obs.size();
  if (p < 2) return 1e-6;
  const double mean = obs.theta_hat.mean();
  const double var =
      (obs.theta_hat.array() - mean).square().sum() / static_cast<double>(p - 1);
  const double h = 1.06 * std::sqrt(var) * std::pow(static_cast<double>(p), -0.2);
  return h > 0.0 ? h : 1e-6;
}

double SmoothedPosteriorMean(const MixingDistribution& g, double theta_hat,
                             double sigma_hat, double bandwidth) {
  if (!(bandwidth > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "bandwidth must be positive");
  }
  const double h2 = bandwidth * bandwidth;
  const double total_var = sigma_hat * sigma_hat + h2;
  const double pull = h2 / total_var;
  return PosteriorAverage(g, theta_hat, std::sqrt(total_var),
                          [&](Eigen::Index k) {
                            return g.atoms[k] + (theta_hat - g.atoms[k]) * pull;
                          });
}

Eigen::VectorXd SmoothedPosteriorMeans(const MixingDistribution& g,
                                       const GaussianObservations& obs,
                                       double bandwidth) {
  ValidateObservations(obs);
  Eigen::VectorXd out(obs.size());
  for (int i = 0; i < obs.size(); ++i) {
    out[i] = SmoothedPosteriorMean(g, obs.theta_hat[i], obs.sigma_hat[i],
                                   bandwidth);
  }
  return out;
}

MixingDistribution SmoothMixing(const MixingDistribution& g, double bandwidth) {
  ValidateMixing(g);
  if (!(bandwidth > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "bandwidth must be positive");
  }
  MixingDistribution out{g.atoms, Eigen::VectorXd::Zero(g.atoms.size())};
  for (Eigen::Index l = 0; l < g.atoms.size(); ++l) {
    for (Eigen::Index k = 0; k < g.atoms.size(); ++k) {
      const double z = (g.atoms[l] - g.atoms[k]) / bandwidth;
      out.weights[l] += g.weights[k] * std::exp(-0.5 * z * z);
    }
  }
  out.weights /= out.weights.sum();
  return out;
}

Eigen::MatrixXd PosteriorOrderProbabilities(const MixingDistribution& g,
                                            const FitResult& fit,
                                            TieRule ties) {
  ValidateMixing(g);
  const MixingDistribution support = g.Support();
  const Eigen::Index s = support.atoms.size();
  const Eigen::VectorXd log_w = support.weights.array().log();
  const int n = fit.num_players();
  Eigen::MatrixXd prob = Eigen::MatrixXd::Zero(n, n);
  const double tie_share = ties == TieRule::kWeak ? 1.0 : 0.5;

  std::vector<double> terms(static_cast<size_t>(s * s));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Eigen::Matrix2d cov = PairwiseCovariance(fit, i, j);
      const double scale = std::max(cov(0, 0), cov(1, 1));
      if (cov.determinant() <= 1e-12 * scale * scale) {
        cov.diagonal().array() += kAnchorVariance;
      }
      // Factor the pair density through the better-determined player:
      // quad = a^2 / v1 + (b - (c / v1) a)^2 / s2 with s2 = v2 - c^2 / v1.
      // The first term is shifted by its minimum over atoms, computed as a
      // product of differences, so a near-singular v1 (the anchor) does not
      // swamp the second term in rounding error.
      const bool i_first = cov(0, 0) <= cov(1, 1);
      const double v1 = i_first ? cov(0, 0) : cov(1, 1);
      const double v2 = i_first ? cov(1, 1) : cov(0, 0);
      const double slope = cov(0, 1) / v1;
      const double s2 = v2 - cov(0, 1) * slope;
      const double x1 = i_first ? fit.theta[i] : fit.theta[j];
      const double x2 = i_first ? fit.theta[j] : fit.theta[i];
      double near = x1 - support.atoms[0];
      for (Eigen::Index k = 1; k < s; ++k) {
        const double d = x1 - support.atoms[k];
        if (std::abs(d) < std::abs(near)) near = d;
      }
      double peak = -std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 0; k < s; ++k) {
        const double a = x1 - support.atoms[k];
        const double first = (a - near) * (a + near) / v1;
        for (Eigen::Index l = 0; l < s; ++l) {
          const double r = x2 - support.atoms[l] - slope * a;
          const double t = log_w[k] + log_w[l] - 0.5 * (first + r * r / s2);
          // Store in (atom of i, atom of j) order.
          terms[i_first ? k * s + l : l * s + k] = t;
          peak = std::max(peak, t);
        }
      }
      // Atoms are strictly increasing, so k > l means alpha_i > alpha_j.
      double above = 0.0, below = 0.0, tied = 0.0;
      for (Eigen::Index k = 0; k < s; ++k) {
        for (Eigen::Index l = 0; l < s; ++l) {
          const double w = std::exp(terms[k * s + l] - peak);
          if (k > l) {
            above += w;
          } else if (k < l) {
            below += w;
          } else {
            tied += w;
          }
        }
      }
      const double total = above + below + tied;
      prob(i, j) = (above + tie_share * tied) / total;
      prob(j, i) = (below + tie_share * tied) / total;
    }
  }
  return prob;
}

Eigen::VectorXd PosteriorMeanRanks(const MixingDistribution& g,
                                   const FitResult& fit, TieRule ties) {
  return PosteriorOrderProbabilities(g, fit, ties).rowwise().sum();
}

Eigen::VectorXd PlayerPosteriorMeans(const MixingDistribution& g,
                                     const FitResult& fit) {
  Eigen::VectorXd out(fit.num_players());
  for (int v = 0; v < fit.num_players(); ++v) {
    out[v] = PosteriorMean(g, fit.theta[v], PlayerSd(fit, v));
  }
  return out;
}

Eigen::VectorXd PlayerSmoothedPosteriorMeans(const MixingDistribution& g,
                                             const FitResult& fit,
                                             double bandwidth) {
  Eigen::VectorXd out(fit.num_players());
  for (int v = 0; v < fit.num_players(); ++v) {
    out[v] = SmoothedPosteriorMean(g, fit.theta[v], PlayerSd(fit, v), bandwidth);
  }
  return out;
}

void WriteMixingCsv(std::ostream& out, const MixingDistribution& g) {
  out << "atom,weight\n";
  for (Eigen::Index k = 0; k < g.atoms.size(); ++k) {
    out << FormatDouble(g.atoms[k]) << ',' << FormatDouble(g.weights[k]) << '\n';
  }
}

void WritePosteriorCsv(std::ostream& out, const ComparisonDataset& dataset,
                       const FitResult& fit, const PosteriorSummary& summary) {
  out << "label,theta_hat,se,post_mean,post_mean_smoothed,post_rank\n";
  for (int v = 0; v < fit.num_players(); ++v) {
    WriteCsvField(out, dataset.Label(v));
    const double se = v == 0 ? 0.0 : fit.se[v - 1];
    out << ',' << FormatDouble(fit.theta[v]) << ',' << FormatDouble(se) << ','
        << FormatDouble(summary.post_mean[v]) << ','
        << FormatDouble(summary.post_mean_smoothed[v]) << ','
        << FormatDouble(summary.post_rank[v]) << '\n';
  }
}

}  // namespace btrank
