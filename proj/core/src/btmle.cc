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

#include "btrank/btmle.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "btrank/error.h"

namespace btrank {
namespace {

// log(1 / (1 + exp(-x))).
double LogSigmoid(double x) {
  return -(std::max(-x, 0.0) + std::log1p(std::exp(-std::abs(x))));
}

void CheckDimension(const Eigen::VectorXd& theta,
                    const ComparisonDataset& dataset) {
  if (theta.size() != dataset.num_players()) {
    throw Error(ErrorCode::kInvalidInput,
                "rating vector has " + std::to_string(theta.size()) +
                    " entries for " + std::to_string(dataset.num_players()) +
                    " players");
  }
}

std::vector<int> DivergentPlayers(const ComparisonDataset& dataset) {
  const auto wins = WinTotals(dataset);
  const auto totals = MatchTotals(dataset);
  std::vector<int> culprits;
  for (int v = 0; v < dataset.num_players(); ++v) {
    if (wins[v] == 0 || wins[v] == totals[v]) culprits.push_back(v);
  }
  if (!culprits.empty()) return culprits;
  // Every player won and lost something, yet some group beat (or lost to)
  // everyone outside it. Name everyone outside the largest such group.
  const auto components = WinGraphComponents(dataset);
  const auto largest = std::max_element(
      components.begin(), components.end(),
      [](const auto& a, const auto& b) { return a.size() < b.size(); });
  for (auto it = components.begin(); it != components.end(); ++it) {
    if (it == largest) continue;
    culprits.insert(culprits.end(), it->begin(), it->end());
  }
  std::sort(culprits.begin(), culprits.end());
  return culprits;
}

std::string PlayerList(const ComparisonDataset& dataset,
                       const std::vector<int>& players) {
  std::string out;
  const size_t shown = std::min<size_t>(players.size(), 10);
  for (size_t k = 0; k < shown; ++k) {
    if (k > 0) out += ", ";
    out += dataset.Label(players[k]);
  }
  if (players.size() > shown) {
    out += ", ... (" + std::to_string(players.size()) + " total)";
  }
  return out;
}

}  // namespace

double WinProbability(double theta_i, double theta_j) {
  const double d = theta_i - theta_j;
  if (d >= 0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

double LogLikelihood(const Eigen::VectorXd& theta,
                     const ComparisonDataset& dataset) {
  CheckDimension(theta, dataset);
  double total = 0.0;
  for (const PairCount& pc : dataset.pairs()) {
    const double d = theta[pc.i] - theta[pc.j];
    const double losses = static_cast<double>(pc.matches - pc.wins);
    if (pc.wins > 0) total += static_cast<double>(pc.wins) * LogSigmoid(d);
    if (losses > 0) total += losses * LogSigmoid(-d);
  }
  return total;
}

Eigen::VectorXd LogLikelihoodGradient(const Eigen::VectorXd& theta,
                                      const ComparisonDataset& dataset) {
  CheckDimension(theta, dataset);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
  for (const PairCount& pc : dataset.pairs()) {
    const double expected =
        static_cast<double>(pc.matches) * WinProbability(theta[pc.i], theta[pc.j]);
    const double residual = static_cast<double>(pc.wins) - expected;
    grad[pc.i] += residual;
    grad[pc.j] -= residual;
  }
  return grad;
}

Eigen::MatrixXd ObservedInformation(const Eigen::VectorXd& theta,
                                    const ComparisonDataset& dataset) {
  CheckDimension(theta, dataset);
  const Eigen::Index n = theta.size();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(n, n);
  for (const PairCount& pc : dataset.pairs()) {
    const double pi = WinProbability(theta[pc.i], theta[pc.j]);
    const double weight = static_cast<double>(pc.matches) * pi * (1.0 - pi);
    info(pc.i, pc.i) += weight;
    info(pc.j, pc.j) += weight;
    info(pc.i, pc.j) -= weight;
    info(pc.j, pc.i) -= weight;
  }
  return info;
}

FitResult FitMle(const ComparisonDataset& dataset,
                 const SolverOptions& options) {
  const int n = dataset.num_players();
  if (n < 1) throw Error(ErrorCode::kInvalidInput, "dataset has no players");
  FitResult fit;
  fit.theta = Eigen::VectorXd::Zero(n);
  const int p = n - 1;
  if (p == 0) {
    fit.se.resize(0);
    fit.cov.resize(0, 0);
    fit.converged = true;
    return fit;
  }

  const auto components = ConnectedComponents(dataset);
  if (components.size() > 1) {
    std::vector<int> outside;
    for (size_t c = 1; c < components.size(); ++c) {
      outside.insert(outside.end(), components[c].begin(),
                     components[c].end());
    }
    throw Error(ErrorCode::kDisconnected,
                "comparison graph has " + std::to_string(components.size()) +
                    " components; players not connected to the anchor: " +
                    PlayerList(dataset, outside),
                outside);
  }
  if (WinGraphComponents(dataset).size() > 1) {
    const auto culprits = DivergentPlayers(dataset);
    throw Error(ErrorCode::kDivergent,
                "maximum likelihood ratings diverge; players separated by "
                "all-win or all-loss records: " +
                    PlayerList(dataset, culprits),
                culprits);
  }

  double loglik = LogLikelihood(fit.theta, dataset);
  for (int iter = 0; iter <= options.max_iter; ++iter) {
    const Eigen::VectorXd grad =
        LogLikelihoodGradient(fit.theta, dataset).tail(p);
    if (grad.lpNorm<Eigen::Infinity>() <= options.tol) {
      fit.converged = true;
      fit.iterations = iter;
      break;
    }
    if (iter == options.max_iter) break;
    const Eigen::MatrixXd info =
        ObservedInformation(fit.theta, dataset).bottomRightCorner(p, p);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    const Eigen::VectorXd step = ldlt.solve(grad);

    // A full step may lose a few ulps of likelihood once the increase is below
    // rounding; that is still Newton's endgame, so accept it.
    const double slack = 1e-12 * (1.0 + std::abs(loglik));
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      Eigen::VectorXd candidate = fit.theta;
      candidate.tail(p) += scale * step;
      const double candidate_ll = LogLikelihood(candidate, dataset);
      if (candidate_ll >= loglik || (halving == 0 && candidate_ll >= loglik - slack)) {
        fit.theta = std::move(candidate);
        loglik = candidate_ll;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    fit.iterations = iter + 1;
    if (!accepted) break;
    if (fit.theta.lpNorm<Eigen::Infinity>() > options.theta_cap) {
      std::vector<int> culprits;
      for (int v = 0; v < n; ++v) {
        if (std::abs(fit.theta[v]) > options.theta_cap) culprits.push_back(v);
      }
      throw Error(ErrorCode::kDivergent,
                  "ratings exceeded the divergence cap for: " +
                      PlayerList(dataset, culprits),
                  culprits);
    }
  }
  if (!fit.converged) {
    const double gnorm = LogLikelihoodGradient(fit.theta, dataset)
                             .tail(p)
                             .lpNorm<Eigen::Infinity>();
    throw Error(ErrorCode::kNotConverged,
                "Newton iterations stopped after " +
                    std::to_string(fit.iterations) +
                    " steps with gradient max-norm " + std::to_string(gnorm));
  }

  const Eigen::MatrixXd info =
      ObservedInformation(fit.theta, dataset).bottomRightCorner(p, p);
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  fit.cov = llt.solve(Eigen::MatrixXd::Identity(p, p));
  fit.cov = 0.5 * (fit.cov + fit.cov.transpose()).eval();
  fit.se = fit.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.loglik = loglik;
  return fit;
}

Eigen::Matrix2d PairwiseCovariance(const FitResult& fit, int i, int j) {
  const int n = fit.num_players();
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw Error(ErrorCode::kInvalidInput, "player index out of range");
  }
  if (i == j) {
    throw Error(ErrorCode::kInvalidInput,
                "pairwise covariance needs two distinct players");
  }
  auto entry = [&](int a, int b) {
    return (a == 0 || b == 0) ? 0.0 : fit.cov(a - 1, b - 1);
  };
  Eigen::Matrix2d block;
  block << entry(i, i), entry(i, j), entry(j, i), entry(j, j);
  return block;
}

Eigen::MatrixXd FullCovariance(const FitResult& fit) {
  const int n = fit.num_players();
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, n);
  if (n > 1) full.bottomRightCorner(n - 1, n - 1) = fit.cov;
  return full;
}

nlohmann::json FitResultToJson(const FitResult& fit,
                               const ComparisonDataset& dataset) {
  const int n = fit.num_players();
  std::vector<std::string> labels(n);
  std::vector<double> theta(n), se(n, 0.0);
  for (int v = 0; v < n; ++v) {
    labels[v] = dataset.Label(v);
    theta[v] = fit.theta[v];
    if (v > 0) se[v] = fit.se[v - 1];
  }
  return {{"labels", labels},
          {"theta", theta},
          {"se", se},
          {"loglik", fit.loglik},
          {"converged", fit.converged}};
}

}  // namespace btrank
