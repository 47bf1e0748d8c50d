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

#include "btrank/fused_lasso.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include <Eigen/Cholesky>

#include "btrank/btmle.h"
#include "btrank/comparisons_io.h"
#include "btrank/error.h"
#include "btrank/format.h"

namespace btrank {
namespace {

std::vector<int> SortedOrder(const Eigen::VectorXd& v, bool descending) {
  std::vector<int> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return descending ? v[a] > v[b] : v[a] < v[b];
  });
  return order;
}

double GroupingScale(const Eigen::VectorXd& theta, double group_tol) {
  const double spread =
      theta.size() == 0 ? 0.0 : theta.cwiseAbs().maxCoeff();
  return group_tol * std::max(1.0, spread);
}

// Accelerated proximal gradient with restart whenever the objective goes up.
void ProximalGradient(const ComparisonDataset& dataset, double lambda,
                      double lipschitz, int iterations,
                      Eigen::VectorXd& theta) {
  const double step = 1.0 / lipschitz;
  Eigen::VectorXd x = theta;
  Eigen::VectorXd y = x;
  double fx = PenalizedObjective(x, dataset, lambda);
  double momentum = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd grad = -LogLikelihoodGradient(y, dataset);
    Eigen::VectorXd next = ProxPenalty(y - step * grad, step * lambda);
    const double f_next = PenalizedObjective(next, dataset, lambda);
    if (f_next > fx) {
      momentum = 1.0;
      y = x;
      continue;
    }
    const double momentum_next =
        0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    y = next + ((momentum - 1.0) / momentum_next) * (next - x);
    x = std::move(next);
    fx = f_next;
    momentum = momentum_next;
  }
  theta = x;
}

// Newton's method on the group values with the grouping held fixed. Given the
// order of the groups the penalty is linear in the group values, so the
// reduced objective is smooth until two groups meet; a step that reaches a
// meeting point fuses the two groups.
void PolishGroups(const ComparisonDataset& dataset, double lambda,
                  const LassoOptions& options, Eigen::VectorXd& theta) {
  const int n = static_cast<int>(theta.size());
  int num_groups = 0;
  const std::vector<int> group =
      GroupRatings(theta, options.group_tol, &num_groups);
  // Blocks in ascending order of rating.
  std::vector<std::vector<int>> blocks(num_groups);
  for (int v = 0; v < n; ++v) blocks[num_groups - 1 - group[v]].push_back(v);
  std::vector<double> value(num_groups);
  for (int a = 0; a < num_groups; ++a) {
    double sum = 0.0;
    for (int v : blocks[a]) sum += theta[v];
    value[a] = sum / static_cast<double>(blocks[a].size());
  }

  auto expand = [&](const std::vector<double>& values) {
    Eigen::VectorXd out(n);
    for (size_t a = 0; a < blocks.size(); ++a) {
      for (int v : blocks[a]) out[v] = values[a];
    }
    return out;
  };

  for (int iter = 0; iter < options.newton_iterations; ++iter) {
    const int k = static_cast<int>(blocks.size());
    if (k <= 1) break;
    std::vector<int> block_of(n);
    for (int a = 0; a < k; ++a) {
      for (int v : blocks[a]) block_of[v] = a;
    }
    const Eigen::VectorXd current = expand(value);
    const Eigen::VectorXd grad = -LogLikelihoodGradient(current, dataset);

    Eigen::VectorXd reduced = Eigen::VectorXd::Zero(k);
    int below = 0;
    for (int a = 0; a < k; ++a) {
      const int size = static_cast<int>(blocks[a].size());
      const int above = n - below - size;
      for (int v : blocks[a]) reduced[a] += grad[v];
      reduced[a] += lambda * size * static_cast<double>(below - above);
      below += size;
    }
    if (reduced.lpNorm<Eigen::Infinity>() <= 1e-3 * options.tol) break;

    Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(k, k);
    for (const PairCount& pc : dataset.pairs()) {
      const int a = block_of[pc.i];
      const int b = block_of[pc.j];
      if (a == b) continue;
      const double pi = WinProbability(current[pc.i], current[pc.j]);
      const double w = static_cast<double>(pc.matches) * pi * (1.0 - pi);
      hessian(a, a) += w;
      hessian(b, b) += w;
      hessian(a, b) -= w;
      hessian(b, a) -= w;
    }
    // The objective is invariant to shifting every group; pin the lowest.
    Eigen::VectorXd direction = Eigen::VectorXd::Zero(k);
    direction.tail(k - 1) =
        -hessian.bottomRightCorner(k - 1, k - 1).ldlt().solve(reduced.tail(k - 1));
    const double slope = reduced.dot(direction);
    if (!(slope < 0.0)) break;

    double t_meet = std::numeric_limits<double>::infinity();
    for (int a = 0; a + 1 < k; ++a) {
      const double closing = direction[a] - direction[a + 1];
      if (closing > 0.0) {
        t_meet = std::min(t_meet, (value[a + 1] - value[a]) / closing);
      }
    }
    const double f0 = PenalizedObjective(current, dataset, lambda);
    double t = std::min(1.0, t_meet);
    bool accepted = false;
    std::vector<double> candidate(k);
    for (int halving = 0; halving < 60; ++halving) {
      for (int a = 0; a < k; ++a) candidate[a] = value[a] + t * direction[a];
      const double f = PenalizedObjective(expand(candidate), dataset, lambda);
      // Near the optimum the decrease drops below the rounding error of the
      // objective; accept steps that do not visibly increase it.
      if (f <= f0 + 1e-4 * t * slope ||
          (t == std::min(1.0, t_meet) && f <= f0 + 1e-12 * (1.0 + std::abs(f0)))) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    if (t == t_meet) {
      // Fuse every adjacent pair that met at this step.
      std::vector<std::vector<int>> fused_blocks;
      std::vector<double> fused_values;
      for (int a = 0; a < k; ++a) {
        const bool meets =
            !fused_blocks.empty() && direction[a - 1] - direction[a] > 0.0 &&
            std::abs((value[a] - value[a - 1]) / (direction[a - 1] - direction[a]) -
                     t_meet) <= 1e-12 * std::max(1.0, t_meet);
        if (meets) {
          auto& target = fused_blocks.back();
          const double sa = static_cast<double>(target.size());
          const double sb = static_cast<double>(blocks[a].size());
          fused_values.back() =
              (sa * fused_values.back() + sb * candidate[a]) / (sa + sb);
          target.insert(target.end(), blocks[a].begin(), blocks[a].end());
        } else {
          fused_blocks.push_back(blocks[a]);
          fused_values.push_back(candidate[a]);
        }
      }
      blocks = std::move(fused_blocks);
      value = std::move(fused_values);
    } else {
      value = candidate;
    }
  }
  theta = expand(value);
  theta.array() -= theta.mean();
}

// Splits every group whose players cannot share a rating at the optimum: the
// top k players of the group by subgradient residual, with k chosen at the
// largest prefix violation, are lifted just above the grouping tolerance so
// the next Newton pass treats them as a group of their own. Returns false
// when nothing was split.
bool SplitGroups(const ComparisonDataset& dataset, double lambda,
                 const LassoOptions& options, Eigen::VectorXd& theta) {
  const Eigen::VectorXd grad = -LogLikelihoodGradient(theta, dataset);
  const int n = static_cast<int>(theta.size());
  int num_groups = 0;
  const std::vector<int> group =
      GroupRatings(theta, options.group_tol, &num_groups);
  std::vector<std::vector<int>> members(num_groups);
  for (int v = 0; v < n; ++v) members[group[v]].push_back(v);
  const double lift = 4.0 * GroupingScale(theta, options.group_tol);

  bool split = false;
  int above = 0;
  for (int g = 0; g < num_groups; ++g) {
    std::vector<int>& block = members[g];
    const int s = static_cast<int>(block.size());
    const int below = n - above - s;
    above += s;
    if (s < 2) continue;
    std::vector<double> r(n);
    double mean = 0.0;
    for (int v : block) {
      r[v] = -grad[v] / lambda - static_cast<double>(below - above + s);
      mean += r[v];
    }
    mean /= s;
    std::stable_sort(block.begin(), block.end(),
                     [&](int a, int b) { return r[a] > r[b]; });
    double prefix = 0.0;
    double best_excess = options.tol / lambda;
    int best_k = 0;
    for (int k = 1; k < s; ++k) {
      prefix += r[block[k - 1]] - mean;
      const double excess = (prefix - static_cast<double>(k) * (s - k)) / k;
      if (excess > best_excess) {
        best_excess = excess;
        best_k = k;
      }
    }
    if (best_k == 0) continue;
    for (int k = 0; k < best_k; ++k) theta[block[k]] += lift;
    split = true;
  }
  return split;
}

LassoSolution MakeSolution(const ComparisonDataset& dataset, double lambda,
                           const Eigen::VectorXd& raw_theta,
                           const LassoOptions& options) {
  LassoSolution sol;
  sol.lambda = lambda;
  sol.theta = raw_theta;
  if (sol.theta.size() > 0) sol.theta.array() -= raw_theta[0];
  sol.alpha = sol.theta.array().exp();
  sol.group = GroupRatings(sol.theta, options.group_tol, &sol.num_groups);
  sol.loglik = LogLikelihood(sol.theta, dataset);
  sol.bic = Bic(sol, dataset.total_matches());
  sol.objective = -sol.loglik + lambda * Penalty(sol.theta);
  sol.certificate =
      OptimalityCertificate(dataset, sol.theta, lambda, options.group_tol);
  return sol;
}

}  // namespace

std::vector<std::vector<int>> LassoSolution::Groups() const {
  std::vector<std::vector<int>> groups(num_groups);
  for (size_t v = 0; v < group.size(); ++v) {
    groups[group[v]].push_back(static_cast<int>(v));
  }
  return groups;
}

double Penalty(const Eigen::VectorXd& values) {
  const Eigen::Index m = values.size();
  Eigen::VectorXd sorted = values;
  std::sort(sorted.data(), sorted.data() + m);
  double total = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    total += static_cast<double>(2 * k - m + 1) * sorted[k];
  }
  return total;
}

Eigen::VectorXd ProxPenalty(const Eigen::VectorXd& v, double scale) {
  const int m = static_cast<int>(v.size());
  if (m == 0 || scale == 0.0) return v;
  // In descending order the penalty is linear with weights m-1, m-3, ...,
  // 1-m; shift by those and restore the order by pooling adjacent violators.
  const std::vector<int> order = SortedOrder(v, /*descending=*/true);
  std::vector<double> block_sum;
  std::vector<int> block_size;
  block_sum.reserve(m);
  block_size.reserve(m);
  for (int k = 0; k < m; ++k) {
    block_sum.push_back(v[order[k]] - scale * static_cast<double>(m - 1 - 2 * k));
    block_size.push_back(1);
    while (block_sum.size() > 1) {
      const size_t last = block_sum.size() - 1;
      const double mean_last = block_sum[last] / block_size[last];
      const double mean_prev = block_sum[last - 1] / block_size[last - 1];
      if (mean_prev >= mean_last) break;
      block_sum[last - 1] += block_sum[last];
      block_size[last - 1] += block_size[last];
      block_sum.pop_back();
      block_size.pop_back();
    }
  }
  Eigen::VectorXd out(m);
  int k = 0;
  for (size_t b = 0; b < block_sum.size(); ++b) {
    const double mean = block_sum[b] / block_size[b];
    for (int s = 0; s < block_size[b]; ++s) out[order[k++]] = mean;
  }
  return out;
}

double PenalizedObjective(const Eigen::VectorXd& theta,
                          const ComparisonDataset& dataset, double lambda) {
  double objective = -LogLikelihood(theta, dataset);
  if (lambda != 0.0) objective += lambda * Penalty(theta);
  return objective;
}

std::vector<int> GroupRatings(const Eigen::VectorXd& theta, double group_tol,
                              int* num_groups) {
  const int n = static_cast<int>(theta.size());
  std::vector<int> group(n, 0);
  const std::vector<int> order = SortedOrder(theta, /*descending=*/true);
  const double tol = GroupingScale(theta, group_tol);
  int id = 0;
  for (int k = 0; k < n; ++k) {
    if (k > 0 && theta[order[k - 1]] - theta[order[k]] > tol) ++id;
    group[order[k]] = id;
  }
  if (num_groups != nullptr) *num_groups = n == 0 ? 0 : id + 1;
  return group;
}

double OptimalityCertificate(const ComparisonDataset& dataset,
                             const Eigen::VectorXd& theta, double lambda,
                             double group_tol) {
  const Eigen::VectorXd grad = -LogLikelihoodGradient(theta, dataset);
  if (lambda == 0.0) return grad.lpNorm<Eigen::Infinity>();
  const int n = static_cast<int>(theta.size());
  int num_groups = 0;
  const std::vector<int> group = GroupRatings(theta, group_tol, &num_groups);
  std::vector<std::vector<int>> members(num_groups);
  for (int v = 0; v < n; ++v) members[group[v]].push_back(v);

  // Within a group of size s the pairwise subgradients s_ij in [-1, 1] must
  // produce r_i = -grad_i / lambda - (#below - #above). That is feasible iff
  // sum r = 0 and the k largest r sum to at most k (s - k) for every k.
  double worst = 0.0;
  int above = 0;
  for (int g = 0; g < num_groups; ++g) {
    const int s = static_cast<int>(members[g].size());
    const int below = n - above - s;
    std::vector<double> r;
    r.reserve(s);
    for (int v : members[g]) {
      r.push_back(-grad[v] / lambda - static_cast<double>(below - above));
    }
    const double mean = std::accumulate(r.begin(), r.end(), 0.0) / s;
    worst = std::max(worst, std::abs(mean));
    std::sort(r.begin(), r.end(), std::greater<>());
    double prefix = 0.0;
    for (int k = 1; k < s; ++k) {
      prefix += r[k - 1] - mean;
      const double excess = prefix - static_cast<double>(k) * (s - k);
      if (excess > 0.0) worst = std::max(worst, excess / k);
    }
    above += s;
  }
  return lambda * worst;
}

LassoSolution FitPenalized(const ComparisonDataset& dataset, double lambda,
                           const LassoOptions& options,
                           const Eigen::VectorXd* warm_start) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidInput,
                "lambda must be finite and non-negative");
  }
  const int n = dataset.num_players();
  if (n < 1) throw Error(ErrorCode::kInvalidInput, "dataset has no players");
  if (!IsConnected(dataset)) {
    const auto components = ConnectedComponents(dataset);
    throw Error(ErrorCode::kDisconnected,
                "comparison graph has " + std::to_string(components.size()) +
                    " components");
  }
  if (lambda == 0.0) {
    const FitResult fit = FitMle(dataset);
    return MakeSolution(dataset, lambda, fit.theta, options);
  }

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  if (warm_start != nullptr) {
    if (warm_start->size() != n) {
      throw Error(ErrorCode::kInvalidInput, "warm start has the wrong size");
    }
    theta = *warm_start;
    theta.array() -= theta.mean();
  }
  if (n == 1) return MakeSolution(dataset, lambda, theta, options);

  const auto totals = MatchTotals(dataset);
  // Gershgorin bound on the Laplacian times the 1/4 bound on pi (1 - pi).
  const double lipschitz =
      0.5 * static_cast<double>(*std::max_element(totals.begin(), totals.end()));

  double certificate = std::numeric_limits<double>::infinity();
  double last_split_certificate = certificate;
  for (int round = 0; round < options.max_rounds; ++round) {
    PolishGroups(dataset, lambda, options, theta);
    certificate =
        OptimalityCertificate(dataset, theta, lambda, options.group_tol);
    if (certificate <= options.tol) {
      return MakeSolution(dataset, lambda, theta, options);
    }
    // Splitting fixes a wrong grouping in one Newton pass; when it stops
    // making progress, fall back to proximal-gradient steps to reorder.
    if (certificate < last_split_certificate &&
        SplitGroups(dataset, lambda, options, theta)) {
      last_split_certificate = certificate;
      continue;
    }
    last_split_certificate = std::numeric_limits<double>::infinity();
    ProximalGradient(dataset, lambda, lipschitz, options.prox_iterations,
                     theta);
  }
  throw Error(ErrorCode::kNotConverged,
              "grouped lasso at lambda=" + FormatDouble(lambda) +
                  " stopped with optimality residual " +
                  FormatDouble(certificate));
}

double CollapseLambda(const ComparisonDataset& dataset) {
  const int n = dataset.num_players();
  if (n < 2) return 0.0;
  const auto wins = WinTotals(dataset);
  const auto totals = MatchTotals(dataset);
  // At equal ratings the score of player i is w_i - n_i / 2.
  std::vector<double> score(n);
  for (int v = 0; v < n; ++v) {
    score[v] = static_cast<double>(wins[v]) - 0.5 * static_cast<double>(totals[v]);
  }
  std::sort(score.begin(), score.end(), std::greater<>());
  double prefix = 0.0;
  double needed = 0.0;
  for (int k = 1; k < n; ++k) {
    prefix += score[k - 1];
    needed = std::max(needed, prefix / (static_cast<double>(k) * (n - k)));
  }
  return needed;
}

double LambdaMax(const ComparisonDataset& dataset) {
  const double collapse = CollapseLambda(dataset);
  if (collapse <= 0.0) return 1.0;
  double lambda = 1.0;
  while (lambda < collapse) lambda *= 2.0;
  while (lambda / 2.0 >= collapse) lambda /= 2.0;
  return lambda;
}

std::vector<double> DefaultLambdaGrid(const ComparisonDataset& dataset,
                                      int points) {
  if (points < 1) {
    throw Error(ErrorCode::kInvalidInput, "lambda grid needs a point");
  }
  std::vector<double> grid{0.0};
  if (points == 1) return grid;
  const double hi = LambdaMax(dataset);
  const double lo = 1e-3 * hi;
  const int steps = points - 1;
  for (int k = 0; k < steps; ++k) {
    const double frac = steps == 1 ? 1.0 : static_cast<double>(k) / (steps - 1);
    grid.push_back(k == steps - 1 ? hi : lo * std::pow(hi / lo, frac));
  }
  return grid;
}

LassoPath SolvePath(const ComparisonDataset& dataset,
                    const std::vector<double>& lambdas,
                    const LassoOptions& options) {
  if (lambdas.empty()) {
    throw Error(ErrorCode::kInvalidInput, "lambda grid is empty");
  }
  for (size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] >= 0.0) || (k > 0 && !(lambdas[k] > lambdas[k - 1]))) {
      throw Error(ErrorCode::kInvalidInput,
                  "lambda grid must be non-negative and strictly increasing");
    }
  }
  LassoPath path;
  path.solutions.reserve(lambdas.size());
  for (double lambda : lambdas) {
    const Eigen::VectorXd* warm =
        path.solutions.empty() ? nullptr : &path.solutions.back().theta;
    try {
      path.solutions.push_back(FitPenalized(dataset, lambda, options, warm));
    } catch (const Error& e) {
      throw Error(e.code(),
                  "at lambda=" + FormatDouble(lambda) + ": " + e.what(),
                  e.players());
    }
    const size_t last = path.solutions.size() - 1;
    if (last > 0 && path.solutions[last].num_groups >
                        path.solutions[last - 1].num_groups) {
      path.warnings.push_back(
          "group count rose from " +
          std::to_string(path.solutions[last - 1].num_groups) + " to " +
          std::to_string(path.solutions[last].num_groups) + " at lambda=" +
          FormatDouble(lambda));
    }
  }
  return path;
}

double Bic(const LassoSolution& solution, std::int64_t total_matches) {
  return -2.0 * solution.loglik +
         static_cast<double>(solution.num_groups) *
             std::log(static_cast<double>(std::max<std::int64_t>(total_matches, 1)));
}

const LassoSolution& SelectLambda(const LassoPath& path) {
  if (path.solutions.empty()) {
    throw Error(ErrorCode::kInvalidInput, "cannot select from an empty path");
  }
  const LassoSolution* best = &path.solutions.front();
  for (const LassoSolution& sol : path.solutions) {
    const double tie = 1e-9 * std::max(1.0, std::abs(best->bic));
    if (sol.bic <= best->bic + tie && (sol.bic < best->bic - tie ||
                                       sol.lambda > best->lambda)) {
      best = &sol;
    }
  }
  return *best;
}

void WritePathCsv(std::ostream& out, const LassoPath& path,
                  const ComparisonDataset& dataset) {
  out << "lambda,player_label,alpha,group_id\n";
  for (const LassoSolution& sol : path.solutions) {
    for (int v = 0; v < dataset.num_players(); ++v) {
      out << FormatDouble(sol.lambda) << ',';
      WriteCsvField(out, dataset.Label(v));
      out << ',' << FormatDouble(sol.alpha[v]) << ',' << sol.group[v] << '\n';
    }
  }
}

void WritePathSummaryCsv(std::ostream& out, const LassoPath& path) {
  const LassoSolution* selected =
      path.solutions.empty() ? nullptr : &SelectLambda(path);
  out << "lambda,k,loglik,bic,selected\n";
  for (const LassoSolution& sol : path.solutions) {
    out << FormatDouble(sol.lambda) << ',' << sol.num_groups << ','
        << FormatDouble(sol.loglik) << ',' << FormatDouble(sol.bic) << ','
        << (&sol == selected ? 1 : 0) << '\n';
  }
}

}  // namespace btrank
