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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "btrank/btmle.h"
#include "btrank/comparisons_io.h"
#include "btrank/error.h"
#include "test_util.h"

namespace btrank {
namespace {

using testing::RandomCompleteDataset;

ComparisonDataset LoadCitations(const std::string& name) {
  std::ifstream in(testing::SourcePath("data/" + name));
  return FromCitationMatrix(ReadCitationCsv(in));
}

double PenaltyOracle(const Eigen::VectorXd& v) {
  double s = 0;
  for (int i = 0; i < v.size(); ++i) {
    for (int j = i + 1; j < v.size(); ++j) s += std::abs(v[i] - v[j]);
  }
  return s;
}

TEST(Penalty, Examples) {
  EXPECT_EQ(Penalty(Eigen::VectorXd::Constant(5, 2.5)), 0.0);
  EXPECT_DOUBLE_EQ(Penalty(Eigen::Vector3d(0, 1, 2)), 4.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v[i] = normal(rng);
    EXPECT_NEAR(Penalty(v), PenaltyOracle(v), 1e-12);
  }
}

// Subgradient descent on the strongly convex prox objective; steps 1/k give
// slow but certain convergence.
Eigen::VectorXd ProxBySubgradient(const Eigen::VectorXd& v, double scale) {
  Eigen::VectorXd x = v;
  Eigen::VectorXd best = x;
  auto objective = [&](const Eigen::VectorXd& y) {
    return 0.5 * (y - v).squaredNorm() + scale * PenaltyOracle(y);
  };
  double best_f = objective(x);
  for (int k = 1; k <= 200000; ++k) {
    Eigen::VectorXd g = x - v;
    for (int i = 0; i < x.size(); ++i) {
      for (int j = 0; j < x.size(); ++j) {
        if (x[i] > x[j]) g[i] += scale;
        if (x[i] < x[j]) g[i] -= scale;
      }
    }
    x -= g / k;
    const double f = objective(x);
    if (f < best_f) {
      best_f = f;
      best = x;
    }
  }
  return best;
}

TEST(ProxPenalty, MatchesSubgradientOracle) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 8; ++trial) {
    Eigen::VectorXd v(5);
    for (int i = 0; i < 5; ++i) v[i] = normal(rng);
    const double scale = 0.05 + 0.1 * trial;
    const Eigen::VectorXd x = ProxPenalty(v, scale);
    const Eigen::VectorXd oracle = ProxBySubgradient(v, scale);
    auto objective = [&](const Eigen::VectorXd& y) {
      return 0.5 * (y - v).squaredNorm() + scale * PenaltyOracle(y);
    };
    EXPECT_LE(objective(x), objective(oracle) + 1e-12);
    EXPECT_LE((x - oracle).lpNorm<Eigen::Infinity>(), 1e-3);
    // The prox of a shift-invariant penalty preserves the mean.
    EXPECT_NEAR(x.mean(), v.mean(), 1e-12);
  }
}

TEST(ProxPenalty, LargeScaleCollapsesToMean) {
  const Eigen::Vector4d v(3, -1, 0.5, 2);
  const Eigen::VectorXd x = ProxPenalty(v, 10.0);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(x[i], v.mean(), 1e-12);
}

TEST(GroupRatings, FusesWithinToleranceTopDown) {
  int k = 0;
  const std::vector<int> g =
      GroupRatings(Eigen::Vector4d(0.5, 2.0, 0.5 + 1e-9, -1.0), 1e-6, &k);
  EXPECT_EQ(k, 3);
  EXPECT_EQ(g, (std::vector<int>{1, 0, 1, 2}));
}

TEST(PenalizedObjective, Definition) {
  std::mt19937_64 rng(3);
  const ComparisonDataset d = RandomCompleteDataset(4, 2, 5, 1.0, rng);
  const Eigen::Vector4d theta(0, 0.3, -0.4, 1.0);
  EXPECT_NEAR(PenalizedObjective(theta, d, 0.7),
              -LogLikelihood(theta, d) + 0.7 * PenaltyOracle(theta), 1e-12);
}

// Exact minimizer by enumeration of weak orderings. On each ordering the
// penalty is linear in the group values, so the objective is smooth and
// convex there; Newton finds the face optimum, which counts when it respects
// the ordering strictly.
struct OracleResult {
  Eigen::VectorXd theta;
  double objective = INFINITY;
};

void EnumerateWeakOrders(int n, std::vector<int>& level, int index,
                         int used_levels,
                         const std::function<void(const std::vector<int>&, int)>&
                             visit) {
  if (index == n) {
    visit(level, used_levels);
    return;
  }
  for (int l = 0; l <= used_levels; ++l) {
    level[index] = l;
    EnumerateWeakOrders(n, level, index + 1, std::max(used_levels, l + 1),
                        visit);
  }
}

OracleResult EnumerationOracle(const ComparisonDataset& d, double lambda) {
  const int n = d.num_players();
  OracleResult best;
  std::vector<int> level(n);
  // Levels are set-partition labels; every permutation of them is an
  // ordering of the groups.
  EnumerateWeakOrders(n, level, 0, 0, [&](const std::vector<int>& part,
                                          int k) {
    std::vector<int> rank(k);
    std::iota(rank.begin(), rank.end(), 0);
    do {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, k);
      Eigen::VectorXd size = Eigen::VectorXd::Zero(k);
      for (int i = 0; i < n; ++i) {
        m(i, part[i]) = 1;
        size[part[i]] += 1;
      }
      // Penalty slope per group: members times (players below - above).
      Eigen::VectorXd c(k);
      for (int a = 0; a < k; ++a) {
        double below = 0, above = 0;
        for (int b = 0; b < k; ++b) {
          if (rank[b] < rank[a]) below += size[b];
          if (rank[b] > rank[a]) above += size[b];
        }
        c[a] = size[a] * (below - above);
      }
      // Pin the group of player 0; start from the ordering's ranks.
      const int pinned = part[0];
      Eigen::VectorXd g(k);
      for (int a = 0; a < k; ++a) g[a] = 0.1 * (rank[a] - rank[pinned]);
      bool ok = false;
      for (int it = 0; it < 200; ++it) {
        const Eigen::VectorXd theta = m * g;
        Eigen::VectorXd grad = -m.transpose() * LogLikelihoodGradient(theta, d) +
                               lambda * c;
        Eigen::MatrixXd hess = m.transpose() * ObservedInformation(theta, d) * m;
        grad[pinned] = 0;
        hess.row(pinned).setZero();
        hess.col(pinned).setZero();
        hess(pinned, pinned) = 1;
        const Eigen::VectorXd step = hess.ldlt().solve(grad);
        double t = 1;
        const double f0 =
            -LogLikelihood(theta, d) + lambda * c.dot(g);
        while (t > 1e-12) {
          const Eigen::VectorXd g1 = g - t * step;
          if (-LogLikelihood(m * g1, d) + lambda * c.dot(g1) <= f0) break;
          t /= 2;
        }
        g -= t * step;
        if (g.cwiseAbs().maxCoeff() > 40) break;
        if (grad.lpNorm<Eigen::Infinity>() < 1e-12) {
          ok = true;
          break;
        }
      }
      if (!ok) return;
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
          if (rank[a] < rank[b] && !(g[a] < g[b])) return;
        }
      }
      const Eigen::VectorXd theta = m * g;
      const double f = PenalizedObjective(theta, d, lambda);
      if (f < best.objective) {
        best.objective = f;
        best.theta = theta;
      }
    } while (std::next_permutation(rank.begin(), rank.end()));
  });
  return best;
}

TEST(FitPenalized, MatchesEnumerationOracleOnFourPlayers) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 6; ++trial) {
    const ComparisonDataset d = RandomCompleteDataset(4, 3, 12, 0.7, rng);
    for (double lambda : {0.3, 1.0, 2.5}) {
      const LassoSolution sol = FitPenalized(d, lambda);
      const OracleResult oracle = EnumerationOracle(d, lambda);
      ASSERT_TRUE(std::isfinite(oracle.objective));
      EXPECT_LE(sol.objective - oracle.objective, 1e-7)
          << "trial " << trial << " lambda " << lambda;
      EXPECT_LE(sol.certificate, 1e-6);
      EXPECT_NEAR(sol.objective, PenalizedObjective(sol.theta, d, lambda),
                  1e-9);
    }
  }
}

TEST(FitPenalized, ZeroLambdaIsMaximumLikelihood) {
  std::mt19937_64 rng(5);
  const ComparisonDataset d = RandomCompleteDataset(9, 2, 10, 1.0, rng);
  const FitResult mle = FitMle(d);
  const LassoSolution sol = FitPenalized(d, 0.0);
  EXPECT_EQ(sol.num_groups, 9);
  EXPECT_EQ(sol.alpha[0], 1.0);
  for (int i = 0; i < 9; ++i) {
    EXPECT_NEAR(sol.alpha[i], std::exp(mle.theta[i]), 1e-5);
  }
  EXPECT_EQ(testing::Argsort(sol.theta), testing::Argsort(mle.theta));
  EXPECT_NEAR(sol.loglik, mle.loglik, 1e-9);
}

TEST(FitPenalized, HugeLambdaGivesOneGroup) {
  std::mt19937_64 rng(6);
  const ComparisonDataset d = RandomCompleteDataset(7, 2, 10, 1.0, rng);
  const LassoSolution sol =
      FitPenalized(d, 1e6 * static_cast<double>(d.total_matches()));
  EXPECT_EQ(sol.num_groups, 1);
  EXPECT_LE(Penalty(sol.theta), 1e-8);
  for (int i = 0; i < 7; ++i) EXPECT_EQ(sol.alpha[i], 1.0);
}

TEST(FitPenalized, FiniteForSeparatedDataWhenPenalized) {
  // Player 2 lost every match, so only lambda = 0 diverges.
  const ComparisonDataset d(3, {{0, 1, 4, 2}, {0, 2, 3, 3}, {1, 2, 2, 2}});
  try {
    FitPenalized(d, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDivergent);
  }
  const LassoSolution sol = FitPenalized(d, 0.5);
  EXPECT_TRUE(sol.theta.allFinite());
  EXPECT_LE(sol.certificate, 1e-6);
}

TEST(FitPenalized, RejectsDisconnectedData) {
  const ComparisonDataset d(4, {{0, 1, 3, 1}, {2, 3, 2, 1}});
  try {
    FitPenalized(d, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDisconnected);
  }
}

TEST(Lambda, CollapseAndMaxBracketTheSingleGroup) {
  std::mt19937_64 rng(7);
  const ComparisonDataset d = RandomCompleteDataset(8, 2, 10, 1.0, rng);
  const double collapse = CollapseLambda(d);
  EXPECT_EQ(FitPenalized(d, collapse * 1.0001).num_groups, 1);
  EXPECT_GT(FitPenalized(d, collapse * 0.98).num_groups, 1);
  const double lmax = LambdaMax(d);
  EXPECT_EQ(std::exp2(std::round(std::log2(lmax))), lmax);
  EXPECT_EQ(FitPenalized(d, lmax).num_groups, 1);
  EXPECT_GT(FitPenalized(d, lmax / 2).num_groups, 1);
  const std::vector<double> grid = DefaultLambdaGrid(d, 51);
  ASSERT_EQ(grid.size(), 51u);
  EXPECT_EQ(grid[0], 0.0);
  EXPECT_NEAR(grid[1], 1e-3 * lmax, 1e-15 * lmax);
  EXPECT_NEAR(grid.back(), lmax, 1e-12 * lmax);
  for (size_t k = 2; k < grid.size(); ++k) {
    EXPECT_NEAR(grid[k] / grid[k - 1], grid[2] / grid[1], 1e-9);
  }
}

TEST(SolvePath, SingleZeroLambda) {
  std::mt19937_64 rng(8);
  const ComparisonDataset d = RandomCompleteDataset(5, 2, 6, 1.0, rng);
  const LassoPath path = SolvePath(d, {0.0});
  ASSERT_EQ(path.solutions.size(), 1u);
  EXPECT_NEAR(path.solutions[0].loglik, FitMle(d).loglik, 1e-9);
  EXPECT_EQ(&SelectLambda(path), &path.solutions[0]);
}

TEST(SolvePath, RejectsBadGrids) {
  std::mt19937_64 rng(9);
  const ComparisonDataset d = RandomCompleteDataset(4, 2, 6, 1.0, rng);
  EXPECT_THROW(SolvePath(d, {0.0, 0.0}), Error);
  EXPECT_THROW(SolvePath(d, {1.0, 0.5}), Error);
  EXPECT_THROW(SolvePath(d, {-1.0}), Error);
  EXPECT_THROW(SolvePath(d, {}), Error);
}

TEST(SolvePath, WarmStartsAgreeWithColdStartsOnFixture) {
  const ComparisonDataset d = LoadCitations("citations_dominant.csv");
  std::vector<double> lambdas;
  for (int k = 0; k <= 20; ++k) lambdas.push_back(0.5 * k);
  const LassoPath path = SolvePath(d, lambdas);
  double previous = -INFINITY;
  int rises = 0;
  for (size_t k = 0; k < lambdas.size(); ++k) {
    const LassoSolution& warm = path.solutions[k];
    const LassoSolution cold = FitPenalized(d, lambdas[k]);
    EXPECT_EQ(warm.num_groups, cold.num_groups) << "lambda " << lambdas[k];
    EXPECT_NEAR(warm.objective, cold.objective, 1e-8 * std::abs(cold.objective));
    EXPECT_LE(warm.certificate, 1e-6);
    // The optimal penalized objective is non-decreasing in lambda.
    EXPECT_GE(warm.objective, previous - 1e-9);
    previous = warm.objective;
    if (k > 0 && warm.num_groups > path.solutions[k - 1].num_groups) ++rises;
  }
  // Group counts can rise for an all-pairs penalty with a general loss; each
  // rise is reported.
  EXPECT_EQ(static_cast<int>(path.warnings.size()), rises);
}

TEST(SolvePath, GroupCountIsMonotoneOnBalancedFixture) {
  std::mt19937_64 rng(10);
  const ComparisonDataset d = testing::BalancedRoundRobin(6, 20, 1.0, rng);
  const LassoPath path = SolvePath(d, DefaultLambdaGrid(d, 41));
  for (size_t k = 1; k < path.solutions.size(); ++k) {
    EXPECT_LE(path.solutions[k].num_groups, path.solutions[k - 1].num_groups);
  }
  EXPECT_TRUE(path.warnings.empty());
  EXPECT_EQ(path.solutions.back().num_groups, 1);
}

TEST(SolvePath, DominantPlayerStaysOnTop) {
  const ComparisonDataset d = LoadCitations("citations_dominant.csv");
  const LassoPath path = SolvePath(d, DefaultLambdaGrid(d));
  for (const LassoSolution& s : path.solutions) {
    EXPECT_EQ(s.group[0], 0) << "lambda " << s.lambda;
    for (int i = 1; i < d.num_players(); ++i) {
      EXPECT_GE(s.alpha[0], s.alpha[i]);
    }
  }
  EXPECT_EQ(path.solutions.back().num_groups, 1);
}

TEST(SolvePath, CertificateAndBicSelectionOnJournalFixture) {
  const ComparisonDataset d = LoadCitations("citations_synthetic86.csv");
  const LassoPath path = SolvePath(d, DefaultLambdaGrid(d));
  const double n = static_cast<double>(d.total_matches());
  size_t argmin = 0;
  for (size_t k = 0; k < path.solutions.size(); ++k) {
    const LassoSolution& s = path.solutions[k];
    EXPECT_LE(s.certificate, 1e-6);
    EXPECT_NEAR(s.bic, -2 * s.loglik + s.num_groups * std::log(n), 1e-9);
    EXPECT_LE(s.loglik, path.solutions[0].loglik + 1e-9);
    if (s.bic <= path.solutions[argmin].bic) argmin = k;
  }
  const LassoSolution& selected = SelectLambda(path);
  EXPECT_EQ(&selected, &path.solutions[argmin]);
  // A little shrinkage helps, but only a little.
  EXPECT_GT(selected.lambda, 0.0);
  EXPECT_LT(selected.lambda, 0.05 * path.solutions.back().lambda);
  EXPECT_GT(selected.num_groups, d.num_players() / 2);
}

TEST(Bic, FormulaAndTieBreak) {
  LassoSolution a, b;
  a.loglik = b.loglik = -40.0;
  a.num_groups = 3;
  b.num_groups = 5;
  EXPECT_NEAR(Bic(b, 100) - Bic(a, 100), 2 * std::log(100.0), 1e-12);
  EXPECT_DOUBLE_EQ(Bic(a, 100), 80.0 + 3 * std::log(100.0));

  LassoPath path;
  for (double lambda : {0.0, 1.0, 2.0}) {
    LassoSolution s;
    s.lambda = lambda;
    path.solutions.push_back(s);
  }
  path.solutions[0].bic = 10;
  path.solutions[1].bic = 12;
  path.solutions[2].bic = 14;
  EXPECT_EQ(SelectLambda(path).lambda, 0.0);
  path.solutions[2].bic = 10;
  EXPECT_EQ(SelectLambda(path).lambda, 2.0);
  EXPECT_THROW(SelectLambda(LassoPath{}), Error);
}

TEST(PathCsv, Layout) {
  const ComparisonDataset d(2, {{0, 1, 4, 3}}, {"a", "b"});
  const LassoPath path = SolvePath(d, {0.0, 100.0});
  std::ostringstream traj, summary;
  WritePathCsv(traj, path, d);
  WritePathSummaryCsv(summary, path);
  std::istringstream t(traj.str());
  std::string line;
  std::getline(t, line);
  EXPECT_EQ(line, "lambda,player_label,alpha,group_id");
  int rows = 0;
  while (std::getline(t, line)) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_EQ(summary.str().substr(0, summary.str().find('\n')),
            "lambda,k,loglik,bic,selected");
}

}  // namespace
}  // namespace btrank
