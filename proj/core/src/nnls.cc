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

#include "btrank/nnls.h"

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/QR>

#include "btrank/error.h"

namespace btrank {
namespace {

// Lawson-Hanson iterations. `dual(x)` is the negative gradient of the
// objective at x; `solve(passive)` minimizes it over the passive columns with
// the rest held at zero.
template <typename Dual, typename Solve>
Eigen::VectorXd ActiveSet(Eigen::Index n, double tol, Dual dual, Solve solve) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<char> in_passive(n, 0);
  // Columns whose entry failed from roundoff since x last changed.
  std::vector<char> blocked(n, 0);
  std::vector<int> passive;
  const int max_outer = 3 * static_cast<int>(n) + 10;

  for (int outer = 0; outer < max_outer; ++outer) {
    const Eigen::VectorXd w = dual(x);
    Eigen::Index entering = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!in_passive[j] && !blocked[j] && w[j] > best) {
        best = w[j];
        entering = j;
      }
    }
    if (entering < 0) break;
    in_passive[entering] = 1;
    passive.push_back(static_cast<int>(entering));

    for (int inner = 0; inner <= static_cast<int>(n); ++inner) {
      const Eigen::VectorXd z = solve(passive);
      if (inner == 0 && z[passive.size() - 1] <= 0.0) {
        // The entering column is numerically dependent on the passive set;
        // try the next candidate.
        in_passive[entering] = 0;
        blocked[entering] = 1;
        passive.pop_back();
        break;
      }
      bool feasible = true;
      for (size_t k = 0; k < passive.size(); ++k) {
        if (z[k] <= 0.0) feasible = false;
      }
      if (feasible) {
        for (size_t k = 0; k < passive.size(); ++k) x[passive[k]] = z[k];
        std::fill(blocked.begin(), blocked.end(), 0);
        break;
      }
      // Step toward z until the first passive coordinate hits zero.
      double step = 1.0;
      for (size_t k = 0; k < passive.size(); ++k) {
        if (z[k] <= 0.0) {
          const double xk = x[passive[k]];
          step = std::min(step, xk / (xk - z[k]));
        }
      }
      for (size_t k = 0; k < passive.size(); ++k) {
        x[passive[k]] += step * (z[k] - x[passive[k]]);
      }
      std::vector<int> kept;
      for (int j : passive) {
        if (x[j] <= tol) {
          x[j] = 0.0;
          in_passive[j] = 0;
        } else {
          kept.push_back(j);
        }
      }
      passive.swap(kept);
      if (passive.empty()) break;
    }
  }
  return x;
}

}  // namespace

Eigen::VectorXd NonNegativeLeastSquares(const Eigen::MatrixXd& a,
                                        const Eigen::VectorXd& b) {
  if (a.rows() != b.size()) {
    throw Error(ErrorCode::kInvalidInput, "NNLS dimension mismatch");
  }
  const Eigen::Index n = a.cols();
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     a.cwiseAbs().colwise().sum().maxCoeff() *
                     static_cast<double>(std::max(a.rows(), n));
  return ActiveSet(
      n, tol,
      [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return a.transpose() * (b - a * x);
      },
      [&](const std::vector<int>& passive) -> Eigen::VectorXd {
        Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(passive.size()));
        for (size_t k = 0; k < passive.size(); ++k) sub.col(k) = a.col(passive[k]);
        return sub.colPivHouseholderQr().solve(b);
      });
}

Eigen::VectorXd NonNegativeQuadratic(const Eigen::MatrixXd& h,
                                     const Eigen::VectorXd& g) {
  if (h.rows() != h.cols() || h.rows() != g.size()) {
    throw Error(ErrorCode::kInvalidInput, "quadratic program dimension mismatch");
  }
  const Eigen::Index n = h.cols();
  const double scale = std::max(h.cwiseAbs().maxCoeff(), g.cwiseAbs().maxCoeff());
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * scale *
                     static_cast<double>(std::max<Eigen::Index>(n, 1));
  return ActiveSet(
      n, tol,
      [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return g - h * x; },
      [&](const std::vector<int>& passive) -> Eigen::VectorXd {
        const auto size = static_cast<Eigen::Index>(passive.size());
        Eigen::MatrixXd sub(size, size);
        Eigen::VectorXd rhs(size);
        for (Eigen::Index r = 0; r < size; ++r) {
          rhs[r] = g[passive[r]];
          for (Eigen::Index c = 0; c < size; ++c) {
            sub(r, c) = h(passive[r], passive[c]);
          }
        }
        return sub.colPivHouseholderQr().solve(rhs);
      });
}

}  // namespace btrank
