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

// Runs the rating methods on one dataset. Estimators see only the comparison
// data.

#ifndef BTRANK_PIPELINE_H_
#define BTRANK_PIPELINE_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "btrank/btmle.h"
#include "btrank/comparisons.h"
#include "btrank/error.h"
#include "btrank/fused_lasso.h"
#include "btrank/npmle.h"
#include "btrank/scores.h"

namespace btrank {

struct EstimatorOptions {
  SolverOptions mle;
  LassoOptions lasso;
  // RMLE picks lambda by BIC over DefaultLambdaGrid with this many points.
  int lasso_grid_points = 51;
  GridSpec grid;
  NpmleOptions npmle;
  // KWPMs bandwidth; DefaultBandwidth of the observations when unset.
  std::optional<double> bandwidth;
  TieRule ties = TieRule::kWeak;
  // Use the smoothed mixing distribution for KWPR instead of the raw NPMLE.
  bool smoothed_rank_prior = false;
  // Fill every column of the posterior summary whenever a KW method runs.
  bool full_posterior = false;
};

struct MethodOutcome {
  Method method = Method::kMle;
  bool ok = false;
  // Higher is better for every method.
  Eigen::VectorXd scores;
  ErrorCode error_code = ErrorCode::kInvalidInput;
  std::string error;
};

struct EstimatorReport {
  std::vector<MethodOutcome> outcomes;
  std::optional<FitResult> fit;
  std::optional<MixingDistribution> mixing;
  std::optional<PosteriorSummary> posterior;
  std::optional<LassoPath> path;
  std::optional<double> selected_lambda;

  const MethodOutcome* Find(Method method) const;
};

// A method that fails records its error and the others continue.
EstimatorReport RunEstimators(const ComparisonDataset& dataset,
                              std::span<const Method> methods,
                              const EstimatorOptions& options = {});

}  // namespace btrank

#endif  // BTRANK_PIPELINE_H_
