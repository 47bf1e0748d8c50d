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

#include "btrank/pipeline.h"

#include <algorithm>

namespace btrank {
namespace {

bool NeedsMle(Method m) {
  return m == Method::kMle || m == Method::kKwpm || m == Method::kKwpms ||
         m == Method::kKwpr;
}

bool NeedsMixing(Method m) {
  return m == Method::kKwpm || m == Method::kKwpms || m == Method::kKwpr;
}

MethodOutcome Failure(Method method, const Error& e) {
  MethodOutcome out;
  out.method = method;
  out.error_code = e.code();
  out.error = e.what();
  return out;
}

MethodOutcome Success(Method method, Eigen::VectorXd scores) {
  MethodOutcome out;
  out.method = method;
  out.ok = true;
  out.scores = std::move(scores);
  return out;
}

}  // namespace

const MethodOutcome* EstimatorReport::Find(Method method) const {
  for (const MethodOutcome& o : outcomes) {
    if (o.method == method) return &o;
  }
  return nullptr;
}

EstimatorReport RunEstimators(const ComparisonDataset& dataset,
                              std::span<const Method> methods,
                              const EstimatorOptions& options) {
  EstimatorReport report;
  const auto wants = [&](Method m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
  };
  const bool any_mle = std::any_of(methods.begin(), methods.end(), NeedsMle);
  const bool any_mixing =
      std::any_of(methods.begin(), methods.end(), NeedsMixing);

  std::optional<Error> mle_error;
  if (any_mle) {
    try {
      report.fit = FitMle(dataset, options.mle);
    } catch (const Error& e) {
      mle_error = e;
    }
  }
  std::optional<Error> mixing_error;
  if (any_mixing && report.fit) {
    try {
      const GaussianObservations obs = ObservationsFromFit(*report.fit);
      report.mixing = FitNpmle(obs, options.grid, options.npmle);
      PosteriorSummary summary;
      const bool all = options.full_posterior;
      summary.bandwidth = options.bandwidth.value_or(DefaultBandwidth(obs));
      if (all || wants(Method::kKwpm)) {
        summary.post_mean = PlayerPosteriorMeans(*report.mixing, *report.fit);
      }
      if (all || wants(Method::kKwpms)) {
        summary.post_mean_smoothed = PlayerSmoothedPosteriorMeans(
            *report.mixing, *report.fit, summary.bandwidth);
      }
      if (all || wants(Method::kKwpr)) {
        const MixingDistribution prior =
            options.smoothed_rank_prior
                ? SmoothMixing(*report.mixing, summary.bandwidth)
                : *report.mixing;
        summary.post_rank = PosteriorMeanRanks(prior, *report.fit, options.ties);
      }
      report.posterior = std::move(summary);
    } catch (const Error& e) {
      mixing_error = e;
    }
  } else if (any_mixing) {
    mixing_error = mle_error;
  }

  for (Method method : methods) {
    if (NeedsMle(method) && mle_error) {
      report.outcomes.push_back(Failure(method, *mle_error));
      continue;
    }
    if (NeedsMixing(method) && mixing_error) {
      report.outcomes.push_back(Failure(method, *mixing_error));
      continue;
    }
    switch (method) {
      case Method::kMle:
        report.outcomes.push_back(Success(method, report.fit->theta));
        break;
      case Method::kKwpm:
        report.outcomes.push_back(Success(method, report.posterior->post_mean));
        break;
      case Method::kKwpms:
        report.outcomes.push_back(
            Success(method, report.posterior->post_mean_smoothed));
        break;
      case Method::kKwpr:
        report.outcomes.push_back(Success(method, report.posterior->post_rank));
        break;
      case Method::kRmle:
        try {
          report.path = SolvePath(
              dataset, DefaultLambdaGrid(dataset, options.lasso_grid_points),
              options.lasso);
          const LassoSolution& best = SelectLambda(*report.path);
          report.selected_lambda = best.lambda;
          report.outcomes.push_back(Success(method, best.theta));
        } catch (const Error& e) {
          report.outcomes.push_back(Failure(method, e));
        }
        break;
      case Method::kBorda:
        report.outcomes.push_back(Success(method, BordaScores(dataset)));
        break;
      case Method::kWeightedBorda:
        report.outcomes.push_back(Success(method, WeightedBordaScores(dataset)));
        break;
    }
  }
  return report;
}

}  // namespace btrank
