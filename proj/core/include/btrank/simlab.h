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

// Monte Carlo comparison of rating methods: latent abilities are drawn from an
// ability law, matches are scheduled by a matching design, every method rates
// the players from the match outcomes alone, and each rating is scored by its
// Kendall tau against the true abilities.

#ifndef BTRANK_SIMLAB_H_
#define BTRANK_SIMLAB_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "btrank/comparisons.h"
#include "btrank/pipeline.h"
#include "btrank/scores.h"
#include "json.hpp"

namespace btrank {

using Rng = std::mt19937_64;

enum class AbilityLawKind {
  // alpha = exp(Z) + shift.
  kLogNormalShift,
  // alpha = low w.p. low_prob, else high; plus noise_scale * Z.
  kDiracMixture,
};

struct AbilityLaw {
  AbilityLawKind kind = AbilityLawKind::kLogNormalShift;
  double shift = 2.0;
  double low = 4.0;
  double high = 8.0;
  double low_prob = 0.8;
  double noise_scale = 1.0 / 3.0;
};

// Abilities at or below zero are clamped to this value.
inline constexpr double kMinAbility = 1e-6;

std::string_view LawName(AbilityLawKind kind);

// Ability for a standard normal draw `z` and, for the mixture, a uniform
// `u` in [0, 1) selecting the component. No clamping.
double AbilityFromDraws(const AbilityLaw& law, double z, double u);

struct AbilityDraw {
  Eigen::VectorXd alpha;
  int clamped = 0;
};

AbilityDraw DrawAbilities(const AbilityLaw& law, int num_players, Rng& rng);

enum class DesignKind {
  // RS: unordered pairs uniformly at random.
  kRandom,
  // LS: first player uniform, partner uniform among the `window` players
  // nearest in ability rank.
  kSimilar,
};

struct MatchingDesign {
  DesignKind kind = DesignKind::kRandom;
  int window = 5;
};

std::string DesignName(const MatchingDesign& design);

// For each player, the opponents an LS design may pair it with: the `window`
// nearest in ability rank, closer ranks first and the lower rank first at
// equal distance.
std::vector<std::vector<int>> SimilarAbilityNeighbors(
    const Eigen::VectorXd& alpha, int window);

// The winner of each match is drawn with P(i beats j) = alpha_i / (alpha_i +
// alpha_j). Records name the first-drawn player as `i`.
std::vector<MatchRecord> DrawMatches(const Eigen::VectorXd& alpha,
                                     const MatchingDesign& design,
                                     std::int64_t num_matches, Rng& rng);

struct SimConfig {
  int num_players = 100;
  std::vector<std::int64_t> sample_sizes = {1000, 5000, 10000, 50000, 100000};
  int replications = 100;
  std::vector<AbilityLaw> laws = {
      {AbilityLawKind::kLogNormalShift}, {AbilityLawKind::kDiracMixture}};
  std::vector<MatchingDesign> designs = {{DesignKind::kRandom},
                                         {DesignKind::kSimilar}};
  std::vector<Method> methods = {std::begin(kAllMethods),
                                 std::end(kAllMethods)};
  std::uint64_t seed = 20100101;
  // 0 uses the available hardware parallelism. Results do not depend on it.
  int threads = 0;
  EstimatorOptions estimators = [] {
    EstimatorOptions o;
    o.lasso_grid_points = 21;
    return o;
  }();
};

struct SimCell {
  AbilityLaw law;
  MatchingDesign design;
  std::int64_t num_matches = 0;
};

struct ReplicationRecord {
  std::string law;
  std::string design;
  std::int64_t num_matches = 0;
  Method method = Method::kMle;
  int replication = 0;
  // NaN when the replication failed.
  double tau = 0.0;
  // "ok", "retried" (ok on the retry draw), "constant" (the method gave every
  // player the same score; tau recorded as 0), or "failed".
  std::string status;
};

struct CellSummary {
  std::string law;
  std::string design;
  std::int64_t num_matches = 0;
  Method method = Method::kMle;
  double mean_tau = 0.0;
  double se_tau = 0.0;
  int n_ok = 0;
  int n_missing = 0;
};

struct SimResult {
  std::uint64_t seed = 0;
  std::vector<ReplicationRecord> records;
  std::vector<CellSummary> summary;
  // One line per failed draw, with the seed material needed to replay it.
  std::vector<std::string> failure_log;

  const CellSummary* Find(std::string_view law, std::string_view design,
                          std::int64_t num_matches, Method method) const;
  // True when some cell has no successful replication for some method.
  bool AnyCellWhollyFailed() const;
};

std::vector<SimCell> GridCells(const SimConfig& config);

// RNG stream for one replication attempt, derived from the seed and the
// cell's identity so cells and replications can run in any order.
Rng ReplicationRng(const SimConfig& config, const SimCell& cell,
                   int replication, int attempt);

SimResult RunCell(const SimConfig& config, const SimCell& cell);
SimResult RunGrid(const SimConfig& config);

// Columns law, design, n, method, replication, tau, status.
void WriteResultsCsv(std::ostream& out, const SimResult& result);
// Columns law, design, n, method, mean_tau, se_tau, n_ok.
void WriteSummaryCsv(std::ostream& out, const SimResult& result);

// Declarative config. Keys: num_players, sample_sizes, replications, laws
// ("lognormal" | "dirac"), designs ("RS" | "LS"), ls_window, methods, seed,
// threads, lasso_grid_points, npmle_grid_points. Throws Error(kInvalidInput)
// naming every unknown or invalid key.
SimConfig SimConfigFromJson(const nlohmann::json& json);
nlohmann::json SimConfigToJson(const SimConfig& config);

std::vector<std::string> PresetNames();
std::optional<SimConfig> PresetConfig(std::string_view name);

// A citation matrix drawn from the Bradley-Terry model with uneven citation
// volumes between journals. With `dominant_first`, journal 0 gets an
// ability well above everyone else.
struct CitationFixtureOptions {
  int journals = 86;
  double mean_volume = 40.0;
  bool dominant_first = false;
  std::uint64_t seed = 7;
};

CitationMatrix SyntheticCitationMatrix(const CitationFixtureOptions& options);

}  // namespace btrank

#endif  // BTRANK_SIMLAB_H_
