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

#include "btrank/simlab.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "btrank/error.h"
#include "btrank/format.h"

namespace btrank {
namespace {

struct ReplicationOutcome {
  std::vector<double> tau;
  std::vector<std::string> status;
  std::vector<std::string> failures;
};

std::string CellLabel(const SimCell& cell) {
  return std::string(LawName(cell.law.kind)) + "/" + DesignName(cell.design) +
         "/n=" + std::to_string(cell.num_matches);
}

ReplicationOutcome RunReplication(const SimConfig& config, const SimCell& cell,
                                  int replication) {
  ReplicationOutcome outcome;
  const size_t num_methods = config.methods.size();
  for (int attempt = 0; attempt < 2; ++attempt) {
    Rng rng = ReplicationRng(config, cell, replication, attempt);
    const AbilityDraw abilities =
        DrawAbilities(cell.law, config.num_players, rng);
    const auto matches =
        DrawMatches(abilities.alpha, cell.design, cell.num_matches, rng);
    std::string failure;
    try {
      const ComparisonDataset dataset = Aggregate(matches, config.num_players);
      const EstimatorReport report =
          RunEstimators(dataset, config.methods, config.estimators);
      for (const MethodOutcome& o : report.outcomes) {
        if (!o.ok) {
          failure += std::string(failure.empty() ? "" : "; ") +
                     std::string(MethodName(o.method)) + ": " + o.error;
        }
      }
      if (failure.empty()) {
        outcome.tau.resize(num_methods);
        outcome.status.resize(num_methods);
        for (size_t m = 0; m < num_methods; ++m) {
          const MethodOutcome& o = report.outcomes[m];
          try {
            outcome.tau[m] = KendallTau(abilities.alpha, o.scores);
            outcome.status[m] = attempt == 0 ? "ok" : "retried";
          } catch (const Error&) {
            outcome.tau[m] = 0.0;
            outcome.status[m] = "constant";
          }
        }
        return outcome;
      }
    } catch (const Error& e) {
      failure = e.what();
    }
    std::ostringstream log;
    log << CellLabel(cell) << " replication=" << replication
        << " attempt=" << attempt << " seed=" << config.seed << ": " << failure;
    outcome.failures.push_back(log.str());
  }
  outcome.tau.assign(num_methods, std::numeric_limits<double>::quiet_NaN());
  outcome.status.assign(num_methods, "failed");
  return outcome;
}

void Summarize(const SimConfig& config, const SimCell& cell,
               SimResult& result, size_t first_record) {
  for (size_t m = 0; m < config.methods.size(); ++m) {
    CellSummary s;
    s.law = LawName(cell.law.kind);
    s.design = DesignName(cell.design);
    s.num_matches = cell.num_matches;
    s.method = config.methods[m];
    std::vector<double> taus;
    for (size_t r = first_record; r < result.records.size(); ++r) {
      const ReplicationRecord& rec = result.records[r];
      if (rec.method != s.method) continue;
      if (rec.status == "failed") {
        ++s.n_missing;
      } else {
        taus.push_back(rec.tau);
      }
    }
    s.n_ok = static_cast<int>(taus.size());
    if (taus.empty()) {
      s.mean_tau = s.se_tau = std::numeric_limits<double>::quiet_NaN();
    } else {
      s.mean_tau = std::accumulate(taus.begin(), taus.end(), 0.0) / s.n_ok;
      if (s.n_ok > 1) {
        double ss = 0.0;
        for (double t : taus) ss += (t - s.mean_tau) * (t - s.mean_tau);
        s.se_tau = std::sqrt(ss / (s.n_ok - 1)) / std::sqrt(static_cast<double>(s.n_ok));
      } else {
        s.se_tau = std::numeric_limits<double>::quiet_NaN();
      }
    }
    result.summary.push_back(s);
  }
}

template <typename T>
std::vector<T> GetList(const nlohmann::json& json, const char* key,
                       std::vector<std::string>& problems) {
  try {
    return json.at(key).get<std::vector<T>>();
  } catch (const nlohmann::json::exception&) {
    problems.push_back(std::string(key) + " (expected a list)");
    return {};
  }
}

template <typename T>
T GetScalar(const nlohmann::json& json, const char* key,
            std::vector<std::string>& problems) {
  try {
    return json.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    problems.push_back(std::string(key) + " (wrong type)");
    return T{};
  }
}

SimConfig BasePreset(std::vector<AbilityLawKind> laws,
                     std::vector<DesignKind> designs,
                     std::vector<std::int64_t> sizes, int replications) {
  SimConfig config;
  config.laws.clear();
  for (AbilityLawKind k : laws) config.laws.push_back({k});
  config.designs.clear();
  for (DesignKind k : designs) config.designs.push_back({k});
  config.sample_sizes = std::move(sizes);
  config.replications = replications;
  return config;
}

}  // namespace

std::string_view LawName(AbilityLawKind kind) {
  switch (kind) {
    case AbilityLawKind::kLogNormalShift:
      return "lognormal";
    case AbilityLawKind::kDiracMixture:
      return "dirac";
  }
  return "?";
}

double AbilityFromDraws(const AbilityLaw& law, double z, double u) {
  switch (law.kind) {
    case AbilityLawKind::kLogNormalShift:
      return std::exp(z) + law.shift;
    case AbilityLawKind::kDiracMixture:
      return (u < law.low_prob ? law.low : law.high) + law.noise_scale * z;
  }
  return 0.0;
}

AbilityDraw DrawAbilities(const AbilityLaw& law, int num_players, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  AbilityDraw draw;
  draw.alpha.resize(num_players);
  for (int v = 0; v < num_players; ++v) {
    const double z = normal(rng);
    const double u = law.kind == AbilityLawKind::kDiracMixture ? uniform(rng) : 0.0;
    double alpha = AbilityFromDraws(law, z, u);
    if (alpha <= 0.0) {
      alpha = kMinAbility;
      ++draw.clamped;
    }
    draw.alpha[v] = alpha;
  }
  return draw;
}

std::string DesignName(const MatchingDesign& design) {
  if (design.kind == DesignKind::kRandom) return "RS";
  if (design.window == MatchingDesign{}.window) return "LS";
  return "LS:w=" + std::to_string(design.window);
}

std::vector<std::vector<int>> SimilarAbilityNeighbors(
    const Eigen::VectorXd& alpha, int window) {
  const int n = static_cast<int>(alpha.size());
  std::vector<int> by_rank(n);
  std::iota(by_rank.begin(), by_rank.end(), 0);
  std::stable_sort(by_rank.begin(), by_rank.end(),
                   [&](int a, int b) { return alpha[a] < alpha[b]; });
  const int width = std::clamp(window, 1, std::max(n - 1, 1));
  std::vector<std::vector<int>> neighbors(n);
  for (int r = 0; r < n; ++r) {
    auto& list = neighbors[by_rank[r]];
    for (int d = 1; static_cast<int>(list.size()) < width && d < n; ++d) {
      if (r - d >= 0) list.push_back(by_rank[r - d]);
      if (static_cast<int>(list.size()) < width && r + d < n) {
        list.push_back(by_rank[r + d]);
      }
    }
  }
  return neighbors;
}

std::vector<MatchRecord> DrawMatches(const Eigen::VectorXd& alpha,
                                     const MatchingDesign& design,
                                     std::int64_t num_matches, Rng& rng) {
  const int n = static_cast<int>(alpha.size());
  if (n < 2) throw Error(ErrorCode::kInvalidInput, "need at least two players");
  if (num_matches < 1) {
    throw Error(ErrorCode::kInvalidInput, "need at least one match");
  }
  std::uniform_int_distribution<int> first(0, n - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::vector<int>> neighbors;
  if (design.kind == DesignKind::kSimilar) {
    neighbors = SimilarAbilityNeighbors(alpha, design.window);
  }
  std::vector<MatchRecord> records;
  records.reserve(static_cast<size_t>(num_matches));
  for (std::int64_t k = 0; k < num_matches; ++k) {
    const int i = first(rng);
    int j = 0;
    if (design.kind == DesignKind::kRandom) {
      j = std::uniform_int_distribution<int>(0, n - 2)(rng);
      if (j >= i) ++j;
    } else {
      const auto& list = neighbors[i];
      j = list[std::uniform_int_distribution<size_t>(0, list.size() - 1)(rng)];
    }
    const bool i_wins = coin(rng) < alpha[i] / (alpha[i] + alpha[j]);
    records.push_back({i, j, i_wins});
  }
  return records;
}

const CellSummary* SimResult::Find(std::string_view law,
                                   std::string_view design,
                                   std::int64_t num_matches,
                                   Method method) const {
  for (const CellSummary& s : summary) {
    if (s.law == law && s.design == design && s.num_matches == num_matches &&
        s.method == method) {
      return &s;
    }
  }
  return nullptr;
}

bool SimResult::AnyCellWhollyFailed() const {
  return std::any_of(summary.begin(), summary.end(),
                     [](const CellSummary& s) { return s.n_ok == 0; });
}

std::vector<SimCell> GridCells(const SimConfig& config) {
  std::vector<SimCell> cells;
  for (const AbilityLaw& law : config.laws) {
    for (const MatchingDesign& design : config.designs) {
      for (std::int64_t n : config.sample_sizes) cells.push_back({law, design, n});
    }
  }
  return cells;
}

Rng ReplicationRng(const SimConfig& config, const SimCell& cell,
                   int replication, int attempt) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  const auto hi = [](std::uint64_t v) {
    return static_cast<std::uint32_t>(v >> 32);
  };
  const auto n = static_cast<std::uint64_t>(cell.num_matches);
  std::seed_seq seq{lo(config.seed),
                    hi(config.seed),
                    static_cast<std::uint32_t>(cell.law.kind),
                    static_cast<std::uint32_t>(cell.design.kind),
                    static_cast<std::uint32_t>(cell.design.window),
                    lo(n),
                    hi(n),
                    static_cast<std::uint32_t>(config.num_players),
                    static_cast<std::uint32_t>(replication),
                    static_cast<std::uint32_t>(attempt)};
  return Rng(seq);
}

SimResult RunCell(const SimConfig& config, const SimCell& cell) {
  if (config.replications < 1 || config.num_players < 2) {
    throw Error(ErrorCode::kInvalidInput,
                "simulation needs replications >= 1 and num_players >= 2");
  }
  std::vector<ReplicationOutcome> outcomes(config.replications);
  int workers = config.threads > 0
                    ? config.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, config.replications);
  if (workers == 1) {
    for (int r = 0; r < config.replications; ++r) {
      outcomes[r] = RunReplication(config, cell, r);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next++; r < config.replications; r = next++) {
          outcomes[r] = RunReplication(config, cell, r);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  SimResult result;
  result.seed = config.seed;
  for (int r = 0; r < config.replications; ++r) {
    for (size_t m = 0; m < config.methods.size(); ++m) {
      result.records.push_back({std::string(LawName(cell.law.kind)),
                                DesignName(cell.design), cell.num_matches,
                                config.methods[m], r, outcomes[r].tau[m],
                                outcomes[r].status[m]});
    }
    result.failure_log.insert(result.failure_log.end(),
                              outcomes[r].failures.begin(),
                              outcomes[r].failures.end());
  }
  Summarize(config, cell, result, 0);
  return result;
}

SimResult RunGrid(const SimConfig& config) {
  SimResult result;
  result.seed = config.seed;
  for (const SimCell& cell : GridCells(config)) {
    SimResult part = RunCell(config, cell);
    result.records.insert(result.records.end(), part.records.begin(),
                          part.records.end());
    result.summary.insert(result.summary.end(), part.summary.begin(),
                          part.summary.end());
    result.failure_log.insert(result.failure_log.end(),
                              part.failure_log.begin(), part.failure_log.end());
  }
  return result;
}

void WriteResultsCsv(std::ostream& out, const SimResult& result) {
  out << "law,design,n,method,replication,tau,status\n";
  for (const ReplicationRecord& r : result.records) {
    out << r.law << ',' << r.design << ',' << r.num_matches << ','
        << MethodName(r.method) << ',' << r.replication << ','
        << FormatDouble(r.tau) << ',' << r.status << '\n';
  }
}

void WriteSummaryCsv(std::ostream& out, const SimResult& result) {
  out << "law,design,n,method,mean_tau,se_tau,n_ok\n";
  for (const CellSummary& s : result.summary) {
    out << s.law << ',' << s.design << ',' << s.num_matches << ','
        << MethodName(s.method) << ',' << FormatDouble(s.mean_tau) << ','
        << FormatDouble(s.se_tau) << ',' << s.n_ok << '\n';
  }
}

SimConfig SimConfigFromJson(const nlohmann::json& json) {
  if (!json.is_object()) {
    throw Error(ErrorCode::kInvalidInput, "simulation config must be an object");
  }
  static const std::set<std::string> kKeys = {
      "num_players", "sample_sizes", "replications",      "laws",
      "designs",     "ls_window",    "methods",           "seed",
      "threads",     "lasso_grid_points", "npmle_grid_points"};
  std::vector<std::string> problems;
  for (const auto& [key, _] : json.items()) {
    if (!kKeys.contains(key)) problems.push_back(key + " (unknown key)");
  }

  SimConfig config;
  if (json.contains("num_players")) {
    config.num_players = GetScalar<int>(json, "num_players", problems);
    if (config.num_players < 2) problems.push_back("num_players (must be >= 2)");
  }
  if (json.contains("sample_sizes")) {
    config.sample_sizes = GetList<std::int64_t>(json, "sample_sizes", problems);
    if (config.sample_sizes.empty() ||
        std::any_of(config.sample_sizes.begin(), config.sample_sizes.end(),
                    [](std::int64_t n) { return n < 1; })) {
      problems.push_back("sample_sizes (need positive sizes)");
    }
  }
  if (json.contains("replications")) {
    config.replications = GetScalar<int>(json, "replications", problems);
    if (config.replications < 1) problems.push_back("replications (must be >= 1)");
  }
  if (json.contains("laws")) {
    config.laws.clear();
    for (const std::string& name : GetList<std::string>(json, "laws", problems)) {
      if (name == "lognormal") {
        config.laws.push_back({AbilityLawKind::kLogNormalShift});
      } else if (name == "dirac") {
        config.laws.push_back({AbilityLawKind::kDiracMixture});
      } else {
        problems.push_back("laws (unknown law '" + name + "')");
      }
    }
    if (config.laws.empty()) problems.push_back("laws (empty)");
  }
  int window = MatchingDesign{}.window;
  if (json.contains("ls_window")) {
    window = GetScalar<int>(json, "ls_window", problems);
    if (window < 1) problems.push_back("ls_window (must be >= 1)");
  }
  if (json.contains("designs")) {
    config.designs.clear();
    for (const std::string& name :
         GetList<std::string>(json, "designs", problems)) {
      if (name == "RS") {
        config.designs.push_back({DesignKind::kRandom, window});
      } else if (name == "LS") {
        config.designs.push_back({DesignKind::kSimilar, window});
      } else {
        problems.push_back("designs (unknown design '" + name + "')");
      }
    }
    if (config.designs.empty()) problems.push_back("designs (empty)");
  } else {
    for (MatchingDesign& d : config.designs) d.window = window;
  }
  if (json.contains("methods")) {
    config.methods.clear();
    for (const std::string& name :
         GetList<std::string>(json, "methods", problems)) {
      const auto method = ParseMethod(name);
      if (method) {
        config.methods.push_back(*method);
      } else {
        problems.push_back("methods (unknown method '" + name + "')");
      }
    }
    if (config.methods.empty()) problems.push_back("methods (empty)");
  }
  if (json.contains("seed")) {
    config.seed = GetScalar<std::uint64_t>(json, "seed", problems);
  }
  if (json.contains("threads")) {
    config.threads = GetScalar<int>(json, "threads", problems);
    if (config.threads < 0) problems.push_back("threads (must be >= 0)");
  }
  if (json.contains("lasso_grid_points")) {
    config.estimators.lasso_grid_points =
        GetScalar<int>(json, "lasso_grid_points", problems);
    if (config.estimators.lasso_grid_points < 1) {
      problems.push_back("lasso_grid_points (must be >= 1)");
    }
  }
  if (json.contains("npmle_grid_points")) {
    config.estimators.grid.num_atoms =
        GetScalar<int>(json, "npmle_grid_points", problems);
    if (config.estimators.grid.num_atoms < 2) {
      problems.push_back("npmle_grid_points (must be >= 2)");
    }
  }
  if (!problems.empty()) {
    std::string message = "invalid simulation config:";
    for (const auto& p : problems) message += " " + p + ";";
    throw Error(ErrorCode::kInvalidInput, message);
  }
  return config;
}

nlohmann::json SimConfigToJson(const SimConfig& config) {
  std::vector<std::string> laws, designs, methods;
  for (const AbilityLaw& law : config.laws) laws.emplace_back(LawName(law.kind));
  for (const MatchingDesign& d : config.designs) {
    designs.push_back(d.kind == DesignKind::kRandom ? "RS" : "LS");
  }
  for (Method m : config.methods) methods.emplace_back(MethodName(m));
  const int window =
      config.designs.empty() ? MatchingDesign{}.window : config.designs.front().window;
  return {{"num_players", config.num_players},
          {"sample_sizes", config.sample_sizes},
          {"replications", config.replications},
          {"laws", laws},
          {"designs", designs},
          {"ls_window", window},
          {"methods", methods},
          {"seed", config.seed},
          {"threads", config.threads},
          {"lasso_grid_points", config.estimators.lasso_grid_points},
          {"npmle_grid_points", config.estimators.grid.num_atoms}};
}

std::vector<std::string> PresetNames() {
  return {"smoke",
          "lognormal-rs",
          "lognormal-ls",
          "dirac-rs",
          "dirac-ls",
          "full-grid",
          "full-grid-reduced",
          "accept-dirac-ls",
          "accept-lognormal-rs-50k",
          "accept-lognormal-rs-100k"};
}

std::optional<SimConfig> PresetConfig(std::string_view name) {
  using L = AbilityLawKind;
  using D = DesignKind;
  const std::vector<std::int64_t> kSizes = {1000, 5000, 10000, 50000, 100000};
  const std::vector<Method> kCriterionMethods = {
      Method::kMle, Method::kKwpm, Method::kBorda, Method::kWeightedBorda};
  if (name == "smoke") {
    SimConfig c = BasePreset({L::kLogNormalShift}, {D::kRandom}, {400, 800}, 2);
    c.num_players = 12;
    c.estimators.lasso_grid_points = 11;
    c.seed = 1;
    return c;
  }
  if (name == "lognormal-rs") {
    return BasePreset({L::kLogNormalShift}, {D::kRandom}, kSizes, 100);
  }
  if (name == "lognormal-ls") {
    return BasePreset({L::kLogNormalShift}, {D::kSimilar}, kSizes, 100);
  }
  if (name == "dirac-rs") {
    return BasePreset({L::kDiracMixture}, {D::kRandom}, kSizes, 100);
  }
  if (name == "dirac-ls") {
    return BasePreset({L::kDiracMixture}, {D::kSimilar}, kSizes, 100);
  }
  if (name == "full-grid") {
    return BasePreset({L::kLogNormalShift, L::kDiracMixture},
                      {D::kRandom, D::kSimilar}, kSizes, 100);
  }
  if (name == "full-grid-reduced") {
    return BasePreset({L::kLogNormalShift, L::kDiracMixture},
                      {D::kRandom, D::kSimilar}, kSizes, 20);
  }
  if (name == "accept-dirac-ls") {
    SimConfig c = BasePreset({L::kDiracMixture}, {D::kSimilar}, {10000}, 20);
    c.methods = kCriterionMethods;
    return c;
  }
  if (name == "accept-lognormal-rs-50k") {
    SimConfig c = BasePreset({L::kLogNormalShift}, {D::kRandom}, {50000}, 20);
    c.methods = kCriterionMethods;
    return c;
  }
  if (name == "accept-lognormal-rs-100k") {
    SimConfig c = BasePreset({L::kLogNormalShift}, {D::kRandom}, {100000}, 10);
    c.methods = kCriterionMethods;
    return c;
  }
  return std::nullopt;
}

CitationMatrix SyntheticCitationMatrix(const CitationFixtureOptions& options) {
  const int n = options.journals;
  if (n < 2) throw Error(ErrorCode::kInvalidInput, "need at least two journals");
  Rng rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> theta(n), size(n);
  for (int v = 0; v < n; ++v) {
    theta[v] = 0.8 * normal(rng);
    size[v] = std::exp(0.7 * normal(rng));
  }
  if (options.dominant_first) {
    theta[0] = *std::max_element(theta.begin(), theta.end()) + 1.5;
  }
  CitationMatrix m;
  m.counts.assign(n, std::vector<std::int64_t>(n, 0));
  for (int v = 0; v < n; ++v) {
    char label[16];
    std::snprintf(label, sizeof(label), "J%02d", v + 1);
    m.labels.emplace_back(label);
    std::poisson_distribution<std::int64_t> self(3.0 * options.mean_volume * size[v]);
    m.counts[v][v] = self(rng);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      std::poisson_distribution<std::int64_t> volume_dist(
          options.mean_volume * size[i] * size[j]);
      std::int64_t volume = volume_dist(rng);
      // Keep the comparison graph connected along the chain of journals.
      if (j == i + 1 && volume == 0) volume = 1;
      if (volume == 0) continue;
      const double pi = 1.0 / (1.0 + std::exp(-(theta[i] - theta[j])));
      std::binomial_distribution<std::int64_t> cited(volume, pi);
      const std::int64_t wins = cited(rng);
      m.counts[i][j] = wins;
      m.counts[j][i] = volume - wins;
    }
  }
  return m;
}

}  // namespace btrank
