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

#include "cli/cli.h"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "btrank/btmle.h"
#include "btrank/comparisons.h"
#include "btrank/comparisons_io.h"
#include "btrank/error.h"
#include "btrank/fused_lasso.h"
#include "btrank/npmle.h"
#include "btrank/pipeline.h"
#include "btrank/scores.h"
#include "btrank/simlab.h"
#include "cli/manifest.h"
#include "json.hpp"

namespace btrank::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out_dir = ".";
  std::string format = "csv";
};

struct InputOptions {
  std::string path;
  // auto | dataset | citations | matches
  std::string type = "auto";
  std::string roster;
};

std::ifstream OpenInput(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot open " + path.string());
  return in;
}

std::ofstream OpenOutput(const fs::path& dir, const std::string& name,
                         std::vector<std::string>& outputs) {
  std::ofstream out(dir / name);
  if (!out) {
    throw Error(ErrorCode::kInvalidInput, "cannot write " + (dir / name).string());
  }
  outputs.push_back(name);
  return out;
}

fs::path PrepareOutDir(const GlobalOptions& global) {
  const fs::path dir(global.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kInvalidInput,
                "cannot create " + dir.string() + ": " + ec.message());
  }
  return dir;
}

std::string ResolveType(const InputOptions& input) {
  if (input.type != "auto") return input.type;
  const std::string ext = fs::path(input.path).extension().string();
  if (ext == ".json") return "dataset";
  throw Error(ErrorCode::kInvalidInput,
              "cannot infer the input type of " + input.path +
                  "; pass --input-type citations|matches|dataset");
}

ComparisonDataset LoadDataset(const InputOptions& input,
                              std::vector<fs::path>& inputs,
                              std::vector<std::string>& warnings) {
  const std::string type = ResolveType(input);
  inputs.emplace_back(input.path);
  std::ifstream in = OpenInput(input.path);
  if (type == "dataset") {
    json parsed;
    try {
      parsed = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParse, input.path + ": " + e.what());
    }
    return DatasetFromJson(parsed);
  }
  if (type == "citations") {
    return FromCitationMatrix(ReadCitationCsv(in), &warnings);
  }
  std::optional<std::vector<std::string>> roster;
  if (!input.roster.empty()) {
    inputs.emplace_back(input.roster);
    std::ifstream roster_in = OpenInput(input.roster);
    roster = ReadRoster(roster_in);
  }
  const MatchLog log = ReadMatchLog(in, roster ? &*roster : nullptr);
  ComparisonDataset dataset =
      Aggregate(log.records, log.num_players, log.labels);
  if (!IsConnected(dataset)) {
    warnings.push_back("comparison graph has " +
                       std::to_string(ConnectedComponents(dataset).size()) +
                       " components");
  }
  return dataset;
}

void AddInputOptions(CLI::App* cmd, InputOptions& input) {
  cmd->add_option("input", input.path, "Input file")->required();
  cmd->add_option("--input-type", input.type,
                  "citations, matches, or dataset (default: dataset for .json)")
      ->check(CLI::IsMember({"auto", "dataset", "citations", "matches"}));
  cmd->add_option("--roster", input.roster,
                  "Player labels, one per line; match logs must use only these");
}

void PrintWarnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

json InputConfig(const InputOptions& input) {
  return {{"input", input.path}, {"input_type", input.type},
          {"roster", input.roster}};
}

// ---- ingest ---------------------------------------------------------------

int RunIngest(const GlobalOptions& global, const InputOptions& input) {
  Manifest manifest;
  manifest.command = "ingest";
  manifest.config = InputConfig(input);
  manifest.seed = global.seed.value_or(0);
  std::vector<std::string> warnings;
  const ComparisonDataset dataset =
      LoadDataset(input, manifest.inputs, warnings);
  PrintWarnings(warnings);

  const fs::path dir = PrepareOutDir(global);
  OpenOutput(dir, "dataset.json", manifest.outputs)
      << DatasetToJson(dataset).dump(2) << '\n';
  const auto components = ConnectedComponents(dataset);
  json summary = {{"num_players", dataset.num_players()},
                  {"num_pairs", dataset.pairs().size()},
                  {"total_matches", dataset.total_matches()},
                  {"connected", components.size() <= 1},
                  {"num_components", components.size()},
                  {"components", components},
                  {"warnings", warnings}};
  OpenOutput(dir, "summary.json", manifest.outputs) << summary.dump(2) << '\n';
  WriteManifest(dir, manifest);
  std::cout << dataset.num_players() << " players, " << dataset.pairs().size()
            << " pairs, " << dataset.total_matches() << " comparisons, "
            << components.size() << " component(s)\n";
  return kExitOk;
}

// ---- rank -----------------------------------------------------------------

struct RankOptions {
  std::vector<std::string> methods;
  std::string ties = "weak";
  std::optional<double> bandwidth;
  bool smoothed_prior = false;
  int grid_points = GridSpec{}.num_atoms;
  int lambda_points = EstimatorOptions{}.lasso_grid_points;
};

json RankingsToJson(const EstimatorReport& report,
                    const ComparisonDataset& dataset) {
  json methods = json::array();
  for (const MethodOutcome& o : report.outcomes) {
    json entry = {{"method", MethodName(o.method)}, {"ok", o.ok}};
    if (o.ok) {
      const RankingTable table = MakeRankingTable(o.method, o.scores);
      json players = json::array();
      for (int v = 0; v < dataset.num_players(); ++v) {
        players.push_back({{"label", dataset.Label(v)},
                           {"score", table.scores[v]},
                           {"rank", table.ranks[v]}});
      }
      entry["players"] = players;
    } else {
      entry["error_code"] = ErrorCodeName(o.error_code);
      entry["error"] = o.error;
    }
    methods.push_back(entry);
  }
  return {{"methods", methods}};
}

int RunRank(const GlobalOptions& global, const InputOptions& input,
            const RankOptions& options) {
  std::vector<Method> methods;
  if (options.methods.empty()) {
    methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
  }
  for (const std::string& name : options.methods) {
    const auto method = ParseMethod(name);
    if (!method) {
      throw Error(ErrorCode::kInvalidInput, "unknown method '" + name + "'");
    }
    methods.push_back(*method);
  }
  EstimatorOptions est;
  est.ties = options.ties == "half" ? TieRule::kHalf : TieRule::kWeak;
  est.bandwidth = options.bandwidth;
  est.smoothed_rank_prior = options.smoothed_prior;
  est.grid.num_atoms = options.grid_points;
  est.lasso_grid_points = options.lambda_points;
  est.full_posterior = true;

  Manifest manifest;
  manifest.command = "rank";
  manifest.config = InputConfig(input);
  std::vector<std::string> names;
  for (Method m : methods) names.emplace_back(MethodName(m));
  manifest.config["methods"] = names;
  manifest.config["ties"] = options.ties;
  manifest.config["bandwidth"] =
      options.bandwidth ? json(*options.bandwidth) : json(nullptr);
  manifest.config["smoothed_prior"] = options.smoothed_prior;
  manifest.config["grid_points"] = options.grid_points;
  manifest.config["lambda_points"] = options.lambda_points;
  manifest.seed = global.seed.value_or(0);

  std::vector<std::string> warnings;
  const ComparisonDataset dataset =
      LoadDataset(input, manifest.inputs, warnings);
  PrintWarnings(warnings);
  const EstimatorReport report = RunEstimators(dataset, methods, est);

  const fs::path dir = PrepareOutDir(global);
  if (global.format == "json") {
    OpenOutput(dir, "rankings.json", manifest.outputs)
        << RankingsToJson(report, dataset).dump(2) << '\n';
  } else {
    std::vector<RankingTable> tables;
    for (const MethodOutcome& o : report.outcomes) {
      if (o.ok) tables.push_back(MakeRankingTable(o.method, o.scores));
    }
    auto out = OpenOutput(dir, "rankings.csv", manifest.outputs);
    WriteRankingCsv(out, tables, dataset);
  }
  if (report.fit) {
    OpenOutput(dir, "fit.json", manifest.outputs)
        << FitResultToJson(*report.fit, dataset).dump(2) << '\n';
  }
  if (report.mixing) {
    auto out = OpenOutput(dir, "mixing.csv", manifest.outputs);
    WriteMixingCsv(out, *report.mixing);
  }
  if (report.posterior && report.fit) {
    auto out = OpenOutput(dir, "posterior.csv", manifest.outputs);
    WritePosteriorCsv(out, dataset, *report.fit, *report.posterior);
    manifest.details["bandwidth"] = report.posterior->bandwidth;
  }
  if (report.selected_lambda) {
    manifest.details["selected_lambda"] = *report.selected_lambda;
  }

  int exit_code = kExitOk;
  json failures = json::array();
  for (const MethodOutcome& o : report.outcomes) {
    if (o.ok) continue;
    std::cerr << "error: " << MethodName(o.method) << ": " << o.error << '\n';
    failures.push_back({{"method", MethodName(o.method)},
                        {"error_code", ErrorCodeName(o.error_code)},
                        {"error", o.error}});
    const bool numerical = o.error_code == ErrorCode::kDisconnected ||
                           o.error_code == ErrorCode::kDivergent ||
                           o.error_code == ErrorCode::kNotConverged;
    exit_code = std::max(exit_code,
                         numerical ? kExitNumericalFailure : kExitInputError);
  }
  manifest.details["failures"] = failures;
  WriteManifest(dir, manifest);
  return exit_code;
}

// ---- path -----------------------------------------------------------------

struct PathOptions {
  std::vector<double> lambdas;
  int lambda_points = 51;
};

json PathToJson(const LassoPath& path, const ComparisonDataset& dataset) {
  const LassoSolution& selected = SelectLambda(path);
  json points = json::array();
  for (const LassoSolution& s : path.solutions) {
    json players = json::array();
    for (int v = 0; v < dataset.num_players(); ++v) {
      players.push_back({{"label", dataset.Label(v)},
                         {"alpha", s.alpha[v]},
                         {"group_id", s.group[v]}});
    }
    points.push_back({{"lambda", s.lambda},
                      {"k", s.num_groups},
                      {"loglik", s.loglik},
                      {"bic", s.bic},
                      {"certificate", s.certificate},
                      {"selected", &s == &selected},
                      {"players", players}});
  }
  return {{"path", points}, {"warnings", path.warnings}};
}

int RunPath(const GlobalOptions& global, const InputOptions& input,
            const PathOptions& options) {
  Manifest manifest;
  manifest.command = "path";
  manifest.config = InputConfig(input);
  manifest.seed = global.seed.value_or(0);
  std::vector<std::string> warnings;
  const ComparisonDataset dataset =
      LoadDataset(input, manifest.inputs, warnings);
  PrintWarnings(warnings);

  const std::vector<double> lambdas =
      options.lambdas.empty()
          ? DefaultLambdaGrid(dataset, options.lambda_points)
          : options.lambdas;
  manifest.config["lambdas"] = lambdas;
  const LassoPath path = SolvePath(dataset, lambdas);
  PrintWarnings(path.warnings);

  const fs::path dir = PrepareOutDir(global);
  if (global.format == "json") {
    OpenOutput(dir, "path.json", manifest.outputs)
        << PathToJson(path, dataset).dump(2) << '\n';
  } else {
    auto trajectories = OpenOutput(dir, "path.csv", manifest.outputs);
    WritePathCsv(trajectories, path, dataset);
    auto summary = OpenOutput(dir, "path_summary.csv", manifest.outputs);
    WritePathSummaryCsv(summary, path);
  }
  const LassoSolution& selected = SelectLambda(path);
  manifest.details["selected_lambda"] = selected.lambda;
  manifest.details["selected_k"] = selected.num_groups;
  manifest.details["warnings"] = path.warnings;
  WriteManifest(dir, manifest);
  std::cout << "selected lambda " << selected.lambda << " with "
            << selected.num_groups << " group(s)\n";
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateOptions {
  std::string config;
  std::string preset;
  bool list_presets = false;
};

json SimResultToJson(const SimResult& result, bool summary_only) {
  json out;
  if (summary_only) {
    json rows = json::array();
    for (const CellSummary& s : result.summary) {
      rows.push_back({{"law", s.law},
                      {"design", s.design},
                      {"n", s.num_matches},
                      {"method", MethodName(s.method)},
                      {"mean_tau", s.mean_tau},
                      {"se_tau", s.se_tau},
                      {"n_ok", s.n_ok}});
    }
    out["summary"] = rows;
  } else {
    json rows = json::array();
    for (const ReplicationRecord& r : result.records) {
      rows.push_back({{"law", r.law},
                      {"design", r.design},
                      {"n", r.num_matches},
                      {"method", MethodName(r.method)},
                      {"replication", r.replication},
                      {"tau", r.tau},
                      {"status", r.status}});
    }
    out["results"] = rows;
  }
  return out;
}

int RunSimulate(const GlobalOptions& global, const SimulateOptions& options) {
  if (options.list_presets) {
    for (const std::string& name : PresetNames()) std::cout << name << '\n';
    return kExitOk;
  }
  if (options.config.empty() == options.preset.empty()) {
    throw Error(ErrorCode::kInvalidInput,
                "simulate needs exactly one of --config or --preset");
  }
  Manifest manifest;
  manifest.command = "simulate";
  SimConfig config;
  if (!options.preset.empty()) {
    const auto preset = PresetConfig(options.preset);
    if (!preset) {
      throw Error(ErrorCode::kInvalidInput,
                  "unknown preset '" + options.preset + "'");
    }
    config = *preset;
  } else {
    manifest.inputs.emplace_back(options.config);
    std::ifstream in = OpenInput(options.config);
    json parsed;
    try {
      parsed = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParse, options.config + ": " + e.what());
    }
    config = SimConfigFromJson(parsed);
  }
  if (global.seed) config.seed = *global.seed;
  if (global.threads > 0) config.threads = global.threads;
  manifest.config = SimConfigToJson(config);
  // Thread count does not affect results, so it stays out of the hash.
  manifest.config.erase("threads");
  manifest.seed = config.seed;

  const SimResult result = RunGrid(config);

  const fs::path dir = PrepareOutDir(global);
  if (global.format == "json") {
    OpenOutput(dir, "results.json", manifest.outputs)
        << SimResultToJson(result, false).dump(2) << '\n';
    OpenOutput(dir, "summary.json", manifest.outputs)
        << SimResultToJson(result, true).dump(2) << '\n';
  } else {
    auto results = OpenOutput(dir, "results.csv", manifest.outputs);
    WriteResultsCsv(results, result);
    auto summary = OpenOutput(dir, "summary.csv", manifest.outputs);
    WriteSummaryCsv(summary, result);
  }
  {
    auto failures = OpenOutput(dir, "failures.log", manifest.outputs);
    for (const std::string& line : result.failure_log) failures << line << '\n';
  }
  OpenOutput(dir, "config.json", manifest.outputs)
      << manifest.config.dump(2) << '\n';
  manifest.details["failed_draws"] = result.failure_log.size();
  WriteManifest(dir, manifest);

  if (result.AnyCellWhollyFailed()) {
    std::cerr << "error: some cell has no successful replication\n";
    return kExitNumericalFailure;
  }
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args) {
  CLI::App app{"Paired-comparison rating and ranking", "btrank"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", BTRANK_VERSION);

  GlobalOptions global;
  app.add_option("--seed", global.seed,
                 "Random seed (simulate; recorded by every command)");
  app.add_option("--threads", global.threads,
                 "Worker threads, 0 for all available")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out-dir", global.out_dir, "Output directory");
  app.add_option("--format", global.format, "Table format")
      ->check(CLI::IsMember({"csv", "json"}));

  InputOptions ingest_input;
  CLI::App* ingest =
      app.add_subcommand("ingest", "Read comparison data into a dataset file");
  AddInputOptions(ingest, ingest_input);

  InputOptions rank_input;
  RankOptions rank_options;
  CLI::App* rank = app.add_subcommand("rank", "Rate and rank players");
  AddInputOptions(rank, rank_input);
  rank->add_option("--methods", rank_options.methods,
                   "Comma-separated methods: MLE,KWPM,KWPMs,KWPR,RMLE,B,WB")
      ->delimiter(',');
  rank->add_option("--ties", rank_options.ties, "Posterior rank ties")
      ->check(CLI::IsMember({"weak", "half"}));
  rank->add_option("--bandwidth", rank_options.bandwidth,
                   "KWPMs bandwidth (default: rule of thumb)")
      ->check(CLI::PositiveNumber);
  rank->add_flag("--smoothed-prior", rank_options.smoothed_prior,
                 "Use the smoothed mixing distribution for KWPR");
  rank->add_option("--grid-points", rank_options.grid_points,
                   "Atoms in the mixing-distribution grid")
      ->check(CLI::Range(2, 100000));
  rank->add_option("--lambda-points", rank_options.lambda_points,
                   "Lambda grid size for RMLE")
      ->check(CLI::Range(1, 10000));

  InputOptions path_input;
  PathOptions path_options;
  CLI::App* path =
      app.add_subcommand("path", "Grouped-lasso solution path with BIC");
  AddInputOptions(path, path_input);
  path->add_option("--lambdas", path_options.lambdas,
                   "Comma-separated increasing lambda values")
      ->delimiter(',');
  path->add_option("--lambda-points", path_options.lambda_points,
                   "Size of the default lambda grid")
      ->check(CLI::Range(1, 10000));

  SimulateOptions simulate_options;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo comparison of methods");
  simulate->add_option("--config", simulate_options.config, "JSON config file");
  simulate->add_option("--preset", simulate_options.preset, "Built-in config");
  simulate->add_flag("--list-presets", simulate_options.list_presets,
                     "Print preset names and exit");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*ingest) return RunIngest(global, ingest_input);
    if (*rank) return RunRank(global, rank_input, rank_options);
    if (*path) return RunPath(global, path_input, path_options);
    if (*simulate) return RunSimulate(global, simulate_options);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_numerical() ? kExitNumericalFailure : kExitInputError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace btrank::cli
