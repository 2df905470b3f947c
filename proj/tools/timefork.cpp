// SPDX-License-Identifier: MIT
//
// timefork — command-line front-end.
//
//   simulate   Monte Carlo runs of a mining strategy; JSON report (+ CSV).
//   markov     stationary analysis of the strategy's Markov chain over an
//              alpha grid; plot-ready CSV.
//   compare    simulation and analytic prediction side by side; CSV.
//   analyze    forensic scan of a block-header dump; JSON verdicts (+ per-pool
//              histogram CSV).
//   version    print the tool version.
//
// Exit codes: 0 success, 1 usage error, 2 data/configuration error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "timefork/timefork.hpp"

namespace {

constexpr const char* kVersion = "timefork 0.1.0";

std::vector<double> parse_grid(const std::string& spec) {
  double lo = 0.0, hi = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
      !(in >> std::ws).eof() || step <= 0.0 || hi < lo) {
    throw timefork::Error(timefork::ErrorCode::InvalidInput,
                          "bad grid '" + spec + "' (expected lo:hi:step)");
  }
  std::vector<double> out;
  for (int k = 0;; ++k) {
    // Snap accumulated grid points back onto clean decimals.
    const double x = std::round((lo + k * step) * 1e9) / 1e9;
    if (x > hi + 1e-9) break;
    out.push_back(x);
  }
  return out;
}

void emit(const std::optional<std::string>& path, const std::string& content) {
  if (path) {
    timefork::atomic_write_file(*path, content);
  } else {
    std::cout << content;
  }
}

// --- simulate ---

struct SimulateArgs {
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<std::string> csv_out;
  // Flag values; only applied when the user passed the flag.
  double alpha = 0.0;
  std::string strategy, timing, tie_break, stamp_policy, lambda;
  double mean_block_time = 0.0;
  std::int64_t n_blocks = 0;
  int n_trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t genesis_difficulty = 0;
  bool include_uncle_rewards = false;
};

timefork::SimConfig assemble_config(const SimulateArgs& a, CLI::App* cmd) {
  timefork::SimConfig cfg;
  if (a.config_path) {
    std::ifstream in(*a.config_path);
    if (!in) {
      throw timefork::Error(timefork::ErrorCode::Io,
                            "cannot open '" + *a.config_path + "'");
    }
    cfg = timefork::parse_config(in, cfg);
  }
  // Explicit flags override the file.
  if (cmd->count("--alpha")) cfg.alpha = a.alpha;
  if (cmd->count("--strategy"))
    timefork::set_config_field(cfg, "strategy", a.strategy);
  if (cmd->count("--mean-block-time")) cfg.mean_block_time = a.mean_block_time;
  if (cmd->count("--blocks")) cfg.n_blocks = a.n_blocks;
  if (cmd->count("--trials")) cfg.n_trials = a.n_trials;
  if (cmd->count("--seed")) cfg.seed = a.seed;
  if (cmd->count("--timing"))
    timefork::set_config_field(cfg, "timing", a.timing);
  if (cmd->count("--genesis-difficulty"))
    cfg.genesis_difficulty = a.genesis_difficulty;
  if (cmd->count("--fee-rate-lambda"))
    timefork::set_config_field(cfg, "fee_rate_lambda", a.lambda);
  if (cmd->count("--include-uncle-rewards"))
    cfg.include_uncle_rewards = a.include_uncle_rewards;
  if (cmd->count("--tie-break"))
    timefork::set_config_field(cfg, "tie_break", a.tie_break);
  if (cmd->count("--suum-stamp-policy"))
    timefork::set_config_field(cfg, "suum_stamp_policy", a.stamp_policy);
  return cfg;
}

int run_simulate(const SimulateArgs& a, CLI::App* cmd) {
  const timefork::SimConfig cfg = assemble_config(a, cmd);
  timefork::validate_config(cfg);
  if (timefork::config_below_metric_validity(cfg)) {
    std::cerr << "warning: n_blocks < 1000; forking/manipulation metrics will "
                 "be noisy\n";
  }
  const timefork::AggregateReport rep = timefork::run_experiment(cfg);
  emit(a.out, timefork::aggregate_report_json(rep).dump(2) + "\n");
  if (a.csv_out) emit(a.csv_out, timefork::sim_csv({rep}));
  return 0;
}

// --- markov ---

struct MarkovArgs {
  std::string strategy;
  std::string grid = "0:0.45:0.05";
  std::string timing = "discretized";
  std::string fidelity = "offset";
  double mean_block_time = 13.0;
  int truncate = 32;
  std::optional<std::string> out;
};

int run_markov(const MarkovArgs& a) {
  const auto strategy = timefork::parse_strategy(a.strategy);
  const timefork::TimingModel tm{timefork::parse_timing_kind(a.timing),
                                 a.mean_block_time};
  const auto fidelity = a.fidelity == "literal"
                            ? timefork::ChainFidelity::TableLiteral
                            : timefork::ChainFidelity::OffsetAware;
  std::vector<timefork::MarkovGridRow> rows;
  for (double alpha : parse_grid(a.grid)) {
    rows.push_back(timefork::evaluate_markov_point(*strategy, alpha, tm,
                                                   a.truncate, fidelity));
  }
  emit(a.out, timefork::markov_csv(rows));
  return 0;
}

// --- compare ---

struct CompareArgs {
  std::string grid = "0:0.5:0.05";
  std::string strategies = "honest,rum,uum,suum";
  std::string timing = "discretized";
  std::string tie_break = "first_seen";
  std::string stamp_policy = "theorem";
  std::string fidelity = "offset";
  std::int64_t n_blocks = 20'000;
  int n_trials = 10;
  std::uint64_t seed = 1;
  int truncate = 32;
  std::optional<std::string> out;
};

int run_compare(const CompareArgs& a) {
  std::vector<timefork::StrategyKind> strategies;
  std::istringstream list(a.strategies);
  std::string item;
  while (std::getline(list, item, ',')) {
    const auto k = timefork::parse_strategy(item);
    if (!k) {
      throw timefork::Error(timefork::ErrorCode::InvalidInput,
                            "unknown strategy '" + item + "'");
    }
    strategies.push_back(*k);
  }
  if (strategies.empty()) {
    throw timefork::Error(timefork::ErrorCode::InvalidInput,
                          "empty strategy list");
  }
  const auto fidelity = a.fidelity == "literal"
                            ? timefork::ChainFidelity::TableLiteral
                            : timefork::ChainFidelity::OffsetAware;
  std::vector<timefork::CompareRow> rows;
  for (timefork::StrategyKind strategy : strategies) {
    for (double alpha : parse_grid(a.grid)) {
      timefork::SimConfig cfg;
      cfg.strategy = strategy;
      cfg.alpha = alpha;
      cfg.n_blocks = a.n_blocks;
      cfg.n_trials = a.n_trials;
      cfg.seed = a.seed;
      timefork::set_config_field(cfg, "timing", a.timing);
      timefork::set_config_field(cfg, "tie_break", a.tie_break);
      timefork::set_config_field(cfg, "suum_stamp_policy", a.stamp_policy);
      timefork::validate_config(cfg);
      timefork::CompareRow row;
      row.sim = timefork::run_experiment(cfg);
      row.markov = timefork::evaluate_markov_point(
          strategy, alpha, cfg.timing_model(), a.truncate, fidelity);
      rows.push_back(std::move(row));
    }
  }
  emit(a.out, timefork::compare_csv(rows));
  return 0;
}

// --- analyze ---

struct AnalyzeArgs {
  std::string input;
  std::string format = "auto";
  int top_pools = 5;
  std::int64_t window_max = 45;
  std::int64_t min_sample = 200;
  std::optional<std::string> out;
  std::optional<std::string> hist_out;
};

int run_analyze(const AnalyzeArgs& a) {
  timefork::HeaderFormat format;
  if (a.format == "csv") {
    format = timefork::HeaderFormat::Csv;
  } else if (a.format == "jsonl") {
    format = timefork::HeaderFormat::Jsonl;
  } else {
    const bool jsonl = a.input.size() >= 6 &&
                       a.input.rfind(".jsonl") == a.input.size() - 6;
    format = jsonl ? timefork::HeaderFormat::Jsonl
                   : timefork::HeaderFormat::Csv;
  }
  std::ifstream in(a.input, std::ios::binary);
  if (!in) {
    throw timefork::Error(timefork::ErrorCode::Io,
                          "cannot open '" + a.input + "'");
  }
  const auto records = timefork::load_headers(in, format);
  const auto verdicts = timefork::detect(records, a.top_pools, a.window_max,
                                         a.min_sample);
  emit(a.out, timefork::verdicts_json(verdicts).dump(2) + "\n");

  std::vector<timefork::PoolStats> pools;
  for (const auto& miner : timefork::pool_rank(records, a.top_pools)) {
    pools.push_back(timefork::pool_stats(records, miner));
  }
  pools.push_back(timefork::pool_stats(records, std::nullopt));
  std::optional<std::string> hist_path = a.hist_out;
  if (!hist_path && a.out) hist_path = *a.out + ".hist.csv";
  if (hist_path) emit(hist_path, timefork::pool_histograms_csv(pools));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"timestamp-forking attack simulator and forensic analyzer"};
  app.require_subcommand(1);

  const std::vector<std::string> kStrategies = {"honest", "rum", "uum",
                                                "suum"};
  const std::vector<std::string> kTimings = {"continuous", "discretized"};

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Monte Carlo mining-strategy simulation");
  sim->add_option("--config", sim_args.config_path,
                  "key = value run configuration file");
  sim->add_option("--alpha", sim_args.alpha, "adversary hash share in [0,1)");
  sim->add_option("--strategy", sim_args.strategy, "mining strategy")
      ->check(CLI::IsMember(kStrategies));
  sim->add_option("--mean-block-time", sim_args.mean_block_time,
                  "mean block interval in seconds");
  sim->add_option("--blocks", sim_args.n_blocks, "block events per trial");
  sim->add_option("--trials", sim_args.n_trials, "independent trials");
  sim->add_option("--seed", sim_args.seed, "root RNG seed");
  sim->add_option("--timing", sim_args.timing, "block-interval model")
      ->check(CLI::IsMember(kTimings));
  sim->add_option("--genesis-difficulty", sim_args.genesis_difficulty,
                  "starting difficulty");
  sim->add_option("--fee-rate-lambda", sim_args.lambda,
                  "fee reward per second of block gap (decimal or a/b)");
  sim->add_flag("--include-uncle-rewards", sim_args.include_uncle_rewards,
                "credit uncle and nephew rewards");
  sim->add_option("--tie-break", sim_args.tie_break,
                  "equal-difficulty fork resolution")
      ->check(CLI::IsMember({"first_seen", "prefer_adversary"}));
  sim->add_option("--suum-stamp-policy", sim_args.stamp_policy,
                  "staircase release stamping")
      ->check(CLI::IsMember({"theorem", "mirror"}));
  sim->add_option("--out", sim_args.out, "JSON report path (default stdout)");
  sim->add_option("--csv-out", sim_args.csv_out, "also write a CSV summary");

  MarkovArgs markov_args;
  CLI::App* markov = app.add_subcommand(
      "markov", "stationary analysis over an alpha grid");
  markov->add_option("--strategy", markov_args.strategy, "mining strategy")
      ->required()
      ->check(CLI::IsMember(kStrategies));
  markov->add_option("--alpha-grid", markov_args.grid,
                     "grid lo:hi:step (inclusive)");
  markov->add_option("--timing", markov_args.timing, "block-interval model")
      ->check(CLI::IsMember(kTimings));
  markov->add_option("--mean-block-time", markov_args.mean_block_time,
                     "mean block interval in seconds");
  markov->add_option("--truncate", markov_args.truncate,
                     "staircase ladder truncation depth")
      ->check(CLI::Range(2, 4096));
  markov->add_option("--fidelity", markov_args.fidelity,
                     "chain construction: literal transition tables or "
                     "offset-aware refinement")
      ->check(CLI::IsMember({"literal", "offset"}));
  markov->add_option("--out", markov_args.out, "CSV path (default stdout)");

  CompareArgs compare_args;
  CLI::App* compare = app.add_subcommand(
      "compare", "simulation vs analytic prediction side by side");
  compare->add_option("--alpha-grid", compare_args.grid,
                      "grid lo:hi:step (inclusive)");
  compare->add_option("--strategies", compare_args.strategies,
                      "comma-separated strategy list");
  compare->add_option("--blocks", compare_args.n_blocks,
                      "block events per trial");
  compare->add_option("--trials", compare_args.n_trials, "independent trials");
  compare->add_option("--seed", compare_args.seed, "root RNG seed");
  compare->add_option("--timing", compare_args.timing, "block-interval model")
      ->check(CLI::IsMember(kTimings));
  compare->add_option("--tie-break", compare_args.tie_break,
                      "equal-difficulty fork resolution")
      ->check(CLI::IsMember({"first_seen", "prefer_adversary"}));
  compare->add_option("--suum-stamp-policy", compare_args.stamp_policy,
                      "staircase release stamping")
      ->check(CLI::IsMember({"theorem", "mirror"}));
  compare->add_option("--fidelity", compare_args.fidelity,
                      "analytic chain construction")
      ->check(CLI::IsMember({"literal", "offset"}));
  compare->add_option("--truncate", compare_args.truncate,
                      "staircase ladder truncation depth")
      ->check(CLI::Range(2, 4096));
  compare->add_option("--out", compare_args.out, "CSV path (default stdout)");

  AnalyzeArgs analyze_args;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "forensic scan of a block-header dump");
  analyze->add_option("--input", analyze_args.input, "header dump path")
      ->required();
  analyze->add_option("--format", analyze_args.format,
                      "input format (default: by extension)")
      ->check(CLI::IsMember({"auto", "csv", "jsonl"}));
  analyze->add_option("--top-pools", analyze_args.top_pools,
                      "how many top pools to scan")
      ->check(CLI::Range(1, 1000));
  analyze->add_option("--window-max", analyze_args.window_max,
                      "largest gap (seconds) in the scan window");
  analyze->add_option("--min-sample", analyze_args.min_sample,
                      "blocks required in-window before flagging");
  analyze->add_option("--out", analyze_args.out,
                      "verdict JSON path (default stdout)");
  analyze->add_option("--hist-out", analyze_args.hist_out,
                      "per-pool histogram CSV path (default <out>.hist.csv)");

  CLI::App* version = app.add_subcommand("version", "print version and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_args, sim);
    if (markov->parsed()) return run_markov(markov_args);
    if (compare->parsed()) return run_compare(compare_args);
    if (analyze->parsed()) return run_analyze(analyze_args);
    if (version->parsed()) {
      std::cout << kVersion << "\n";
      return 0;
    }
  } catch (const timefork::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
