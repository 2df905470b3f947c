// SPDX-License-Identifier: MIT
//
// Output serialization: pinned CSV column layouts, JSON report builders, and
// atomic file writes (temp file + rename, so readers never observe a partial
// artifact).

#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "timefork/errors.hpp"
#include "timefork/forensics.hpp"
#include "timefork/markov.hpp"
#include "timefork/sim.hpp"

namespace timefork {

// Shortest text that round-trips a double exactly; deterministic, so repeated
// runs with the same seed produce byte-identical files.
inline std::string format_double(double x) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline void atomic_write_file(const std::string& path,
                              const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::Io, "cannot open '" + tmp + "' for writing");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "short write to '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot move '" + tmp + "' to '" + path + "'");
  }
}

// --- simulation results ---

inline constexpr const char* kSimCsvHeader =
    "strategy,alpha,rr_attack,rr_attack_se,rr_honest,fr,fr_se,mr,mr_se";

inline std::string sim_csv_row(const AggregateReport& r) {
  std::string row = strategy_name(r.config.strategy);
  row += ',';
  row += format_double(r.config.alpha);
  for (double v : {r.rr_attack_mean, r.rr_attack_se, r.rr_honest_mean,
                   r.fr_mean, r.fr_se, r.mr_mean, r.mr_se}) {
    row += ',';
    row += format_double(v);
  }
  return row;
}

inline std::string sim_csv(const std::vector<AggregateReport>& reports) {
  std::string out = kSimCsvHeader;
  out += '\n';
  for (const auto& r : reports) {
    out += sim_csv_row(r);
    out += '\n';
  }
  return out;
}

inline nlohmann::json sim_config_json(const SimConfig& cfg) {
  return nlohmann::json{
      {"alpha", cfg.alpha},
      {"strategy", strategy_name(cfg.strategy)},
      {"mean_block_time", cfg.mean_block_time},
      {"n_blocks", cfg.n_blocks},
      {"n_trials", cfg.n_trials},
      {"seed", cfg.seed},
      {"timing", timing_kind_name(cfg.timing)},
      {"genesis_difficulty", cfg.genesis_difficulty},
      {"fee_rate_lambda", cfg.fee_rate_lambda.str()},
      {"include_uncle_rewards", cfg.include_uncle_rewards},
      {"tie_break", tie_rule_name(cfg.tie_break)},
      {"suum_stamp_policy", stamp_policy_name(cfg.suum_stamp_policy)},
  };
}

inline nlohmann::json aggregate_report_json(const AggregateReport& r) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) {
    trials.push_back(nlohmann::json{
        {"adversary_reward", t.adversary_reward.str()},
        {"honest_reward", t.honest_reward.str()},
        {"total_mainchain_blocks", t.total_mainchain_blocks},
        {"induced_forks", t.induced_forks},
        {"orphaned_honest_blocks", t.orphaned_honest_blocks},
        {"attack_infeasible_count", t.attack_infeasible_count},
        {"max_difficulty_gap_quanta", t.max_difficulty_gap_quanta.str()},
        {"final_difficulty", t.final_difficulty},
        {"rr_attack", t.rr_attack},
        {"rr_honest", t.rr_honest},
        {"fr", t.fr},
        {"mr", t.mr},
    });
  }
  return nlohmann::json{
      {"schema_version", 1},
      {"config", sim_config_json(r.config)},
      {"results",
       nlohmann::json{
           {"se_defined", r.se_defined},
           {"rr_attack_mean", r.rr_attack_mean},
           {"rr_attack_se", r.rr_attack_se},
           {"rr_honest_mean", r.rr_honest_mean},
           {"rr_honest_se", r.rr_honest_se},
           {"fr_mean", r.fr_mean},
           {"fr_se", r.fr_se},
           {"mr_mean", r.mr_mean},
           {"mr_se", r.mr_se},
           {"mr_max_quanta", r.mr_max_quanta},
           {"attack_share_delta", r.attack_share_delta},
           {"honest_share_delta", r.honest_share_delta},
       }},
      {"totals",
       nlohmann::json{
           {"events", r.total_events},
           {"fork_events", r.total_fork_events},
           {"induced_forks", r.total_induced_forks},
           {"orphaned_honest_blocks", r.total_orphans},
           {"attack_infeasible", r.total_infeasible},
       }},
      {"trials", trials},
  };
}

// --- analytic (Markov) results ---

inline constexpr const char* kMarkovCsvHeader =
    "strategy,alpha,pi_deploy,pi_downgrade,pi_attack_total,E_A,E_H,FR,AC";

inline std::string markov_csv_row(const MarkovGridRow& g) {
  std::string row = strategy_name(g.strategy);
  row += ',';
  row += format_double(g.alpha);
  for (double v : {g.pi_deploy, g.pi_downgrade, g.pi_attack_total, g.e_a,
                   g.e_h, g.fr, g.ac}) {
    row += ',';
    row += format_double(v);
  }
  return row;
}

inline std::string markov_csv(const std::vector<MarkovGridRow>& rows) {
  std::string out = kMarkovCsvHeader;
  out += '\n';
  for (const auto& g : rows) {
    out += markov_csv_row(g);
    out += '\n';
  }
  return out;
}

// --- side-by-side comparison (simulation vs analytic prediction) ---

struct CompareRow {
  AggregateReport sim;
  MarkovGridRow markov;
};

inline constexpr const char* kCompareCsvHeader =
    "strategy,alpha,rr_attack,rr_attack_se,rr_honest,fr,fr_se,mr,mr_se,"
    "markov_e_a,markov_e_h,markov_fr";

inline std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::string out = kCompareCsvHeader;
  out += '\n';
  for (const auto& row : rows) {
    out += sim_csv_row(row.sim);
    for (double v : {row.markov.e_a, row.markov.e_h, row.markov.fr}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

// --- forensic verdicts and histograms ---

inline nlohmann::json verdict_json(const ManipulationVerdict& v) {
  return nlohmann::json{
      {"miner", v.miner},
      {"avoidance_score", v.avoidance_score.to_double()},
      {"avoidance_score_exact", v.avoidance_score.str()},
      {"expected_at_multiples", v.expected_at_multiples.to_double()},
      {"observed_at_multiples", v.observed_at_multiples},
      {"flagged", v.flagged},
      {"sample_sufficient", v.sample_sufficient},
  };
}

inline nlohmann::json verdicts_json(
    const std::vector<ManipulationVerdict>& verdicts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : verdicts) arr.push_back(verdict_json(v));
  return nlohmann::json{{"schema_version", 1}, {"verdicts", arr}};
}

inline constexpr const char* kHistogramCsvHeader = "miner,dt,count";

inline std::string pool_histograms_csv(const std::vector<PoolStats>& pools) {
  std::string out = kHistogramCsvHeader;
  out += '\n';
  for (const auto& p : pools) {
    for (const auto& [dt, n] : p.dt_histogram) {
      out += p.miner;
      out += ',';
      out += std::to_string(dt);
      out += ',';
      out += std::to_string(n);
      out += '\n';
    }
  }
  return out;
}

}  // namespace timefork
