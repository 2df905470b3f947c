// SPDX-License-Identifier: MIT
//
// Discrete-event Monte Carlo of the full system: exponential block arrivals,
// Bernoulli finder assignment, strategy execution, per-height fork choice,
// exact reward accounting with recalls, and trial aggregation.

#pragma once

#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "timefork/constants.hpp"
#include "timefork/difficulty.hpp"
#include "timefork/header.hpp"
#include "timefork/rational.hpp"
#include "timefork/rewards.hpp"
#include "timefork/rng.hpp"
#include "timefork/stats.hpp"
#include "timefork/strategy.hpp"
#include "timefork/timing.hpp"

namespace timefork {

struct SimConfig {
  double alpha = 0.25;
  StrategyKind strategy = StrategyKind::Honest;
  double mean_block_time = 13.0;
  std::int64_t n_blocks = 100'000;
  int n_trials = 30;
  std::uint64_t seed = 1;
  TimingKind timing = TimingKind::ExponentialDiscretized;
  std::uint64_t genesis_difficulty = 4'000'000;
  Rational fee_rate_lambda = Rational(0);
  bool include_uncle_rewards = false;
  TieRule tie_break = TieRule::FirstSeen;
  StampPolicy suum_stamp_policy = StampPolicy::TheoremPoint;

  TimingModel timing_model() const { return {timing, mean_block_time}; }
};

inline void validate_config(const SimConfig& cfg) {
  if (cfg.alpha < 0.0 || cfg.alpha >= 1.0) {
    throw Error(ErrorCode::InvalidInput, "alpha must lie in [0,1)");
  }
  if (cfg.mean_block_time <= 0.0) {
    throw Error(ErrorCode::InvalidInput, "mean_block_time must be positive");
  }
  if (cfg.n_blocks < 1) {
    throw Error(ErrorCode::InvalidInput, "n_blocks must be positive");
  }
  if (cfg.n_trials < 1) {
    throw Error(ErrorCode::InvalidInput, "n_trials must be positive");
  }
  if (cfg.genesis_difficulty < kMinDifficulty) {
    throw Error(ErrorCode::InvalidInput,
                "genesis_difficulty below the difficulty floor");
  }
  if (cfg.fee_rate_lambda < Rational(0)) {
    throw Error(ErrorCode::InvalidInput, "fee_rate_lambda must be >= 0");
  }
}

// Metrics below this trial length carry too much variance to be meaningful.
inline bool config_below_metric_validity(const SimConfig& cfg) {
  return cfg.n_blocks < 1000;
}

struct TrialResult {
  // Headline fields.
  Rational adversary_reward = Rational(0);
  Rational honest_reward = Rational(0);
  std::int64_t total_mainchain_blocks = 0;  // blocks that were canonical at
                                            // some point (includes later
                                            // orphaned ones)
  std::int64_t induced_forks = 0;  // strategy's headline fork counter: every
                                   // replacement win for the replacement
                                   // attacks; cascade first-releases plus
                                   // downgrade wins for the staircase
  std::int64_t orphaned_honest_blocks = 0;
  std::int64_t attack_infeasible_count = 0;
  Rational max_difficulty_gap_quanta = Rational(0);
  std::uint64_t final_difficulty = 0;

  // Diagnostics and derived metrics.
  std::int64_t n_events = 0;
  std::int64_t fork_events = 0;        // every replacement publication
  std::int64_t replacement_wins = 0;   // replacements that became canonical
  std::int64_t release_wins = 0;
  std::int64_t first_release_wins = 0;
  std::int64_t downgrade_wins = 0;
  std::int64_t withheld_blocks = 0;
  std::int64_t discarded_private_blocks = 0;
  std::int64_t recalled_blocks = 0;
  std::int64_t mr_quanta_sum = 0;  // fork-event difficulty gaps are exact
                                   // multiples of the parent quantum
  std::int64_t canonical_height = 0;
  double rr_attack = 0.0;
  double rr_honest = 0.0;
  double fr = 0.0;
  double mr = 0.0;
};

// Difficulty-risk rate: adversarial difficulty excess at equal height,
// accumulated over all fork events, per block event — in parent-quantum
// units. Exact.
inline Rational measure_mr(const TrialResult& t) {
  if (t.n_events == 0) return Rational(0);
  return Rational(t.mr_quanta_sum, t.n_events);
}

struct AggregateReport {
  SimConfig config;
  bool se_defined = false;  // false for single-trial runs
  double rr_attack_mean = 0.0, rr_attack_se = 0.0;
  double rr_honest_mean = 0.0, rr_honest_se = 0.0;
  double fr_mean = 0.0, fr_se = 0.0;
  double mr_mean = 0.0, mr_se = 0.0;
  double mr_max_quanta = 0.0;  // largest single fork-event gap seen
  double attack_share_delta = 0.0;   // rr_attack_mean - alpha
  double honest_share_delta = 0.0;   // (1 - alpha) - rr_honest_mean
  std::int64_t total_events = 0;
  std::int64_t total_fork_events = 0;
  std::int64_t total_induced_forks = 0;
  std::int64_t total_orphans = 0;
  std::int64_t total_infeasible = 0;
  std::vector<TrialResult> trials;
};

// Deviation of the attacker's relative reward share from its hash share.
inline double fairness_check(const AggregateReport& report, double alpha) {
  return std::fabs(report.rr_attack_mean - alpha);
}

namespace detail {

struct SimBlock {
  std::int64_t id = 0;
  std::int64_t parent_id = kNoParent;
  std::int64_t height = 0;
  std::int64_t timestamp = 0;
  std::uint64_t difficulty = 0;
  int miner = 0;  // 0 honest pool, 1 adversary
  std::int64_t parent_timestamp = 0;
  std::uint64_t parent_difficulty = 0;

  std::int64_t dt() const { return timestamp - parent_timestamp; }

  BlockHeader header() const {
    BlockHeader h;
    h.height = height;
    h.timestamp = timestamp;
    h.difficulty = difficulty;
    h.parent_id = parent_id;
    h.miner = miner;
    h.id = id;
    return h;
  }
};

// Per-trial reward ledger: integer block counts plus gap sums keep the hot
// path in int64; the exact rational totals are assembled once at the end.
struct RewardLedger {
  bool fees = false;
  bool uncles = false;
  Rational lambda = Rational(0);

  std::int64_t blocks[2] = {0, 0};   // net canonical blocks by miner
  std::int64_t gross[2] = {0, 0};    // ever-canonical blocks by miner
  std::int64_t dt_sum[2] = {0, 0};   // sum of gaps over net canonical blocks
  Rational uncle_sum[2] = {Rational(0), Rational(0)};

  struct PendingUncle {
    std::int64_t height = 0;
    int miner = 0;
  };
  std::deque<PendingUncle> pending;

  void credit(const SimBlock& b, int uncles_included) {
    blocks[b.miner] += 1;
    gross[b.miner] += 1;
    if (fees) dt_sum[b.miner] += b.dt();
    if (uncles && uncles_included > 0) {
      uncle_sum[b.miner] += nephew_reward(uncles_included);
    }
  }

  void recall(const SimBlock& b) {
    blocks[b.miner] -= 1;
    if (fees) dt_sum[b.miner] -= b.dt();
  }

  // Reference up to two pending orphans from a new canonical block at
  // `height`; returns how many were included (their miners are credited the
  // distance-scaled orphan reward here).
  int include_uncles(std::int64_t height) {
    if (!uncles) return 0;
    int included = 0;
    while (!pending.empty() && included < 2) {
      const PendingUncle u = pending.front();
      const std::int64_t d = height - u.height;
      if (d < 1) break;  // same-height orphan: only a later block may take it
      pending.pop_front();
      if (d <= kUncleMaxDistance) {
        uncle_sum[u.miner] += uncle_reward(d);
        ++included;
      }
    }
    return included;
  }

  Rational total(int miner) const {
    Rational r = Rational(kCoinbase) * Rational(blocks[miner]);
    if (fees) r += lambda * Rational(dt_sum[miner]);
    if (uncles) r += uncle_sum[miner];
    return r;
  }
};

}  // namespace detail

// One deterministic trial. Every block-finding event advances the wall clock
// by an exponential draw and assigns the finder by a Bernoulli(alpha) draw;
// honest finds publish immediately with truthful clamped stamps; the strategy
// machine is consulted on every event and its actions are applied under the
// per-height fork rule.
inline TrialResult run_trial(const SimConfig& cfg, int trial_index) {
  validate_config(cfg);
  Rng rng(derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(trial_index)));

  detail::RewardLedger ledger;
  ledger.fees = cfg.fee_rate_lambda != Rational(0);
  ledger.uncles = cfg.include_uncle_rewards;
  ledger.lambda = cfg.fee_rate_lambda;

  TrialResult out;

  detail::SimBlock genesis;
  genesis.id = 0;
  genesis.parent_id = kNoParent;
  genesis.height = 0;
  genesis.timestamp = 0;
  genesis.difficulty = cfg.genesis_difficulty;
  genesis.parent_timestamp = 0;
  genesis.parent_difficulty = cfg.genesis_difficulty;

  detail::SimBlock tip = genesis;
  std::int64_t next_id = 1;
  StrategyState st = StrategyState::make(cfg.strategy);
  double wall = 0.0;
  // Discretized stamps floor one shared wall clock, so fractional phases
  // couple consecutive gaps (what the offset-aware analytic chains model);
  // the continuous variant re-bases every arrival on the public tip, making
  // stamp gaps independent truncated exponentials.
  const bool phase_coupled = cfg.timing == TimingKind::ExponentialDiscretized;

  auto make_extension = [&](const detail::SimBlock& parent, std::int64_t ts,
                            int miner) {
    detail::SimBlock b;
    b.id = next_id++;
    b.parent_id = parent.id;
    b.height = parent.height + 1;
    b.timestamp = ts;
    b.difficulty = compute_difficulty(parent.difficulty, 0, ts - parent.timestamp);
    b.miner = miner;
    b.parent_timestamp = parent.timestamp;
    b.parent_difficulty = parent.difficulty;
    return b;
  };
  // A replacement competes with `target` at the same height, on the same
  // parent (known only through the target's parent fields).
  auto make_replacement = [&](const detail::SimBlock& target, std::int64_t ts,
                              int miner) {
    detail::SimBlock b;
    b.id = next_id++;
    b.parent_id = target.parent_id;
    b.height = target.height;
    b.timestamp = ts;
    b.difficulty =
        compute_difficulty(target.parent_difficulty, 0, ts - target.parent_timestamp);
    b.miner = miner;
    b.parent_timestamp = target.parent_timestamp;
    b.parent_difficulty = target.parent_difficulty;
    return b;
  };

  auto credit_canonical = [&](const detail::SimBlock& b) {
    const int uncles_included = ledger.include_uncles(b.height);
    ledger.credit(b, uncles_included);
    out.total_mainchain_blocks += 1;
  };

  // Resolve a replacement fork: stamp-gap difficulty decides, exact ties go
  // by the configured rule. Returns true when the challenger won.
  auto resolve_fork = [&](const detail::SimBlock& incumbent,
                          const detail::SimBlock& challenger) {
    out.fork_events += 1;
    const std::uint64_t quantum = difficulty_quantum(incumbent.parent_difficulty);
    const std::int64_t gap_quanta =
        (static_cast<std::int64_t>(challenger.difficulty) -
         static_cast<std::int64_t>(incumbent.difficulty)) /
        static_cast<std::int64_t>(quantum);
    out.mr_quanta_sum += gap_quanta;
    if (Rational(gap_quanta) > out.max_difficulty_gap_quanta) {
      out.max_difficulty_gap_quanta = Rational(gap_quanta);
    }
    bool challenger_wins;
    if (challenger.difficulty == incumbent.difficulty) {
      challenger_wins = cfg.tie_break == TieRule::PreferAdversary;
    } else {
      const ForkChoice fc =
          fork_select(incumbent.header(), challenger.header(), incumbent.id);
      challenger_wins = fc.winner == challenger.id;
    }
    if (challenger_wins) {
      ledger.recall(incumbent);
      if (incumbent.miner == 0) out.orphaned_honest_blocks += 1;
      if (cfg.include_uncle_rewards) {
        ledger.pending.push_back({incumbent.height, incumbent.miner});
      }
      credit_canonical(challenger);
      out.replacement_wins += 1;
      tip = challenger;
    }
    return challenger_wins;
  };

  // Discard the staircase's private chain (failed or lost release): the
  // remaining withheld blocks can never be published.
  auto discard_private = [&](std::int64_t n_blocks_discarded) {
    out.discarded_private_blocks += n_blocks_discarded;
    out.attack_infeasible_count += 1;
    st = StrategyState::make(cfg.strategy);
  };

  for (std::int64_t event = 0; event < cfg.n_blocks; ++event) {
    out.n_events += 1;
    const double gap = rng.exponential(cfg.mean_block_time);
    wall += gap;
    const double arrival =
        phase_coupled ? wall : static_cast<double>(tip.timestamp) + gap;
    const bool adversary_finds = rng.bernoulli(cfg.alpha);

    if (!adversary_finds) {
      // Honest find: published immediately, extending the public tip.
      const detail::SimBlock prev_tip = tip;
      const detail::SimBlock hb = make_extension(
          prev_tip, honest_timestamp(arrival, prev_tip.timestamp), 0);
      assert(validate_header(hb.header(), prev_tip.header()).empty());
      credit_canonical(hb);
      tip = hb;

      MiningEvent ev;
      ev.finder = Finder::Honest;
      ev.arrival_time = arrival;
      ev.tip = hb.header();
      ev.tip_parent_timestamp = prev_tip.timestamp;
      const auto mode_before = st.mode;
      Action action;
      std::tie(st, action) =
          strategy_on_event(std::move(st), ev, nullptr, cfg.suum_stamp_policy);

      if (action.kind == Action::Kind::Release) {
        const bool first_release = st.release_index == 1;
        const detail::SimBlock ab =
            make_replacement(hb, action.release_stamps.front(), 1);
        const bool won = resolve_fork(hb, ab);
        if (won) {
          out.release_wins += 1;
          if (first_release) out.first_release_wins += 1;
        } else {
          // A lost release forfeits the whole private chain.
          discard_private(st.lead);
        }
      } else if (cfg.strategy == StrategyKind::Suum &&
                 mode_before == StrategyState::Mode::Attack &&
                 action.kind == Action::Kind::NoOp) {
        // Release infeasible at this height: the private chain is abandoned
        // (the unreleased block plus whatever remains withheld).
        discard_private(st.lead + 1);
      }
    } else {
      // Adversary find: consult the strategy against the current public tip.
      MiningEvent ev;
      ev.finder = Finder::Adversary;
      ev.arrival_time = arrival;
      ev.tip = tip.header();
      ev.tip_parent_timestamp = tip.parent_timestamp;
      const auto mode_before = st.mode;
      Action action;
      std::tie(st, action) =
          strategy_on_event(std::move(st), ev, nullptr, cfg.suum_stamp_policy);

      switch (action.kind) {
        case Action::Kind::Publish: {
          const bool replacement =
              mode_before == StrategyState::Mode::Attack ||
              mode_before == StrategyState::Mode::Downgrade;
          if (replacement) {
            const detail::SimBlock target = tip;
            const detail::SimBlock ab =
                make_replacement(target, action.timestamp, 1);
            const bool won = resolve_fork(target, ab);
            if (won && mode_before == StrategyState::Mode::Downgrade) {
              out.downgrade_wins += 1;
            }
          } else {
            const detail::SimBlock prev_tip = tip;
            const detail::SimBlock ab =
                make_extension(prev_tip, action.timestamp, 1);
            assert(validate_header(ab.header(), prev_tip.header()).empty());
            credit_canonical(ab);
            tip = ab;
          }
          break;
        }
        case Action::Kind::Withhold:
          out.withheld_blocks += 1;
          break;
        case Action::Kind::NoOp:
          if (mode_before == StrategyState::Mode::Attack ||
              mode_before == StrategyState::Mode::Downgrade) {
            // No stamp in the window dominates the target.
            out.attack_infeasible_count += 1;
          }
          break;
        case Action::Kind::Release:
          throw Error(ErrorCode::InvalidInput,
                      "strategy released on its own find");
      }
    }
  }

  // An unfinished private chain at trial end is simply dropped (not counted
  // as an infeasible attack; the trial ended mid-cascade).
  if (st.lead > 0) out.discarded_private_blocks += st.lead;

  out.adversary_reward = ledger.total(1);
  out.honest_reward = ledger.total(0);
  out.recalled_blocks =
      (ledger.gross[0] - ledger.blocks[0]) + (ledger.gross[1] - ledger.blocks[1]);
  out.final_difficulty = tip.difficulty;
  out.canonical_height = tip.height;

  switch (cfg.strategy) {
    case StrategyKind::Honest:
      out.induced_forks = 0;
      break;
    case StrategyKind::Rum:
    case StrategyKind::Uum:
      out.induced_forks = out.replacement_wins;
      break;
    case StrategyKind::Suum:
      out.induced_forks = out.first_release_wins + out.downgrade_wins;
      break;
  }

  const double adv = static_cast<double>(out.adversary_reward.num()) /
                     static_cast<double>(out.adversary_reward.den());
  const double hon = static_cast<double>(out.honest_reward.num()) /
                     static_cast<double>(out.honest_reward.den());
  const double total = adv + hon;
  out.rr_attack = total > 0.0 ? adv / total : 0.0;
  out.rr_honest = total > 0.0 ? hon / total : 0.0;
  out.fr = out.n_events > 0
               ? static_cast<double>(out.induced_forks) /
                     static_cast<double>(out.n_events)
               : 0.0;
  out.mr = out.n_events > 0
               ? static_cast<double>(out.mr_quanta_sum) /
                     static_cast<double>(out.n_events)
               : 0.0;
  return out;
}

namespace detail {

inline int worker_count(int n_trials) {
  int n = 0;
  if (const char* env = std::getenv("TIMEFORK_THREADS")) {
    n = std::atoi(env);
  }
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
  }
  return std::min(n, n_trials);
}

}  // namespace detail

// Run all trials (concurrently when allowed) and aggregate. Results are
// merged in trial order, so the report is identical to a sequential run.
inline AggregateReport run_experiment(const SimConfig& cfg) {
  validate_config(cfg);
  AggregateReport rep;
  rep.config = cfg;
  rep.trials.resize(static_cast<std::size_t>(cfg.n_trials));

  const int workers = detail::worker_count(cfg.n_trials);
  if (workers <= 1) {
    for (int i = 0; i < cfg.n_trials; ++i) {
      rep.trials[static_cast<std::size_t>(i)] = run_trial(cfg, i);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= cfg.n_trials) return;
          rep.trials[static_cast<std::size_t>(i)] = run_trial(cfg, i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  RunningStats rr_a, rr_h, fr, mr;
  for (const TrialResult& t : rep.trials) {
    rr_a.add(t.rr_attack);
    rr_h.add(t.rr_honest);
    fr.add(t.fr);
    mr.add(t.mr);
    const double gap = static_cast<double>(t.max_difficulty_gap_quanta.num()) /
                       static_cast<double>(t.max_difficulty_gap_quanta.den());
    rep.mr_max_quanta = std::max(rep.mr_max_quanta, gap);
    rep.total_events += t.n_events;
    rep.total_fork_events += t.fork_events;
    rep.total_induced_forks += t.induced_forks;
    rep.total_orphans += t.orphaned_honest_blocks;
    rep.total_infeasible += t.attack_infeasible_count;
  }
  rep.se_defined = cfg.n_trials > 1;
  rep.rr_attack_mean = rr_a.mean();
  rep.rr_honest_mean = rr_h.mean();
  rep.fr_mean = fr.mean();
  rep.mr_mean = mr.mean();
  if (rep.se_defined) {
    rep.rr_attack_se = rr_a.stderr_mean();
    rep.rr_honest_se = rr_h.stderr_mean();
    rep.fr_se = fr.stderr_mean();
    rep.mr_se = mr.stderr_mean();
  }
  rep.attack_share_delta = rep.rr_attack_mean - cfg.alpha;
  rep.honest_share_delta = (1.0 - cfg.alpha) - rep.rr_honest_mean;
  return rep;
}

}  // namespace timefork
