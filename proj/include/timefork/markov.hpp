// SPDX-License-Identifier: MIT
//
// Analytic evaluation of the attack strategies: build their Markov chains
// with transition probabilities induced by the adversary power alpha and the
// timing model, solve stationary distributions, and evaluate reward-share,
// forking-rate, and attack-cost formulas.
//
// Two chain fidelities are provided. TableLiteral is the strategy transition
// table taken at face value: one state per table mode, timing guards applied
// as if every gap were drawn fresh. OffsetAware additionally tracks what the
// event history does to the next stamped gap — the tip's stamp lag after a
// backdated replacement or a clamped stamp, and the fractional-second phase
// of the last arrival — by expanding each table mode into lag/phase
// sub-states. The literal chain is the reference shape; the offset-aware one
// is the high-accuracy companion used for simulation agreement.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "timefork/constants.hpp"
#include "timefork/errors.hpp"
#include "timefork/rational.hpp"
#include "timefork/strategy.hpp"
#include "timefork/timing.hpp"

namespace timefork {

using BigRational = boost::multiprecision::cpp_rational;

enum class ChainFidelity { TableLiteral, OffsetAware };

inline const char* chain_fidelity_name(ChainFidelity f) {
  return f == ChainFidelity::TableLiteral ? "table-literal" : "offset-aware";
}

// Coarse class of a chain state, used for reporting occupancies.
enum class StateClass { Deploy, Downgrade, Attack };

// One transition edge. Rewards are in block units: r_h / r_a are the net
// canonical-chain blocks credited to honest participants / the adversary by
// this event, with -1 entries recording recalls (a previously credited honest
// block orphaned by a replacement).
struct Transition {
  int src = 0;
  int dst = 0;
  double p = 0.0;
  double r_h = 0.0;
  double r_a = 0.0;
};

struct TransitionModel {
  StrategyKind strategy = StrategyKind::Honest;
  double alpha = 0.0;
  TimingModel timing;
  int truncate_n = 32;
  ChainFidelity fidelity = ChainFidelity::TableLiteral;

  std::vector<std::string> state_names;
  std::vector<StateClass> state_class;
  std::vector<Transition> transitions;

  int n_states() const { return static_cast<int>(state_names.size()); }

  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n_states(), n_states());
    for (const auto& t : transitions) p(t.src, t.dst) += t.p;
    return p;
  }

  // Largest deviation of any row sum from 1.
  double max_row_sum_error() const {
    std::vector<double> sums(state_names.size(), 0.0);
    for (const auto& t : transitions) sums[t.src] += t.p;
    double err = 0.0;
    for (double s : sums) err = std::max(err, std::fabs(s - 1.0));
    return err;
  }
};

struct StationaryDistribution {
  std::vector<double> probabilities;
  double residual = 0.0;
};

struct AbsoluteShares {
  double r_h = 0.0;
  double r_a = 0.0;
};

struct RelativeShares {
  double e_h = 0.0;
  double e_a = 0.0;
};

// ---------------------------------------------------------------------------
// Table-literal chain builders
// ---------------------------------------------------------------------------

namespace detail {

inline void add_edge(TransitionModel& m, int src, int dst, double p,
                     double r_h, double r_a) {
  if (p > 0.0) m.transitions.push_back({src, dst, p, r_h, r_a});
}

inline TransitionModel build_honest_chain(double alpha, const TimingModel& tm) {
  TransitionModel m;
  m.strategy = StrategyKind::Honest;
  m.alpha = alpha;
  m.timing = tm;
  m.state_names = {"deploy"};
  m.state_class = {StateClass::Deploy};
  add_edge(m, 0, 0, alpha, 0.0, 1.0);
  add_edge(m, 0, 0, 1.0 - alpha, 1.0, 0.0);
  return m;
}

// Two-state replacement-attack chain. `s` is the probability that an honest
// gap falls in the strategy's attack window; it guards both arming a fresh
// target and staying armed on a retargeted one.
inline TransitionModel build_replacement_chain(StrategyKind kind, double alpha,
                                               const TimingModel& tm,
                                               double s) {
  TransitionModel m;
  m.strategy = kind;
  m.alpha = alpha;
  m.timing = tm;
  m.state_names = {"deploy", "attack"};
  m.state_class = {StateClass::Deploy, StateClass::Attack};
  const int kD = 0, kA = 1;
  // Deployment: adversary finds publish honestly; honest gaps in the window
  // arm the attack.
  add_edge(m, kD, kD, alpha, 0.0, 1.0);
  add_edge(m, kD, kA, (1.0 - alpha) * s, 1.0, 0.0);
  add_edge(m, kD, kD, (1.0 - alpha) * (1.0 - s), 1.0, 0.0);
  // Attack: an adversary find replaces the target (recalling its credit);
  // honest gaps either retarget or stand down.
  add_edge(m, kA, kD, alpha, -1.0, 1.0);
  add_edge(m, kA, kA, (1.0 - alpha) * s, 1.0, 0.0);
  add_edge(m, kA, kD, (1.0 - alpha) * (1.0 - s), 1.0, 0.0);
  return m;
}

inline TransitionModel build_staircase_chain(double alpha,
                                             const TimingModel& tm,
                                             int truncate_n) {
  if (truncate_n < 1) {
    throw Error(ErrorCode::InvalidInput,
                "staircase truncation depth must be at least 1");
  }
  const TimingProbabilities tp = timing_probabilities(tm);
  TransitionModel m;
  m.strategy = StrategyKind::Suum;
  m.alpha = alpha;
  m.timing = tm;
  m.truncate_n = truncate_n;
  const int n = truncate_n;
  // States: deploy, downgrade, attack(1..n), attack-top (truncation closure).
  m.state_names = {"deploy", "downgrade"};
  m.state_class = {StateClass::Deploy, StateClass::Downgrade};
  for (int i = 1; i <= n; ++i) {
    m.state_names.push_back("attack" + std::to_string(i));
    m.state_class.push_back(StateClass::Attack);
  }
  m.state_names.push_back("attack-top");
  m.state_class.push_back(StateClass::Attack);
  const int kD = 0, kG = 1;
  auto attack = [&](int i) { return 1 + i; };  // attack(i) index
  const int kTop = attack(n) + 1;

  // Deployment: own finds are withheld; honest one-bucket gaps open the
  // downgrade window.
  add_edge(m, kD, attack(1), alpha, 0.0, 0.0);
  add_edge(m, kD, kG, (1.0 - alpha) * tp.p_ge9, 1.0, 0.0);
  add_edge(m, kD, kD, (1.0 - alpha) * tp.p_lt9, 1.0, 0.0);
  // Downgrade: behaves as the unrestricted replacement attack.
  add_edge(m, kG, kD, alpha, -1.0, 1.0);
  add_edge(m, kG, kG, (1.0 - alpha) * tp.p_ge9, 1.0, 0.0);
  add_edge(m, kG, kD, (1.0 - alpha) * tp.p_lt9, 1.0, 0.0);
  // Attack ladder: own finds extend the lead, honest finds trigger a release
  // that replaces the just-published honest block (so the honest credit and
  // its recall cancel: net r_h = 0, r_a = +1).
  for (int i = 1; i <= n; ++i) {
    const int up = i == n ? kTop : attack(i + 1);
    add_edge(m, attack(i), up, alpha, 0.0, 0.0);
    const int down = i == 1 ? kD : attack(i - 1);
    add_edge(m, attack(i), down, 1.0 - alpha, 0.0, 1.0);
  }
  // Truncation closure: extra finds at the cap are dropped (self-loop with
  // the withhold reward), honest finds release as usual.
  add_edge(m, kTop, kTop, alpha, 0.0, 0.0);
  add_edge(m, kTop, attack(n), 1.0 - alpha, 0.0, 1.0);
  return m;
}

// ---------------------------------------------------------------------------
// Offset-aware chain builders (discretized timing only)
// ---------------------------------------------------------------------------

// Joint law of (next stamped gap D, next arrival phase) given the current
// arrival phase, for exponential inter-arrival times and floor-of-wall-clock
// stamps: with phase bins of width 1/B, the probability of gap k >= 1 landing
// in destination bin j from source bin i factorizes as
// src_factor(i) * dst_factor(j) * exp(-k/m).
struct PhaseLaw {
  int bins;
  double mean;
  std::vector<double> src_factor;   // (m/h)(e^{b/m} - e^{a/m}) per source bin
  std::vector<double> dst_factor;   // e^{-a/m} - e^{-b/m} per destination bin
  double same_bin_zero;             // P(D=0, same bin), uniform within bin
  double geo;                       // e^{-1/m}

  explicit PhaseLaw(int b, double m) : bins(b), mean(m) {
    const double h = 1.0 / bins;
    src_factor.resize(bins);
    dst_factor.resize(bins);
    for (int i = 0; i < bins; ++i) {
      const double a = i * h, bb = (i + 1) * h;
      src_factor[i] = (mean / h) * (std::exp(bb / mean) - std::exp(a / mean));
      dst_factor[i] = std::exp(-a / mean) - std::exp(-bb / mean);
    }
    same_bin_zero = (h - mean * (1.0 - std::exp(-h / mean))) / h;
    geo = std::exp(-1.0 / mean);
  }

  // P(D = k, dst bin j | src bin i) for k >= 0.
  double p(int i, int k, int j) const {
    if (k == 0) {
      if (j < i) return 0.0;
      if (j == i) return same_bin_zero;
      return src_factor[i] * dst_factor[j];
    }
    return src_factor[i] * dst_factor[j] * std::pow(geo, k);
  }

  // P(D >= k0, dst bin j | src bin i) for k0 >= 1 (tail lump).
  double tail(int i, int k0, int j) const {
    return src_factor[i] * dst_factor[j] * std::pow(geo, k0) / (1.0 - geo);
  }
};

// Offset-aware replacement-attack chains. Modes:
//   dep(L): no armed target; the public tip's stamp lags the last arrival's
//     floored wall clock by -L (L > 0 after a backdated replacement, L < 0
//     after clamped stamps, L = 0 fresh). The next honest gap is D + L.
//   attack(u): an armed target whose own stamped gap was u (u = 9 or the
//     lumped ">= 10" class for the wide-window strategy; u in 9..17 for the
//     narrow-window strategy, whose replacement stamp depends on u).
// Each mode is crossed with the arrival-phase bin.
struct OffsetChainLayout {
  int lag_min = -3;
  int lag_max = 0;    // finite lags above this collapse into "hot"
  int bins = 32;
  std::vector<int> attack_gaps;  // resolved target-gap classes
  bool wide_window = false;      // attack window [9, inf) vs [9, 18)
};

inline TransitionModel build_offset_chain(StrategyKind kind, double alpha,
                                          const TimingModel& tm, int bins) {
  if (tm.distribution != TimingKind::ExponentialDiscretized) {
    throw Error(ErrorCode::InvalidInput,
                "offset-aware chains model integer-second stamps only");
  }
  const bool wide = kind == StrategyKind::Uum;
  OffsetChainLayout lay;
  lay.bins = bins;
  lay.wide_window = wide;
  lay.lag_min = -3;
  lay.lag_max = wide ? 9 : 17;  // beyond this the trigger outcome is constant
  if (wide) {
    lay.attack_gaps = {9, 10};  // 10 stands for "any gap >= 10"
  } else {
    for (int u = 9; u <= 17; ++u) lay.attack_gaps.push_back(u);
  }
  const int n_lags = lay.lag_max - lay.lag_min + 1;
  const int n_dep = n_lags + 1;  // + hot (lag beyond lag_max)
  const int n_modes = n_dep + static_cast<int>(lay.attack_gaps.size());
  const int hot_mode = n_dep - 1;

  TransitionModel m;
  m.strategy = kind;
  m.alpha = alpha;
  m.timing = tm;
  m.fidelity = ChainFidelity::OffsetAware;

  auto dep_mode = [&](int lag) {
    if (lag > lay.lag_max) return hot_mode;
    if (lag < lay.lag_min) lag = lay.lag_min;
    return lag - lay.lag_min;
  };
  auto attack_mode = [&](int gap_class) {
    for (std::size_t a = 0; a < lay.attack_gaps.size(); ++a) {
      if (lay.attack_gaps[a] == gap_class) return n_dep + static_cast<int>(a);
    }
    throw Error(ErrorCode::InvalidInput, "bad attack gap class");
  };
  auto state_id = [&](int mode, int bin) { return mode * bins + bin; };

  m.state_names.resize(static_cast<std::size_t>(n_modes) * bins);
  m.state_class.resize(m.state_names.size());
  for (int mode = 0; mode < n_modes; ++mode) {
    std::string base;
    StateClass cls;
    if (mode < n_dep) {
      base = mode == hot_mode
                 ? "dep-hot"
                 : "dep" + std::to_string(lay.lag_min + mode);
      cls = StateClass::Deploy;
    } else {
      base = "attack" + std::to_string(lay.attack_gaps[mode - n_dep]);
      cls = StateClass::Attack;
    }
    for (int b = 0; b < bins; ++b) {
      m.state_names[state_id(mode, b)] = base + "#" + std::to_string(b);
      m.state_class[state_id(mode, b)] = cls;
    }
  }

  const PhaseLaw law(bins, tm.mean_block_time);
  const int window_hi = wide ? std::numeric_limits<int>::max()
                             : 2 * kBucketSeconds - 1;  // inclusive

  // Destination of an honestly stamped block (honest find, or adversary find
  // outside an armed attack) given the raw gap dt = D + L.
  auto honest_publish_dep = [&](int dt) {
    if (dt <= 0) return dep_mode(dt - 1);  // clamped stamp: lag deepens
    return dep_mode(0);
  };

  for (int b = 0; b < bins; ++b) {
    // --- Deployment modes -------------------------------------------------
    for (int mode = 0; mode < n_dep; ++mode) {
      const int src = state_id(mode, b);
      const bool hot = mode == hot_mode;
      const int lag = hot ? lay.lag_max + 1 : lay.lag_min + mode;
      // Enumerate gaps exactly up to the last value whose routing differs,
      // then lump the geometric tail.
      const int k_cut = hot ? 1 : std::max(1, (wide ? 10 : 18) - lag);
      for (int j = 0; j < bins; ++j) {
        for (int k = 0; k <= k_cut; ++k) {
          const double pk =
              k < k_cut ? law.p(b, k, j) : law.tail(b, k_cut, j);
          if (pk <= 0.0) continue;
          const int dt = k + lag;  // for hot: any k gives dt past the window
          // Adversary find: publishes honestly, never arms on its own block.
          // (For the tail lump dt is the smallest gap in it; the routing is
          // constant across the tail, which is what made k_cut the cut.)
          const int adv_dst = hot ? dep_mode(0) : honest_publish_dep(dt);
          add_edge(m, src, state_id(adv_dst, j), alpha * pk, 0.0, 1.0);
          // Honest find: window check on the stamped gap.
          int hon_dst;
          if (hot) {
            hon_dst = wide ? attack_mode(10) : dep_mode(0);
          } else if (k == k_cut) {
            // dt >= k_cut + lag: past every resolved boundary.
            hon_dst = wide ? attack_mode(10) : dep_mode(0);
          } else if (dt <= 0) {
            hon_dst = dep_mode(dt - 1);
          } else if (dt < kBucketSeconds) {
            hon_dst = dep_mode(0);
          } else if (dt <= window_hi) {
            hon_dst = attack_mode(wide ? (dt == 9 ? 9 : 10)
                                       : dt);
          } else {
            hon_dst = dep_mode(0);
          }
          add_edge(m, src, state_id(hon_dst, j), (1.0 - alpha) * pk, 1.0, 0.0);
        }
      }
    }
    // --- Attack modes ------------------------------------------------------
    for (std::size_t a = 0; a < lay.attack_gaps.size(); ++a) {
      const int u = lay.attack_gaps[a];
      const int src = state_id(n_dep + static_cast<int>(a), b);
      // Post-replacement stamp lag: the published block is backdated, so the
      // tip stamp trails the winner's arrival.
      //   wide window: stamp = t1h - 9 for u >= 10 (lag k + 9); the exact
      //   one-bucket target falls back to stamp = t0 + 1 (lag k + 8).
      //   narrow window: stamp = t0 + 8, lag k + u - 8.
      const int base_lag = wide ? (u == 9 ? 8 : 9) : u - 8;
      const int k_cut_win = std::max(1, lay.lag_max + 1 - base_lag);
      const int k_cut_hon = wide ? 10 : 18;
      const int k_cut = std::max(k_cut_win, k_cut_hon);
      for (int j = 0; j < bins; ++j) {
        for (int k = 0; k <= k_cut; ++k) {
          const bool tail = k == k_cut;
          const double pk = tail ? law.tail(b, k_cut, j) : law.p(b, k, j);
          if (pk <= 0.0) continue;
          // Adversary find: replace the target.
          const int win_lag = k + base_lag;
          const int adv_dst = dep_mode(tail ? lay.lag_max + 1 : win_lag);
          add_edge(m, src, state_id(adv_dst, j), alpha * pk, -1.0, 1.0);
          // Honest find on the armed target (its stamp is fresh): gap k.
          int hon_dst;
          if (tail) {
            hon_dst = wide ? attack_mode(10) : dep_mode(0);
          } else if (k == 0) {
            hon_dst = dep_mode(-1);
          } else if (k < kBucketSeconds) {
            hon_dst = dep_mode(0);
          } else if (k <= window_hi) {
            hon_dst = attack_mode(wide ? (k == 9 ? 9 : 10) : k);
          } else {
            hon_dst = dep_mode(0);
          }
          add_edge(m, src, state_id(hon_dst, j), (1.0 - alpha) * pk, 1.0, 0.0);
        }
      }
    }
  }
  return m;
}

}  // namespace detail

// Build the analytic chain for a strategy. `truncate_n` caps the staircase
// ladder; `bins` is the phase resolution of offset-aware chains.
inline TransitionModel build_chain(StrategyKind strategy, double alpha,
                                   const TimingModel& tm, int truncate_n = 32,
                                   ChainFidelity fidelity =
                                       ChainFidelity::TableLiteral,
                                   int bins = 32) {
  if (alpha < 0.0 || alpha >= 1.0) {
    throw Error(ErrorCode::InvalidInput, "alpha must lie in [0,1)");
  }
  const TimingProbabilities tp = timing_probabilities(tm);
  TransitionModel m;
  switch (strategy) {
    case StrategyKind::Honest:
      m = detail::build_honest_chain(alpha, tm);
      break;
    case StrategyKind::Rum:
      m = fidelity == ChainFidelity::OffsetAware
              ? detail::build_offset_chain(StrategyKind::Rum, alpha, tm, bins)
              : detail::build_replacement_chain(StrategyKind::Rum, alpha, tm,
                                                tp.p_9to18);
      break;
    case StrategyKind::Uum:
      m = fidelity == ChainFidelity::OffsetAware
              ? detail::build_offset_chain(StrategyKind::Uum, alpha, tm, bins)
              : detail::build_replacement_chain(StrategyKind::Uum, alpha, tm,
                                                tp.p_ge9);
      break;
    case StrategyKind::Suum:
      if (fidelity == ChainFidelity::OffsetAware) {
        // The staircase's shares are lag-free by construction (release stamps
        // track honest stamps), so the literal ladder already matches the
        // event-level process; no expansion needed.
        m = detail::build_staircase_chain(alpha, tm, truncate_n);
        m.fidelity = ChainFidelity::OffsetAware;
      } else {
        m = detail::build_staircase_chain(alpha, tm, truncate_n);
      }
      break;
  }
  m.truncate_n = truncate_n;
  if (fidelity == ChainFidelity::OffsetAware) m.fidelity = fidelity;
  const double err = m.max_row_sum_error();
  if (err > 1e-12) {
    throw Error(ErrorCode::InvalidInput,
                "chain rows do not sum to 1 (error " + std::to_string(err) +
                    ")");
  }
  return m;
}

// ---------------------------------------------------------------------------
// Stationary solvers
// ---------------------------------------------------------------------------

namespace detail {

// Number of terminal strongly connected components; a finite chain has a
// unique stationary distribution iff this is exactly 1.
inline int terminal_scc_count(const TransitionModel& m) {
  const int n = m.n_states();
  std::vector<std::vector<int>> adj(n), radj(n);
  for (const auto& t : m.transitions) {
    if (t.p <= 0.0 || t.src == t.dst) continue;
    adj[t.src].push_back(t.dst);
    radj[t.dst].push_back(t.src);
  }
  // Kosaraju.
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [v, idx] = stack.back();
      if (idx < adj[v].size()) {
        int w = adj[v][idx++];
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back({w, 0});
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<int> comp(n, -1);
  int ncomp = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] != -1) continue;
    std::vector<int> stack{*it};
    comp[*it] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : radj[v]) {
        if (comp[w] == -1) {
          comp[w] = ncomp;
          stack.push_back(w);
        }
      }
    }
    ++ncomp;
  }
  std::vector<char> has_exit(ncomp, 0);
  for (const auto& t : m.transitions) {
    if (t.p > 0.0 && comp[t.src] != comp[t.dst]) has_exit[comp[t.src]] = 1;
  }
  int terminals = 0;
  for (int c = 0; c < ncomp; ++c) {
    if (!has_exit[c]) ++terminals;
  }
  return terminals;
}

inline double stationary_residual(const TransitionModel& m,
                                  const std::vector<double>& pi) {
  std::vector<double> next(pi.size(), 0.0);
  for (const auto& t : m.transitions) next[t.dst] += pi[t.src] * t.p;
  double r = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    r = std::max(r, std::fabs(next[i] - pi[i]));
  }
  return r;
}

inline void normalize_exact(std::vector<double>& pi) {
  long double sum = 0.0L;
  for (double& x : pi) {
    if (x < 0.0 && x > -1e-12) x = 0.0;
    sum += x;
  }
  for (double& x : pi) x = static_cast<double>(x / sum);
  // Pin the largest entry so the final sum is exactly 1 in doubles.
  std::size_t imax = 0;
  for (std::size_t i = 1; i < pi.size(); ++i) {
    if (pi[i] > pi[imax]) imax = i;
  }
  double rest = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (i != imax) rest += pi[i];
  }
  pi[imax] = 1.0 - rest;
}

}  // namespace detail

// Solve pi P = pi, sum(pi) = 1. Dense LU with the normalization row replaced;
// power-iteration fallback. Rejects chains without a unique stationary
// distribution.
inline StationaryDistribution stationary(const TransitionModel& m) {
  const int n = m.n_states();
  if (n == 0) {
    throw Error(ErrorCode::NoUniqueStationary, "empty chain");
  }
  if (detail::terminal_scc_count(m) != 1) {
    throw Error(ErrorCode::NoUniqueStationary,
                "chain has no unique stationary distribution");
  }
  std::vector<double> pi;
  // Dense solve of (P^T - I) x = 0 with the last equation replaced by
  // sum(x) = 1.
  {
    Eigen::MatrixXd a = m.matrix().transpose();
    for (int i = 0; i < n; ++i) a(i, i) -= 1.0;
    for (int j = 0; j < n; ++j) a(n - 1, j) = 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd x = a.partialPivLu().solve(b);
    pi.assign(x.data(), x.data() + n);
  }
  bool ok = true;
  for (double v : pi) {
    if (!std::isfinite(v) || v < -1e-9) ok = false;
  }
  if (ok) {
    detail::normalize_exact(pi);
    if (detail::stationary_residual(m, pi) > 1e-10) ok = false;
  }
  if (!ok) {
    // Power iteration from the uniform distribution.
    pi.assign(n, 1.0 / n);
    std::vector<double> next(n);
    for (int iter = 0; iter < 2'000'000; ++iter) {
      std::fill(next.begin(), next.end(), 0.0);
      for (const auto& t : m.transitions) next[t.dst] += pi[t.src] * t.p;
      double diff = 0.0;
      for (int i = 0; i < n; ++i) diff = std::max(diff, std::fabs(next[i] - pi[i]));
      pi.swap(next);
      if (diff < 1e-15) break;
    }
    detail::normalize_exact(pi);
    if (detail::stationary_residual(m, pi) > 1e-10) {
      throw Error(ErrorCode::NoUniqueStationary,
                  "stationary solve did not converge");
    }
  }
  StationaryDistribution d;
  d.probabilities = std::move(pi);
  d.residual = detail::stationary_residual(m, d.probabilities);
  return d;
}

// ---------------------------------------------------------------------------
// Shares, forking rate, attack cost
// ---------------------------------------------------------------------------

inline AbsoluteShares absolute_shares(const StationaryDistribution& dist,
                                      const TransitionModel& m) {
  if (dist.probabilities.size() != static_cast<std::size_t>(m.n_states())) {
    throw Error(ErrorCode::InvalidInput, "distribution does not match chain");
  }
  long double rh = 0.0L, ra = 0.0L;
  for (const auto& t : m.transitions) {
    const long double w =
        static_cast<long double>(dist.probabilities[t.src]) * t.p;
    rh += w * t.r_h;
    ra += w * t.r_a;
  }
  return {static_cast<double>(rh), static_cast<double>(ra)};
}

inline RelativeShares relative_shares(const AbsoluteShares& s) {
  const double total = s.r_h + s.r_a;
  if (total <= 0.0) {
    throw Error(ErrorCode::InvalidInput, "zero total reward rate");
  }
  return {s.r_h / total, s.r_a / total};
}

// Occupancy of a state class under a distribution.
inline double class_occupancy(const StationaryDistribution& dist,
                              const TransitionModel& m, StateClass cls) {
  double total = 0.0;
  for (int i = 0; i < m.n_states(); ++i) {
    if (m.state_class[i] == cls) total += dist.probabilities[i];
  }
  return total;
}

// Closed-form forking rate: honest 0; narrow/wide replacement attacks fork on
// every adversary find while armed. The staircase's forks are counted per
// branching point: one per withholding episode (entered by an adversary find
// outside an episode) plus one per downgrade publish — matching how the
// simulator counts a whole released cascade as a single induced fork.
inline double forking_rate(const TransitionModel& m,
                           const StationaryDistribution& dist) {
  const double pi_attack = class_occupancy(dist, m, StateClass::Attack);
  switch (m.strategy) {
    case StrategyKind::Honest: return 0.0;
    case StrategyKind::Rum: return pi_attack * m.alpha;
    case StrategyKind::Uum: return pi_attack * m.alpha;
    case StrategyKind::Suum: {
      const double pi_d = class_occupancy(dist, m, StateClass::Deploy);
      const double pi_g = class_occupancy(dist, m, StateClass::Downgrade);
      return (pi_d + pi_g) * m.alpha;
    }
  }
  return 0.0;
}

// Expected block-finding-probability loss from difficulty inflation:
// mu * (d0 - d1) / 2^max_target_log2, exact.
inline BigRational attack_cost(const Rational& mu, std::uint64_t d0,
                               std::uint64_t d1,
                               const ChainConstants& cc = ChainConstants{}) {
  if (mu < Rational(0) || mu > Rational(1)) {
    throw Error(ErrorCode::InvalidInput, "mu must lie in [0,1]");
  }
  if (d0 < d1) {
    throw Error(ErrorCode::NegativeCost,
                "difficulty gap is negative (d0 < d1)");
  }
  boost::multiprecision::cpp_int num = mu.num();
  num *= boost::multiprecision::cpp_int(d0 - d1);
  boost::multiprecision::cpp_int den = mu.den();
  den <<= cc.max_target_log2;
  if (num == 0) return BigRational(0);
  return BigRational(num, den);
}

// ---------------------------------------------------------------------------
// Exact-rational chain evaluation (for identity proofs)
// ---------------------------------------------------------------------------

struct RationalTransition {
  int src = 0;
  int dst = 0;
  BigRational p;
  BigRational r_h;
  BigRational r_a;
};

// Literal chain with exact-rational parameters. `s` is the attack-window
// probability as a free rational parameter (the reward identities proved on
// this chain hold for any value of it).
inline std::vector<RationalTransition> build_replacement_chain_exact(
    const BigRational& alpha, const BigRational& s) {
  const BigRational one(1);
  std::vector<RationalTransition> e;
  e.push_back({0, 0, alpha, 0, 1});
  e.push_back({0, 1, (one - alpha) * s, 1, 0});
  e.push_back({0, 0, (one - alpha) * (one - s), 1, 0});
  e.push_back({1, 0, alpha, -1, 1});
  e.push_back({1, 1, (one - alpha) * s, 1, 0});
  e.push_back({1, 0, (one - alpha) * (one - s), 1, 0});
  return e;
}

// Exact stationary distribution by Gaussian elimination over rationals.
inline std::vector<BigRational> stationary_exact(
    int n, const std::vector<RationalTransition>& edges) {
  std::vector<std::vector<BigRational>> a(
      n, std::vector<BigRational>(n + 1, BigRational(0)));
  for (const auto& t : edges) a[t.dst][t.src] += t.p;
  for (int i = 0; i < n; ++i) a[i][i] -= 1;
  for (int j = 0; j < n; ++j) a[n - 1][j] = 1;
  a[n - 1][n] = 1;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r) {
      if (a[r][col] != 0) {
        piv = r;
        break;
      }
    }
    if (piv < 0) {
      throw Error(ErrorCode::NoUniqueStationary, "singular rational system");
    }
    std::swap(a[col], a[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const BigRational f = a[r][col] / a[col][col];
      for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<BigRational> pi(n);
  for (int i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
  return pi;
}

inline std::pair<BigRational, BigRational> absolute_shares_exact(
    const std::vector<BigRational>& pi,
    const std::vector<RationalTransition>& edges) {
  BigRational rh(0), ra(0);
  for (const auto& t : edges) {
    rh += pi[t.src] * t.p * t.r_h;
    ra += pi[t.src] * t.p * t.r_a;
  }
  return {rh, ra};
}

// ---------------------------------------------------------------------------
// Grid evaluation (the data behind the analytic sweep CSV)
// ---------------------------------------------------------------------------

struct MarkovGridRow {
  StrategyKind strategy = StrategyKind::Honest;
  double alpha = 0.0;
  double pi_deploy = 0.0;
  double pi_downgrade = 0.0;
  double pi_attack_total = 0.0;
  double e_a = 0.0;
  double e_h = 0.0;
  double fr = 0.0;
  double ac = 0.0;
};

// Historical maximum observed difficulty gap used for the attack-cost column.
inline constexpr std::uint64_t kHistoricalMaxDifficultyGap = 1ull << 39;

inline MarkovGridRow evaluate_markov_point(
    StrategyKind strategy, double alpha, const TimingModel& tm,
    int truncate_n = 32, ChainFidelity fidelity = ChainFidelity::TableLiteral,
    int bins = 32) {
  const TransitionModel model =
      build_chain(strategy, alpha, tm, truncate_n, fidelity, bins);
  const StationaryDistribution dist = stationary(model);
  MarkovGridRow row;
  row.strategy = strategy;
  row.alpha = alpha;
  row.pi_deploy = class_occupancy(dist, model, StateClass::Deploy);
  row.pi_downgrade = class_occupancy(dist, model, StateClass::Downgrade);
  row.pi_attack_total = class_occupancy(dist, model, StateClass::Attack);
  const AbsoluteShares abs = absolute_shares(dist, model);
  if (abs.r_h + abs.r_a > 0.0) {
    const RelativeShares rel = relative_shares(abs);
    row.e_a = rel.e_a;
    row.e_h = rel.e_h;
  } else {
    row.e_a = 0.0;
    row.e_h = 0.0;
  }
  row.fr = forking_rate(model, dist);
  if (strategy == StrategyKind::Uum || strategy == StrategyKind::Suum) {
    row.ac = alpha * std::ldexp(static_cast<double>(kHistoricalMaxDifficultyGap),
                                -static_cast<int>(ChainConstants{}.max_target_log2));
  } else {
    row.ac = 0.0;
  }
  return row;
}

}  // namespace timefork
