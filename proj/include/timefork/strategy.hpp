// SPDX-License-Identifier: MIT
//
// The four mining strategies as event-driven state machines: honest mining,
// the narrow-window replacement attack (RUM), the unrestricted replacement
// attack (UUM), and the withhold-and-release staircase attack (SUUM), together
// with each strategy's timestamp-selection policy.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "timefork/difficulty.hpp"
#include "timefork/errors.hpp"
#include "timefork/header.hpp"
#include "timefork/predicates.hpp"

namespace timefork {

enum class StrategyKind { Honest, Rum, Uum, Suum };

inline const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::Honest: return "honest";
    case StrategyKind::Rum: return "rum";
    case StrategyKind::Uum: return "uum";
    case StrategyKind::Suum: return "suum";
  }
  return "unknown";
}

inline std::optional<StrategyKind> parse_strategy(const std::string& s) {
  if (s == "honest") return StrategyKind::Honest;
  if (s == "rum") return StrategyKind::Rum;
  if (s == "uum") return StrategyKind::Uum;
  if (s == "suum") return StrategyKind::Suum;
  return std::nullopt;
}

enum class Finder { Honest, Adversary };

// One block-finding event as seen by a strategy. `tip` is the public tip
// after the event's honest publication (for honest finds) or the current
// public tip (for adversary finds); `tip_parent_timestamp` is the stamp of
// that tip's parent, which together with the tip stamp carries the gap the
// transition guards read.
struct MiningEvent {
  Finder finder = Finder::Honest;
  double arrival_time = 0.0;  // true wall clock; stamps floor this to seconds
  BlockHeader tip;
  std::int64_t tip_parent_timestamp = 0;
  std::optional<BlockHeader> private_tip;
};

// Observable mode of a strategy machine plus the working memory the staircase
// strategy needs across events (cascade anchoring and withheld stamps).
struct StrategyState {
  enum class Mode { Idle, Deployment, Attack, Downgrade };

  StrategyKind kind = StrategyKind::Honest;
  Mode mode = Mode::Idle;
  int lead = 0;  // staircase private-chain length; 0 unless mode == Attack

  // Staircase working memory. `cascade_honest_ts[0]` is the anchor stamp (the
  // public block the private chain forked from); later entries are the stamps
  // of honest blocks published during the cascade.
  std::vector<std::int64_t> cascade_honest_ts;
  std::vector<std::int64_t> withheld_provisional_ts;
  std::int64_t last_release_ts = 0;
  int release_index = 0;

  static StrategyState make(StrategyKind kind) {
    StrategyState st;
    st.kind = kind;
    st.mode = kind == StrategyKind::Honest ? Mode::Idle : Mode::Deployment;
    return st;
  }
};

inline const char* strategy_mode_name(StrategyState::Mode m) {
  switch (m) {
    case StrategyState::Mode::Idle: return "idle";
    case StrategyState::Mode::Deployment: return "deployment";
    case StrategyState::Mode::Attack: return "attack";
    case StrategyState::Mode::Downgrade: return "downgrade";
  }
  return "unknown";
}

// What the strategy wants done after an event.
struct Action {
  enum class Kind { NoOp, Publish, Withhold, Release } kind = Kind::NoOp;
  std::int64_t timestamp = 0;                // Publish / Withhold stamp
  std::vector<std::int64_t> release_stamps;  // Release stamps (count = size)

  static Action noop() { return {}; }
  static Action publish(std::int64_t ts) {
    Action a;
    a.kind = Kind::Publish;
    a.timestamp = ts;
    return a;
  }
  static Action withhold(std::int64_t ts) {
    Action a;
    a.kind = Kind::Withhold;
    a.timestamp = ts;
    return a;
  }
  static Action release_one(std::int64_t ts) {
    Action a;
    a.kind = Kind::Release;
    a.release_stamps = {ts};
    return a;
  }
};

// How adversarial replacement blocks are stamped.
//   TheoremPoint: the one-bucket-margin stamps (strict difficulty dominance).
//   Mirror: stamp equal to the honest competitor (equal difficulty; the fork
//   is a tie and only wins under an adversary-favouring tie rule). Difficulty-
//   neutral: leaves no difficulty footprint on the chain.
enum class StampPolicy { TheoremPoint, Mirror };

inline const char* stamp_policy_name(StampPolicy p) {
  return p == StampPolicy::TheoremPoint ? "theorem" : "mirror";
}

inline std::optional<StampPolicy> parse_stamp_policy(const std::string& s) {
  if (s == "theorem") return StampPolicy::TheoremPoint;
  if (s == "mirror") return StampPolicy::Mirror;
  return std::nullopt;
}

// Event class used by the conformance recorder: which guard column of the
// transition tables an event fell into.
enum class EventClass { AdversaryFinds, HonestLt9, HonestGe9 };

// Optional hook recording (mode, event-class, destination) triples so tests
// can check that observed transitions stay within the strategy's table rows.
struct TransitionRecord {
  StrategyState::Mode src;
  EventClass event_class;
  StrategyState::Mode dst;
};
using TransitionRecorder = std::vector<TransitionRecord>;

// ---------------------------------------------------------------------------
// Timestamp-selection policies
// ---------------------------------------------------------------------------

// Honest stamp: the floored arrival clamped to parent+1 so the header gap
// stays positive.
inline std::int64_t honest_timestamp(double arrival_time,
                                     std::int64_t parent_ts) {
  const auto floored = static_cast<std::int64_t>(std::floor(arrival_time));
  return floored > parent_ts ? floored : parent_ts + 1;
}

// Replacement stamp for the unrestricted attack: prefer the one-bucket-margin
// point t1h - 9; when the target gap is exactly one bucket, fall back to the
// smallest stamp, which the exact oracle still certifies; otherwise scan
// downward inside the [1,900) window for the largest certified stamp.
// Returns nullopt when nothing in the window dominates.
inline std::optional<std::int64_t> uum_choose_timestamp(std::int64_t t0a,
                                                        std::int64_t t1h) {
  if (t1h < t0a + kBucketSeconds) {
    throw Error(ErrorCode::InvalidInput,
                "replacement stamp requires an initiated target (gap >= 9)");
  }
  const std::int64_t dt_h = t1h - t0a;
  std::int64_t start = t1h - kBucketSeconds;
  const std::int64_t window_top = t0a + kTimestampWindow - 1;
  if (start > window_top) start = window_top;
  if (start < t0a + 1) start = t0a + 1;
  for (std::int64_t t1a = start; t1a >= t0a + 1; --t1a) {
    if (oracle_dominates(t1a - t0a, dt_h)) return t1a;
  }
  return std::nullopt;
}

// Narrow-window replacement stamp: fixed gap of 8 seconds from the shared
// parent (the largest value inside the [1,9) window; any value there yields
// the same difficulty).
inline std::int64_t rum_choose_timestamp(std::int64_t t0h) { return t0h + 8; }

// Stamp for a newly withheld private block: parent + 1, the bottom of the
// private-gap window.
inline std::int64_t suum_withhold_timestamp(std::int64_t t_prev_private) {
  return t_prev_private + 1;
}

// Stamp for releasing withheld block i against the honest block just
// published. honest_ts holds stamps 0..i where entry 0 is the cascade anchor.
// For i = 1 this is the same one-bucket-margin choice as the unrestricted
// replacement stamp. For i >= 2 the stamp keeps the honest-gap minus
// private-gap difference at exactly one bucket when achievable, clamped to
// the [1,900) private-gap window. A gap too small to manipulate — an
// un-initiated first target, or a later honest gap of at most one bucket —
// yields nullopt (attack infeasible at this height).
inline std::optional<std::int64_t> suum_release_timestamp(
    int i, const std::vector<std::int64_t>& honest_ts,
    std::int64_t private_ts_prev) {
  if (i < 1 || honest_ts.size() < static_cast<std::size_t>(i) + 1) {
    throw Error(ErrorCode::InvalidInput,
                "release stamp needs honest stamps 0..i");
  }
  if (i == 1) {
    if (honest_ts[1] < private_ts_prev + kBucketSeconds) return std::nullopt;
    return uum_choose_timestamp(private_ts_prev, honest_ts[1]);
  }
  const std::int64_t honest_gap = honest_ts[i] - honest_ts[i - 1];
  std::int64_t private_gap = honest_gap - kBucketSeconds;
  if (private_gap < 1) return std::nullopt;
  if (private_gap > kTimestampWindow - 1) private_gap = kTimestampWindow - 1;
  return private_ts_prev + private_gap;
}

// ---------------------------------------------------------------------------
// State machines
// ---------------------------------------------------------------------------

namespace detail {
inline void record_transition(TransitionRecorder* rec, StrategyState::Mode src,
                              EventClass cls, StrategyState::Mode dst) {
  if (rec != nullptr) rec->push_back({src, cls, dst});
}

inline EventClass classify_honest_gap(std::int64_t dt) {
  return dt >= kBucketSeconds ? EventClass::HonestGe9 : EventClass::HonestLt9;
}
}  // namespace detail

// Honest strategy: every find — including those of the miner the experiment
// labels "adversary" — is published with the truthful clamped stamp. This is
// the all-honest baseline, so the labeled miner behaves like everyone else.
inline std::pair<StrategyState, Action> honest_on_event(
    StrategyState state, const MiningEvent& ev,
    TransitionRecorder* rec = nullptr) {
  if (state.kind != StrategyKind::Honest) {
    throw Error(ErrorCode::InvalidInput, "honest_on_event on wrong strategy");
  }
  (void)rec;
  if (ev.finder == Finder::Honest) {
    // The engine has already published this block; nothing to do.
    return {state, Action::noop()};
  }
  return {state, Action::publish(honest_timestamp(ev.arrival_time,
                                                  ev.tip.timestamp))};
}

// Unrestricted replacement attack. In Deployment the adversary behaves
// honestly and watches for an honest pair with a gap of at least one bucket;
// in Attack it replaces the target the moment it finds a block, and follows
// the honest chain otherwise.
inline std::pair<StrategyState, Action> uum_on_event(
    StrategyState state, const MiningEvent& ev,
    TransitionRecorder* rec = nullptr,
    StampPolicy policy = StampPolicy::TheoremPoint) {
  if (state.kind != StrategyKind::Uum) {
    throw Error(ErrorCode::InvalidInput, "uum_on_event on wrong strategy");
  }
  const auto src = state.mode;
  if (ev.finder == Finder::Adversary) {
    if (state.mode == StrategyState::Mode::Attack) {
      // Replace the target (the current public tip).
      std::optional<std::int64_t> ts;
      if (policy == StampPolicy::Mirror) {
        const std::int64_t dt_h = ev.tip.timestamp - ev.tip_parent_timestamp;
        ts = (dt_h >= 1 && dt_h < kTimestampWindow)
                 ? std::optional<std::int64_t>(ev.tip.timestamp)
                 : uum_choose_timestamp(ev.tip_parent_timestamp,
                                        ev.tip.timestamp);
      } else {
        ts = uum_choose_timestamp(ev.tip_parent_timestamp, ev.tip.timestamp);
      }
      state.mode = StrategyState::Mode::Deployment;
      detail::record_transition(rec, src, EventClass::AdversaryFinds,
                                state.mode);
      if (!ts) return {state, Action::noop()};  // counted infeasible upstream
      return {state, Action::publish(*ts)};
    }
    // Deployment: publish own find honestly.
    detail::record_transition(rec, src, EventClass::AdversaryFinds,
                              state.mode);
    return {state, Action::publish(honest_timestamp(ev.arrival_time,
                                                    ev.tip.timestamp))};
  }
  // Honest find: ev.tip is the newly published honest block.
  const std::int64_t dt = ev.tip.timestamp - ev.tip_parent_timestamp;
  const auto cls = detail::classify_honest_gap(dt);
  state.mode = dt >= kBucketSeconds ? StrategyState::Mode::Attack
                                    : StrategyState::Mode::Deployment;
  detail::record_transition(rec, src, cls, state.mode);
  return {state, Action::noop()};
}

// Narrow-window replacement attack: identical to the unrestricted machine
// except the attack window is exactly the first bucket [9,18) — both for
// arming on a fresh pair and for staying armed on a retargeted one — and the
// replacement stamp uses the fixed [1,9) gap.
inline std::pair<StrategyState, Action> rum_on_event(
    StrategyState state, const MiningEvent& ev,
    TransitionRecorder* rec = nullptr) {
  if (state.kind != StrategyKind::Rum) {
    throw Error(ErrorCode::InvalidInput, "rum_on_event on wrong strategy");
  }
  const auto src = state.mode;
  if (ev.finder == Finder::Adversary) {
    if (state.mode == StrategyState::Mode::Attack) {
      const std::int64_t ts = rum_choose_timestamp(ev.tip_parent_timestamp);
      state.mode = StrategyState::Mode::Deployment;
      detail::record_transition(rec, src, EventClass::AdversaryFinds,
                                state.mode);
      return {state, Action::publish(ts)};
    }
    detail::record_transition(rec, src, EventClass::AdversaryFinds,
                              state.mode);
    return {state, Action::publish(honest_timestamp(ev.arrival_time,
                                                    ev.tip.timestamp))};
  }
  const std::int64_t dt = ev.tip.timestamp - ev.tip_parent_timestamp;
  const auto cls = detail::classify_honest_gap(dt);
  const bool in_window = dt >= kBucketSeconds && dt < 2 * kBucketSeconds;
  state.mode = in_window ? StrategyState::Mode::Attack
                         : StrategyState::Mode::Deployment;
  detail::record_transition(rec, src, cls, state.mode);
  return {state, Action::noop()};
}

// Staircase attack: withhold own finds to build a private lead, release one
// private block per honest publication while leading, and fall back to the
// unrestricted behaviour (Downgrade) when the honest chain produces an
// attackable gap while the adversary holds no lead.
inline std::pair<StrategyState, Action> suum_on_event(
    StrategyState state, const MiningEvent& ev,
    TransitionRecorder* rec = nullptr,
    StampPolicy policy = StampPolicy::TheoremPoint) {
  if (state.kind != StrategyKind::Suum) {
    throw Error(ErrorCode::InvalidInput, "suum_on_event on wrong strategy");
  }
  const auto src = state.mode;
  if (ev.finder == Finder::Adversary) {
    if (state.mode == StrategyState::Mode::Downgrade) {
      // Behaves exactly as the unrestricted attack's replacement.
      std::optional<std::int64_t> ts;
      if (policy == StampPolicy::Mirror) {
        const std::int64_t dt_h = ev.tip.timestamp - ev.tip_parent_timestamp;
        ts = (dt_h >= 1 && dt_h < kTimestampWindow)
                 ? std::optional<std::int64_t>(ev.tip.timestamp)
                 : uum_choose_timestamp(ev.tip_parent_timestamp,
                                        ev.tip.timestamp);
      } else {
        ts = uum_choose_timestamp(ev.tip_parent_timestamp, ev.tip.timestamp);
      }
      state.mode = StrategyState::Mode::Deployment;
      detail::record_transition(rec, src, EventClass::AdversaryFinds,
                                state.mode);
      if (!ts) return {state, Action::noop()};
      return {state, Action::publish(*ts)};
    }
    // Deployment or Attack(i): withhold, extending the private chain.
    if (state.mode == StrategyState::Mode::Deployment) {
      state.cascade_honest_ts = {ev.tip.timestamp};  // anchor
      state.withheld_provisional_ts.clear();
      state.last_release_ts = ev.tip.timestamp;
      state.release_index = 0;
      state.lead = 0;
    }
    const std::int64_t prev = state.withheld_provisional_ts.empty()
                                  ? state.cascade_honest_ts.front()
                                  : state.withheld_provisional_ts.back();
    const std::int64_t ts = suum_withhold_timestamp(prev);
    state.withheld_provisional_ts.push_back(ts);
    state.lead += 1;
    state.mode = StrategyState::Mode::Attack;
    detail::record_transition(rec, src, EventClass::AdversaryFinds,
                              state.mode);
    return {state, Action::withhold(ts)};
  }

  // Honest find.
  const std::int64_t dt = ev.tip.timestamp - ev.tip_parent_timestamp;
  const auto cls = detail::classify_honest_gap(dt);
  switch (state.mode) {
    case StrategyState::Mode::Deployment:
    case StrategyState::Mode::Downgrade: {
      state.mode = dt >= kBucketSeconds ? StrategyState::Mode::Downgrade
                                        : StrategyState::Mode::Deployment;
      detail::record_transition(rec, src, cls, state.mode);
      return {state, Action::noop()};
    }
    case StrategyState::Mode::Attack: {
      if (state.lead < 1) {
        throw Error(ErrorCode::InvalidInput,
                    "staircase attack mode with empty private chain");
      }
      state.cascade_honest_ts.push_back(ev.tip.timestamp);
      state.release_index += 1;
      std::optional<std::int64_t> ts;
      if (policy == StampPolicy::Mirror) {
        ts = ev.tip.timestamp;
      } else {
        ts = suum_release_timestamp(state.release_index,
                                    state.cascade_honest_ts,
                                    state.last_release_ts);
      }
      state.lead -= 1;
      state.mode = state.lead == 0 ? StrategyState::Mode::Deployment
                                   : StrategyState::Mode::Attack;
      detail::record_transition(rec, src, cls, state.mode);
      if (!ts) return {state, Action::noop()};  // infeasible; sim resets
      state.last_release_ts = *ts;
      return {state, Action::release_one(*ts)};
    }
    case StrategyState::Mode::Idle:
      break;
  }
  throw Error(ErrorCode::InvalidInput, "staircase machine in invalid mode");
}

// Uniform dispatcher used by the simulation engine.
inline std::pair<StrategyState, Action> strategy_on_event(
    StrategyState state, const MiningEvent& ev,
    TransitionRecorder* rec = nullptr,
    StampPolicy suum_policy = StampPolicy::TheoremPoint) {
  switch (state.kind) {
    case StrategyKind::Honest: return honest_on_event(std::move(state), ev, rec);
    case StrategyKind::Rum: return rum_on_event(std::move(state), ev, rec);
    case StrategyKind::Uum:
      return uum_on_event(std::move(state), ev, rec, StampPolicy::TheoremPoint);
    case StrategyKind::Suum:
      return suum_on_event(std::move(state), ev, rec, suum_policy);
  }
  throw Error(ErrorCode::InvalidInput, "unknown strategy kind");
}

}  // namespace timefork
