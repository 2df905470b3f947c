// SPDX-License-Identifier: MIT
//
// Attack-feasibility predicates: floor-arithmetic conditions that decide when a
// timestamp-manipulation attack can be initiated or can succeed, each paired
// with the exact difficulty-comparison oracle so the approximation error of the
// floor arithmetic is observable.

#pragma once

#include <cstdint>
#include <optional>

#include "timefork/difficulty.hpp"
#include "timefork/errors.hpp"

namespace timefork {

// Identifies which feasibility condition a report was evaluated against.
enum class PredicateId {
  T1Init,
  T2Success,
  T3MinRisk,
  T4Downgrade,
  T6SuccessI1,
  T6SuccessI2Plus,
  T7MinRisk,
};

inline const char* predicate_id_name(PredicateId id) {
  switch (id) {
    case PredicateId::T1Init: return "t1-init";
    case PredicateId::T2Success: return "t2-success";
    case PredicateId::T3MinRisk: return "t3-minrisk";
    case PredicateId::T4Downgrade: return "t4-downgrade";
    case PredicateId::T6SuccessI1: return "t6-success-i1";
    case PredicateId::T6SuccessI2Plus: return "t6-success-i2plus";
    case PredicateId::T7MinRisk: return "t7-minrisk";
  }
  return "unknown";
}

// Result of evaluating a floor-arithmetic predicate next to the exact oracle.
// `holds` is the predicate's own verdict; `exact_dominance` is the ground-truth
// difficulty comparison. The two can disagree on a small boundary set.
struct TheoremPredicateReport {
  PredicateId predicate_id{PredicateId::T2Success};
  bool holds = false;
  bool exact_dominance = false;
};

// Context in which standalone predicate evaluations run the difficulty oracle:
// a representative parent difficulty far away from both the 2^17 floor and
// int64 overflow, with no uncle references. At this difficulty the oracle
// comparison reduces to comparing adjustment factors.
inline constexpr std::uint64_t kOracleParentDifficulty = 4'000'000;
inline constexpr int kOracleParentUncles = 0;

namespace detail {
// Floor division for possibly-negative numerators (C++ '/' truncates).
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  std::int64_t r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
}  // namespace detail

// Exact oracle: does an adversarial child with gap dt_a get strictly higher
// difficulty than an honest child with gap dt_h on the same parent?
inline bool oracle_dominates(std::int64_t dt_a, std::int64_t dt_h) {
  return strictly_denser(kOracleParentDifficulty, kOracleParentUncles, dt_a,
                         dt_h);
}

// Initiation condition: the honest pair's gap spans at least one full
// 9-second bucket.
inline bool predicate_t1_initiation(std::int64_t t1h, std::int64_t t0h) {
  if (t1h <= t0h) {
    throw Error(ErrorCode::InvalidInput,
                "initiation predicate requires increasing timestamps");
  }
  return detail::floor_div(t1h - t0h, kBucketSeconds) >= 1;
}

// Narrow-window initiation: the gap lies in exactly the first bucket [9,18).
inline bool predicate_t1_rum(std::int64_t t1h, std::int64_t t0h) {
  if (t1h <= t0h) {
    throw Error(ErrorCode::InvalidInput,
                "initiation predicate requires increasing timestamps");
  }
  return detail::floor_div(t1h - t0h, kBucketSeconds) == 1;
}

// Success condition for a backdated replacement block: the adversarial stamp
// trails the honest one by at least one bucket and stays inside the [1,900)
// parent-gap window. `exact_dominance` is the oracle verdict on the same
// stamps; the two disagree on bucket-boundary cases.
inline TheoremPredicateReport predicate_t2_success(std::int64_t t1h,
                                                   std::int64_t t1a,
                                                   std::int64_t t0a) {
  if (t1a <= t0a) {
    throw Error(ErrorCode::InvalidInput,
                "success predicate requires t1a > t0a");
  }
  if (t1h <= t0a) {
    throw Error(ErrorCode::InvalidInput,
                "success predicate requires t1h > t0a");
  }
  TheoremPredicateReport rep;
  rep.predicate_id = PredicateId::T2Success;
  const std::int64_t dt_a = t1a - t0a;
  rep.holds = detail::floor_div(t1h - t1a, kBucketSeconds) >= 1 &&
              dt_a >= 1 && dt_a < kTimestampWindow;
  rep.exact_dominance = oracle_dominates(dt_a, t1h - t0a);
  return rep;
}

// Minimal-risk refinement of the success condition: the trailing distance is
// exactly one bucket.
inline TheoremPredicateReport predicate_t3_minimal_risk(std::int64_t t1h,
                                                        std::int64_t t1a,
                                                        std::int64_t t0a) {
  TheoremPredicateReport rep = predicate_t2_success(t1h, t1a, t0a);
  rep.predicate_id = PredicateId::T3MinRisk;
  rep.holds = rep.holds &&
              detail::floor_div(t1h - t1a, kBucketSeconds) == 1;
  return rep;
}

// Downgrade-mode trigger: an honest pair with a gap of at least one bucket
// while the adversary holds no private lead. Dominance reports whether any
// in-window adversarial stamp could beat the honest gap (dt_a = 1 maximizes
// the adjustment factor, so it is the single case to check).
inline TheoremPredicateReport predicate_t4_downgrade(std::int64_t t1h,
                                                     std::int64_t t0h) {
  TheoremPredicateReport rep;
  rep.predicate_id = PredicateId::T4Downgrade;
  rep.holds = predicate_t1_initiation(t1h, t0h);
  rep.exact_dominance = oracle_dominates(1, t1h - t0h);
  return rep;
}

// Release-success condition for the first withheld block: identical shape to
// the T2 condition against the cascade anchor.
inline TheoremPredicateReport predicate_t6_success_i1(std::int64_t t1h,
                                                      std::int64_t t1a,
                                                      std::int64_t t0a) {
  TheoremPredicateReport rep = predicate_t2_success(t1h, t1a, t0a);
  rep.predicate_id = PredicateId::T6SuccessI1;
  return rep;
}

// Release-success condition for later withheld blocks, phrased over the gap
// pair (honest gap at this height, private gap at this height): the honest
// gap must exceed the private gap by at least one bucket.
inline TheoremPredicateReport predicate_t6_success_i2plus(
    std::int64_t honest_gap, std::int64_t private_gap) {
  if (private_gap < 1) {
    throw Error(ErrorCode::InvalidInput, "private gap must be at least 1");
  }
  TheoremPredicateReport rep;
  rep.predicate_id = PredicateId::T6SuccessI2Plus;
  rep.holds =
      detail::floor_div(honest_gap - private_gap, kBucketSeconds) >= 1 &&
      private_gap < kTimestampWindow;
  rep.exact_dominance = honest_gap > private_gap &&
                        oracle_dominates(private_gap, honest_gap);
  return rep;
}

// Minimal-risk release: the gap difference sits in exactly one bucket.
inline TheoremPredicateReport predicate_t7_minimal_risk(
    std::int64_t honest_gap, std::int64_t private_gap) {
  TheoremPredicateReport rep =
      predicate_t6_success_i2plus(honest_gap, private_gap);
  rep.predicate_id = PredicateId::T7MinRisk;
  rep.holds = rep.holds && detail::floor_div(honest_gap - private_gap,
                                             kBucketSeconds) == 1;
  return rep;
}

}  // namespace timefork
