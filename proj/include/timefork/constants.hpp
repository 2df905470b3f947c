// timefork — timestamp-forking attack simulator and analyzer
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>

#include "timefork/rational.hpp"

namespace timefork {

// Protocol constants of the modeled chain.  All difficulty and reward rules
// in this library are expressed against these values; they are compile-time
// constants because the modeled protocol does not make them negotiable.
struct ChainConstants {
    // Lowest difficulty the retarget rule will drop to.
    std::uint64_t min_difficulty = std::uint64_t{1} << 17;
    // The retarget step is measured in quanta of parent_difficulty / 2048.
    std::uint64_t adjustment_divisor = 2048;
    // Width in seconds of one timestamp bucket: the adjustment factor only
    // sees floor(dt / bucket).
    std::int64_t bucket = 9;
    // Lower clamp on the adjustment factor.
    std::int64_t f_floor = -99;
    // The target space is 2^256 wide; stored as the exponent since the value
    // itself only appears inside exact-rational cost arithmetic.
    int max_target_log2 = 256;
    // Static block subsidy, in reward units.
    std::int64_t coinbase = 2;
    // Reward for referencing one uncle: coinbase / 32.
    Rational nephew_unit = Rational(2, 32);
    // Farthest generational distance at which an uncle is still rewarded.
    std::int64_t uncle_max_distance = 6;
    // Upper bound on how far into the future a block timestamp may lie
    // relative to its parent and still be accepted by validators.
    std::int64_t dt_max_for_nonfloor = 900;
};

inline constexpr std::uint64_t kMinDifficulty = std::uint64_t{1} << 17;
inline constexpr std::uint64_t kAdjustmentDivisor = 2048;
inline constexpr std::int64_t kBucketSeconds = 9;
inline constexpr std::int64_t kFFloor = -99;
inline constexpr std::int64_t kCoinbase = 2;
inline constexpr std::int64_t kUncleMaxDistance = 6;
inline constexpr std::int64_t kTimestampWindow = 900;

}  // namespace timefork
