// timefork — timestamp-forking attack simulator and analyzer
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>

#include "timefork/constants.hpp"
#include "timefork/errors.hpp"
#include "timefork/rational.hpp"

namespace timefork {

// Reward of a mainchain block: static coinbase, plus 1/32 of the coinbase
// per referenced uncle, plus transaction fees accrued linearly in the block
// gap (fee_rate_lambda units per second).  Exact rational arithmetic.
inline Rational mainchain_reward(int m_uncles, std::int64_t dt,
                                 const Rational& fee_rate_lambda) {
    if (m_uncles < 0 || m_uncles > 2)
        throw Error(ErrorCode::InvalidUncleCount,
                    "a block may reference at most 2 uncles, got " + std::to_string(m_uncles));
    if (dt <= 0)
        throw Error(ErrorCode::InvalidTimestamp, "block gap dt must be >= 1");
    return Rational(kCoinbase) + Rational(m_uncles, 16) +
           fee_rate_lambda * Rational(dt);
}

// Reward of an uncle block included at generational distance d:
// (8 - d)/8 of the coinbase for d in [1,6], nothing beyond.
inline Rational uncle_reward(std::int64_t d) {
    if (d <= 0)
        throw Error(ErrorCode::InvalidDistance,
                    "uncle distance must be >= 1, got " + std::to_string(d));
    if (d > kUncleMaxDistance) return Rational(0);
    return Rational(8 - d, 8) * Rational(kCoinbase);
}

// Reward earned by the including (nephew) block per referenced uncle.
inline Rational nephew_reward(int m_uncles) {
    if (m_uncles < 0 || m_uncles > 2)
        throw Error(ErrorCode::InvalidUncleCount,
                    "a block may reference at most 2 uncles, got " + std::to_string(m_uncles));
    return Rational(m_uncles) * Rational(kCoinbase, 32);
}

}  // namespace timefork
