// SPDX-License-Identifier: MIT
//
// Reward schedule: exact rational values for mainchain, uncle, and nephew
// rewards, plus the fee term.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "timefork/errors.hpp"
#include "timefork/rational.hpp"
#include "timefork/rewards.hpp"

using namespace timefork;

TEST_CASE("mainchain reward") {
  CHECK(mainchain_reward(0, 13, Rational(0)) == Rational(2));
  CHECK(mainchain_reward(1, 13, Rational(0)) == Rational(33, 16));
  CHECK(mainchain_reward(2, 13, Rational(0)) == Rational(17, 8));
  // Fee term is linear in the gap.
  CHECK(mainchain_reward(0, 13, Rational(1, 1000)) == Rational(2013, 1000));
  CHECK(mainchain_reward(0, 1, Rational(1)) == Rational(3));
  CHECK_THROWS_AS(mainchain_reward(3, 13, Rational(0)), Error);
  CHECK_THROWS_AS(mainchain_reward(-1, 13, Rational(0)), Error);
  CHECK_THROWS_AS(mainchain_reward(0, 0, Rational(0)), Error);
}

TEST_CASE("uncle reward by distance") {
  CHECK(uncle_reward(1) == Rational(7, 4));
  CHECK(uncle_reward(2) == Rational(3, 2));
  CHECK(uncle_reward(3) == Rational(5, 4));
  CHECK(uncle_reward(4) == Rational(1));
  CHECK(uncle_reward(5) == Rational(3, 4));
  CHECK(uncle_reward(6) == Rational(1, 2));
  // Past the inclusion horizon the reward is zero, not an error.
  CHECK(uncle_reward(7) == Rational(0));
  CHECK(uncle_reward(100) == Rational(0));
  CHECK_THROWS_AS(uncle_reward(0), Error);
  CHECK_THROWS_AS(uncle_reward(-2), Error);
  // Closed form over the whole valid range.
  for (int d = 1; d <= 6; ++d) {
    CHECK(uncle_reward(d) == Rational(8 - d, 8) * Rational(2));
  }
}

TEST_CASE("nephew reward per referenced uncle") {
  CHECK(nephew_reward(0) == Rational(0));
  CHECK(nephew_reward(1) == Rational(1, 16));
  CHECK(nephew_reward(2) == Rational(1, 8));
  CHECK_THROWS_AS(nephew_reward(3), Error);
  CHECK_THROWS_AS(nephew_reward(-1), Error);
}

TEST_CASE("rational arithmetic stays exact") {
  Rational sum(0);
  for (int i = 0; i < 16; ++i) sum += Rational(1, 16);
  CHECK(sum == Rational(1));
  CHECK(Rational::from_decimal("0.001") == Rational(1, 1000));
  CHECK(Rational::from_decimal("2") == Rational(2));
  CHECK(Rational::from_decimal("0.0625") == Rational(1, 16));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(-3, 9) == Rational(-1, 3));
  CHECK_THROWS_AS(Rational(1, 0), Error);
}
