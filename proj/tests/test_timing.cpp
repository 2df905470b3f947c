// SPDX-License-Identifier: MIT
//
// Block-interval timing laws. The reference constants below were computed
// independently with arbitrary-precision arithmetic and frozen here; the
// implementation must reproduce them to near machine precision.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "timefork/rng.hpp"
#include "timefork/timing.hpp"

using namespace timefork;

namespace {
const TimingModel kDisc{TimingKind::ExponentialDiscretized, 13.0};
const TimingModel kCont{TimingKind::ExponentialContinuous, 13.0};
}  // namespace

TEST_CASE("discretized bucket probabilities (frozen reference values)") {
  const TimingProbabilities p = timing_probabilities(kDisc);
  CHECK(p.p_ge9 == doctest::Approx(0.5201699896375323).epsilon(1e-14));
  CHECK(p.p_9to18 == doctest::Approx(0.2598665648491598).epsilon(1e-14));
  CHECK(p.p_lt9 == doctest::Approx(1.0 - 0.5201699896375323).epsilon(1e-14));
}

TEST_CASE("continuous bucket probabilities (frozen reference values)") {
  const TimingProbabilities p = timing_probabilities(kCont);
  CHECK(p.p_ge9 == doctest::Approx(0.5004199203605701).epsilon(1e-14));
  CHECK(p.p_9to18 == doctest::Approx(0.2499998236668908).epsilon(1e-14));
  CHECK(p.p_lt9 + p.p_ge9 == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("discretized pmf (frozen reference values)") {
  // p0 and the geometric profile p_k = c e^{-k/13} for k >= 1.
  CHECK(gap_pmf(kDisc, 0) == doctest::Approx(0.0374940223501077).epsilon(1e-13));
  const double c = 0.0769610149165340;
  for (std::int64_t k = 1; k <= 40; ++k) {
    CHECK(gap_pmf(kDisc, k) ==
          doctest::Approx(c * std::exp(-static_cast<double>(k) / 13.0))
              .epsilon(1e-12));
  }
  CHECK(gap_pmf(kDisc, -3) == 0.0);
  CHECK_THROWS_AS(gap_pmf(kCont, 5), Error);
}

TEST_CASE("pmf, tail, and between are mutually consistent") {
  // tail(k) - tail(k+1) == pmf(k), and the pmf sums to 1.
  double sum = 0.0;
  for (std::int64_t k = 0; k <= 400; ++k) {
    CHECK(gap_pmf(kDisc, k) ==
          doctest::Approx(gap_tail(kDisc, k) - gap_tail(kDisc, k + 1))
              .epsilon(1e-11));
    sum += gap_pmf(kDisc, k);
  }
  sum += gap_tail(kDisc, 401);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(gap_tail(kDisc, 0) == 1.0);
  CHECK(gap_tail(kCont, 0) == 1.0);
  CHECK(gap_between(kDisc, 9, 18) ==
        doctest::Approx(gap_tail(kDisc, 9) - gap_tail(kDisc, 18))
            .epsilon(1e-15));
  CHECK(gap_between(kDisc, 12, 12) == 0.0);
  CHECK(gap_between(kDisc, 12, 5) == 0.0);
}

TEST_CASE("discretized tail follows the closed form") {
  const double m = 13.0;
  for (std::int64_t k = 1; k <= 60; ++k) {
    const double want =
        m * (std::exp(1.0 / m) - 1.0) * std::exp(-static_cast<double>(k) / m);
    CHECK(gap_tail(kDisc, k) == doctest::Approx(want).epsilon(1e-13));
  }
  // Continuous tail is the plain exponential.
  for (std::int64_t k = 1; k <= 60; ++k) {
    CHECK(gap_tail(kCont, k) ==
          doctest::Approx(std::exp(-static_cast<double>(k) / m))
              .epsilon(1e-14));
  }
}

TEST_CASE("two-gap pmf sums to one and nests the one-gap law") {
  double sum = 0.0;
  double mean = 0.0;
  for (std::int64_t k = 0; k <= 900; ++k) {
    const double p = gap2_pmf(kDisc, k);
    // The pmf is a difference of tail products evaluated near 1.0, so deep
    // in the tail cancellation can leave a negative residue of a few
    // hundred ulps; anything beyond that would be a real sign error.
    CHECK(p >= -1e-12);
    sum += p;
    mean += static_cast<double>(k) * p;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
  // Stamps are floored arrivals, so the two-gap law keeps the exact mean 2m.
  CHECK(mean == doctest::Approx(26.0).epsilon(1e-6));
}

TEST_CASE("two-gap pmf matches a direct Monte Carlo of the stamping process") {
  // Independent oracle: simulate stamps s_i = floor(a_i) for arrivals with
  // exponential inter-arrival times and a uniform phase, then compare the
  // distribution of s_{i+2} - s_i.
  Rng rng(20260815u);
  const int n = 2'000'000;
  const double m = 13.0;
  std::int64_t count_le_26 = 0;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a0 = rng.uniform01();
    const double a2 = a0 + rng.exponential(m) + rng.exponential(m);
    const std::int64_t dt2 = static_cast<std::int64_t>(std::floor(a2));
    if (dt2 <= 26) ++count_le_26;
    mean += static_cast<double>(dt2);
  }
  double p_le_26 = 0.0;
  for (std::int64_t k = 0; k <= 26; ++k) p_le_26 += gap2_pmf(kDisc, k);
  const double observed = static_cast<double>(count_le_26) / n;
  const double se = std::sqrt(p_le_26 * (1 - p_le_26) / n);
  CHECK(std::fabs(observed - p_le_26) < 4.0 * se);
  CHECK(mean / n == doctest::Approx(26.0).epsilon(2e-3));
}

TEST_CASE("timing names round trip") {
  CHECK(parse_timing_kind("continuous") == TimingKind::ExponentialContinuous);
  CHECK(parse_timing_kind("discretized") ==
        TimingKind::ExponentialDiscretized);
  CHECK(std::string(timing_kind_name(TimingKind::ExponentialContinuous)) ==
        "continuous");
  CHECK(std::string(timing_kind_name(TimingKind::ExponentialDiscretized)) ==
        "discretized");
  CHECK_THROWS_AS(parse_timing_kind("gaussian"), Error);
  CHECK_THROWS_AS(timing_probabilities({TimingKind::ExponentialDiscretized,
                                        -1.0}),
                  Error);
}
