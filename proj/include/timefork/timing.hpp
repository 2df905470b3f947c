// timefork — timestamp-forking attack simulator and analyzer
// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "timefork/errors.hpp"

namespace timefork {

// Block inter-arrival model.  Arrivals are a Poisson process with the given
// mean; the two variants differ in what "the gap of a block" means:
//   ExponentialContinuous — the raw exponential inter-arrival time,
//   ExponentialDiscretized — the difference of integer-floored wall clocks,
//     i.e. dt = floor(U + X) with U uniform on [0,1) (the fractional phase
//     of the previous stamp) and X exponential.  This is what a chain whose
//     headers carry integer seconds actually records.
enum class TimingKind { ExponentialContinuous, ExponentialDiscretized };

struct TimingModel {
    TimingKind distribution = TimingKind::ExponentialDiscretized;
    double mean_block_time = 13.0;
};

inline const char* timing_kind_name(TimingKind k) {
    return k == TimingKind::ExponentialContinuous ? "continuous" : "discretized";
}

inline TimingKind parse_timing_kind(const std::string& s) {
    if (s == "continuous") return TimingKind::ExponentialContinuous;
    if (s == "discretized") return TimingKind::ExponentialDiscretized;
    throw Error(ErrorCode::InvalidInput, "unknown timing model: " + s);
}

// P(dt >= k) for integer k >= 0.
inline double gap_tail(const TimingModel& tm, std::int64_t k) {
    if (k <= 0) return 1.0;
    const double m = tm.mean_block_time;
    if (tm.distribution == TimingKind::ExponentialContinuous)
        return std::exp(-static_cast<double>(k) / m);
    // Sum of the floor(U + X) mass from k upward: m(e^{1/m} - 1) e^{-k/m}.
    return m * std::expm1(1.0 / m) * std::exp(-static_cast<double>(k) / m);
}

// P(lo <= dt < hi).
inline double gap_between(const TimingModel& tm, std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return 0.0;
    return gap_tail(tm, lo) - gap_tail(tm, hi);
}

struct TimingProbabilities {
    double p_lt9;
    double p_9to18;
    double p_ge9;
};

// The three derived probabilities the transition tables are built from.
inline TimingProbabilities timing_probabilities(const TimingModel& tm) {
    if (tm.mean_block_time <= 0)
        throw Error(ErrorCode::InvalidInput, "mean block time must be positive");
    const double ge9 = gap_tail(tm, 9);
    return {1.0 - ge9, gap_between(tm, 9, 18), ge9};
}

namespace detail {
// Antiderivative of the CDF of floor-discretized single gaps:
// Psi(t) = integral of (1 - e^{-t/m}) dt = t + m e^{-t/m}, clamped so that
// the CDF is treated as 0 for negative arguments.
inline double psi_one(double t, double m) {
    if (t <= 0) return m;
    return t + m * std::exp(-t / m);
}
// Same for the sum of two independent gaps (Erlang-2 CDF integrated):
// Phi(t) = t + e^{-t/m} (t + 2m).
inline double phi_two(double t, double m) {
    if (t <= 0) return 2 * m;
    return t + std::exp(-t / m) * (t + 2 * m);
}
}  // namespace detail

// pmf of dt = floor(U + X), X one exponential inter-arrival.
inline double gap_pmf(const TimingModel& tm, std::int64_t k) {
    if (k < 0) return 0.0;
    const double m = tm.mean_block_time;
    if (tm.distribution == TimingKind::ExponentialContinuous)
        throw Error(ErrorCode::InvalidInput, "continuous gaps have no integer pmf");
    const double kk = static_cast<double>(k);
    return detail::psi_one(kk + 1, m) - 2 * detail::psi_one(kk, m) +
           detail::psi_one(kk - 1, m);
}

// pmf of floor(U + X1 + X2): the integer gap observed across two consecutive
// inter-arrivals.  Needed wherever one participant's find consumed an event
// between two stamps of the other chain.
inline double gap2_pmf(const TimingModel& tm, std::int64_t k) {
    if (k < 0) return 0.0;
    const double m = tm.mean_block_time;
    const double kk = static_cast<double>(k);
    return detail::phi_two(kk + 1, m) - 2 * detail::phi_two(kk, m) +
           detail::phi_two(kk - 1, m);
}

}  // namespace timefork
