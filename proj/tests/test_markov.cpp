// SPDX-License-Identifier: MIT
//
// Analytic evaluator: closed-form stationary solutions for the literal
// chains, exact-rational identity proofs, an independent chain-walk Monte
// Carlo, and the frozen reference sweep for the offset-aware refinements.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "timefork/markov.hpp"
#include "timefork/rng.hpp"

using namespace timefork;

namespace {
const TimingModel kDisc{TimingKind::ExponentialDiscretized, 13.0};

StationaryDistribution solve(const TransitionModel& m) {
  const StationaryDistribution d = stationary(m);
  REQUIRE(d.residual < 1e-9);
  double sum = 0.0;
  for (double p : d.probabilities) {
    REQUIRE(p >= 0.0);
    sum += p;
  }
  REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-12));
  return d;
}
}  // namespace

TEST_CASE("all chains have unit row sums") {
  for (StrategyKind s : {StrategyKind::Honest, StrategyKind::Rum,
                         StrategyKind::Uum, StrategyKind::Suum}) {
    for (double alpha : {0.0, 0.05, 0.25, 0.45}) {
      for (ChainFidelity f :
           {ChainFidelity::TableLiteral, ChainFidelity::OffsetAware}) {
        const TransitionModel m = build_chain(s, alpha, kDisc, 32, f);
        CHECK(m.max_row_sum_error() <= 1e-12);
        CHECK(static_cast<int>(m.state_class.size()) == m.n_states());
      }
    }
  }
}

TEST_CASE("two-state replacement chain matches its closed form") {
  // With trigger probability s, every state enters Attack with probability
  // (1-alpha)s, so pi_attack = (1-alpha)s exactly; the adversary absolute
  // rate is alpha exactly and the honest rate is (1-alpha) - alpha*pi_attack.
  for (double alpha : {0.05, 0.25, 0.45}) {
    for (StrategyKind kind : {StrategyKind::Rum, StrategyKind::Uum}) {
      const TransitionModel m =
          build_chain(kind, alpha, kDisc, 32, ChainFidelity::TableLiteral);
      const TimingProbabilities tp = timing_probabilities(kDisc);
      const double s = kind == StrategyKind::Rum ? tp.p_9to18 : tp.p_ge9;
      const StationaryDistribution d = solve(m);
      const double pi_attack = class_occupancy(d, m, StateClass::Attack);
      CHECK(pi_attack == doctest::Approx((1 - alpha) * s).epsilon(1e-12));

      const AbsoluteShares abs = absolute_shares(d, m);
      CHECK(abs.r_a == doctest::Approx(alpha).epsilon(1e-12));
      CHECK(abs.r_h ==
            doctest::Approx((1 - alpha) - alpha * pi_attack).epsilon(1e-12));

      const RelativeShares rel = relative_shares(abs);
      CHECK(rel.e_a == doctest::Approx(alpha / (1 - alpha * pi_attack))
                           .epsilon(1e-12));
      CHECK(rel.e_a + rel.e_h == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(forking_rate(m, d) ==
            doctest::Approx(pi_attack * alpha).epsilon(1e-12));
    }
  }
}

TEST_CASE("adversary absolute rate equals alpha exactly (rational proof)") {
  // The engine-level claim behind the fairness identity: on the replacement
  // chain the adversary's absolute reward rate is alpha — exactly, for any
  // rational alpha and any trigger probability s.
  for (auto [an, ad] : {std::pair{1, 4}, {3, 10}, {9, 20}}) {
    const BigRational alpha(an, ad);
    for (auto [sn, sd] : {std::pair{1, 2}, {13, 25}, {1, 7}}) {
      const BigRational s(sn, sd);
      const auto edges = build_replacement_chain_exact(alpha, s);
      const auto pi = stationary_exact(2, edges);
      CHECK(pi[0] + pi[1] == BigRational(1));
      CHECK(pi[1] == (BigRational(1) - alpha) * s);
      const auto [rh, ra] = absolute_shares_exact(pi, edges);
      CHECK(ra == alpha);
      CHECK(rh == BigRational(1) - alpha - alpha * pi[1]);
    }
  }
}

TEST_CASE("staircase ladder reproduces the structural share") {
  // With every release replacing one honest block, the adversary keeps every
  // find and the honest pool loses one block per adversary find, so the
  // relative share is alpha/(1-alpha). The N=32 ladder reaches it up to
  // truncation error, which is negligible at alpha = 0.25.
  const TransitionModel m =
      build_chain(StrategyKind::Suum, 0.25, kDisc, 32,
                  ChainFidelity::TableLiteral);
  const StationaryDistribution d = solve(m);
  const RelativeShares rel = relative_shares(absolute_shares(d, m));
  CHECK(rel.e_a == doctest::Approx(0.25 / 0.75).epsilon(1e-9));
}

TEST_CASE("staircase truncation") {
  // At alpha = 0.25 the ladder occupancy decays geometrically (ratio 1/3),
  // so N = 32 and N = 64 agree to 1e-6. At alpha = 0.45 the ratio is 9/11
  // and the truncation error is visible — the depth genuinely matters there.
  auto e_a_at = [](double alpha, int n) {
    const TransitionModel m = build_chain(StrategyKind::Suum, alpha, kDisc, n,
                                          ChainFidelity::TableLiteral);
    const StationaryDistribution d = stationary(m);
    return relative_shares(absolute_shares(d, m)).e_a;
  };
  CHECK(std::fabs(e_a_at(0.25, 32) - e_a_at(0.25, 64)) < 1e-6);
  const double drift45 = std::fabs(e_a_at(0.45, 32) - e_a_at(0.45, 256));
  CHECK(drift45 > 1e-6);   // truncation is NOT depth-invariant here
  CHECK(drift45 < 2e-2);   // but stays small enough for 2-decimal sweeps
  // Deeper ladders converge toward the structural value.
  CHECK(std::fabs(e_a_at(0.45, 256) - 0.45 / 0.55) <
        std::fabs(e_a_at(0.45, 32) - 0.45 / 0.55));
}

TEST_CASE("offset-aware sweeps match the frozen reference table") {
  // Reference values computed ahead of implementation from the stationary
  // laws of the gap/offset dynamics, rounded to four decimals.
  struct Row {
    double alpha, rum_ea, rum_fr, uum_ea, uum_fr;
  };
  const Row rows[] = {
      {0.05, 0.0506, 0.0123, 0.0513, 0.0253},
      {0.15, 0.1551, 0.0329, 0.1614, 0.0706},
      {0.25, 0.2627, 0.0483, 0.2800, 0.1072},
      {0.35, 0.3718, 0.0585, 0.4036, 0.1328},
      {0.45, 0.4806, 0.0636, 0.5270, 0.1461},
  };
  for (const Row& r : rows) {
    const MarkovGridRow rum = evaluate_markov_point(
        StrategyKind::Rum, r.alpha, kDisc, 32, ChainFidelity::OffsetAware);
    const MarkovGridRow uum = evaluate_markov_point(
        StrategyKind::Uum, r.alpha, kDisc, 32, ChainFidelity::OffsetAware);
    CHECK(std::fabs(rum.e_a - r.rum_ea) < 1e-3);
    CHECK(std::fabs(rum.fr - r.rum_fr) < 1e-3);
    CHECK(std::fabs(uum.e_a - r.uum_ea) < 1e-3);
    CHECK(std::fabs(uum.fr - r.uum_fr) < 1e-3);
  }
}

TEST_CASE("offset-aware chain agrees with a direct chain walk") {
  // Independent check of the stationary solver: walk the chain for 10^7
  // steps and compare the accumulated reward shares within Monte Carlo error.
  const TransitionModel m =
      build_chain(StrategyKind::Uum, 0.25, kDisc, 32,
                  ChainFidelity::OffsetAware);
  // Build per-state cumulative transition tables.
  const int n = m.n_states();
  std::vector<std::vector<const Transition*>> out(n);
  for (const auto& t : m.transitions) out[t.src].push_back(&t);

  Rng rng(424242u);
  int state = 0;
  long double rh = 0.0L, ra = 0.0L;
  const int steps = 10'000'000;
  for (int i = 0; i < steps; ++i) {
    double u = rng.uniform01();
    const Transition* chosen = out[state].back();
    for (const Transition* t : out[state]) {
      if (u < t->p) {
        chosen = t;
        break;
      }
      u -= t->p;
    }
    rh += chosen->r_h;
    ra += chosen->r_a;
    state = chosen->dst;
  }
  const double e_a_mc =
      static_cast<double>(ra) / static_cast<double>(ra + rh);
  const MarkovGridRow row = evaluate_markov_point(
      StrategyKind::Uum, 0.25, kDisc, 32, ChainFidelity::OffsetAware);
  // 3 sigma for a share estimated from ~10^7 effective samples.
  CHECK(std::fabs(e_a_mc - row.e_a) < 5e-4);
}

TEST_CASE("honest chain is trivial at every alpha") {
  for (double alpha : {0.0, 0.2, 0.45}) {
    const MarkovGridRow row = evaluate_markov_point(
        StrategyKind::Honest, alpha, kDisc, 32, ChainFidelity::TableLiteral);
    CHECK(row.e_a == doctest::Approx(alpha).epsilon(1e-12));
    CHECK(row.fr == 0.0);
    CHECK(row.ac == 0.0);
    CHECK(row.pi_deploy == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("chains without a unique stationary law are rejected") {
  TransitionModel m;
  m.strategy = StrategyKind::Honest;
  m.alpha = 0.0;
  m.timing = kDisc;
  m.state_names = {"a", "b"};
  m.state_class = {StateClass::Deploy, StateClass::Deploy};
  m.transitions.push_back({0, 0, 1.0, 0.0, 0.0});
  m.transitions.push_back({1, 1, 1.0, 0.0, 0.0});
  CHECK_THROWS_AS(stationary(m), Error);
}

TEST_CASE("attack cost is exact and guards its domain") {
  const ChainConstants cc{};
  const BigRational c = attack_cost(Rational(1, 2), 3, 1, cc);
  BigRational want(1);
  want /= BigRational(boost::multiprecision::cpp_int(1) << 256);
  CHECK(c == want);  // (1/2) * 2 / 2^256
  CHECK(attack_cost(Rational(1), 5, 5, cc) == BigRational(0));
  CHECK_THROWS_AS(attack_cost(Rational(1), 1, 2, cc), Error);
  CHECK_THROWS_AS(attack_cost(Rational(3, 2), 2, 1, cc), Error);

  // Grid rows: replacement-window attacks leave no difficulty footprint
  // versus the unrestricted/staircase stamps at the historical gap.
  const MarkovGridRow rum = evaluate_markov_point(
      StrategyKind::Rum, 0.25, kDisc, 32, ChainFidelity::OffsetAware);
  const MarkovGridRow uum = evaluate_markov_point(
      StrategyKind::Uum, 0.25, kDisc, 32, ChainFidelity::OffsetAware);
  const MarkovGridRow suum = evaluate_markov_point(
      StrategyKind::Suum, 0.25, kDisc, 32, ChainFidelity::TableLiteral);
  CHECK(rum.ac == 0.0);
  CHECK(uum.ac == suum.ac);
  CHECK(uum.ac > 0.0);
  CHECK(uum.ac < 1e-60);
}

TEST_CASE("state classes partition and occupancies sum to one") {
  const TransitionModel m = build_chain(StrategyKind::Suum, 0.3, kDisc, 16,
                                        ChainFidelity::TableLiteral);
  const StationaryDistribution d = solve(m);
  const double total = class_occupancy(d, m, StateClass::Deploy) +
                       class_occupancy(d, m, StateClass::Downgrade) +
                       class_occupancy(d, m, StateClass::Attack);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("alpha domain is guarded") {
  CHECK_THROWS_AS(build_chain(StrategyKind::Uum, 1.0, kDisc), Error);
  CHECK_THROWS_AS(build_chain(StrategyKind::Uum, -0.1, kDisc), Error);
  // Offset-aware refinement is defined for the discretized law only.
  CHECK_THROWS_AS(build_chain(StrategyKind::Uum, 0.25,
                              {TimingKind::ExponentialContinuous, 13.0}, 32,
                              ChainFidelity::OffsetAware),
                  Error);
}
