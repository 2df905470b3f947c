// SPDX-License-Identifier: MIT
//
// Header validation and same-height fork choice.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "timefork/difficulty.hpp"
#include "timefork/header.hpp"

using namespace timefork;

namespace {

BlockHeader make_genesis() {
  BlockHeader g;
  g.height = 0;
  g.timestamp = 0;
  g.difficulty = 4'000'000;
  g.parent_id = kNoParent;
  g.id = 0;
  return g;
}

BlockHeader make_child(const BlockHeader& parent, std::int64_t ts,
                       std::int64_t id, int miner = 0) {
  BlockHeader c;
  c.height = parent.height + 1;
  c.timestamp = ts;
  c.difficulty = compute_difficulty(parent.difficulty, parent.refs_uncles(),
                                    ts - parent.timestamp);
  c.parent_id = parent.id;
  c.miner = miner;
  c.id = id;
  return c;
}

bool has(const std::vector<HeaderViolation>& v, HeaderViolation x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

TEST_CASE("consistent headers validate clean") {
  const BlockHeader g = make_genesis();
  const BlockHeader c = make_child(g, 13, 1);
  CHECK(validate_header(c, g).empty());
  const BlockHeader gc = make_child(c, 14, 2);
  CHECK(validate_header(gc, c).empty());
}

TEST_CASE("each violation is reported") {
  const BlockHeader g = make_genesis();

  BlockHeader stale = make_child(g, 13, 1);
  stale.timestamp = 0;  // not strictly after parent
  CHECK(has(validate_header(stale, g), HeaderViolation::TimestampOrder));

  BlockHeader wrong_height = make_child(g, 13, 1);
  wrong_height.height = 5;
  CHECK(has(validate_header(wrong_height, g), HeaderViolation::HeightMismatch));

  BlockHeader wrong_diff = make_child(g, 13, 1);
  wrong_diff.difficulty += 1;
  CHECK(has(validate_header(wrong_diff, g),
            HeaderViolation::DifficultyMismatch));

  BlockHeader multi = make_child(g, 13, 1);
  multi.timestamp = -4;
  multi.height = 9;
  const auto v = validate_header(multi, g);
  CHECK(has(v, HeaderViolation::TimestampOrder));
  CHECK(has(v, HeaderViolation::HeightMismatch));
}

TEST_CASE("validate_header rejects non-parents") {
  const BlockHeader g = make_genesis();
  BlockHeader c = make_child(g, 13, 1);
  c.parent_id = 42;
  CHECK_THROWS_AS(validate_header(c, g), Error);
}

TEST_CASE("uncle reference feeds the retarget") {
  BlockHeader g = make_genesis();
  g.uncle_ids = {7};
  const BlockHeader c = make_child(g, 13, 1);
  CHECK(c.difficulty ==
        compute_difficulty(g.difficulty, 1, 13));
  CHECK(validate_header(c, g).empty());
}

TEST_CASE("fork choice prefers strictly higher difficulty") {
  const BlockHeader g = make_genesis();
  const BlockHeader honest = make_child(g, 20, 1, 0);    // gap 20: f = -1
  const BlockHeader attacker = make_child(g, 11, 2, 1);  // gap 11: f = 0
  CHECK(attacker.difficulty > honest.difficulty);

  const ForkChoice c = fork_select(honest, attacker, honest.id);
  CHECK(c.winner == attacker.id);
  CHECK(c.reason == ForkReason::HigherDifficulty);
  // Argument order must not matter.
  CHECK(fork_select(attacker, honest, honest.id).winner == attacker.id);
}

TEST_CASE("exact ties fall back to first seen") {
  const BlockHeader g = make_genesis();
  const BlockHeader a = make_child(g, 13, 1, 0);
  const BlockHeader b = make_child(g, 13, 2, 1);  // same stamp, same difficulty
  CHECK(a.difficulty == b.difficulty);
  CHECK(fork_select(a, b, a.id).winner == a.id);
  CHECK(fork_select(a, b, b.id).winner == b.id);
  CHECK(fork_select(a, b, a.id).reason == ForkReason::TieBrokenFirstSeen);
  CHECK_THROWS_AS(fork_select(a, b, 99), Error);
}

TEST_CASE("different heights or parents are incomparable") {
  const BlockHeader g = make_genesis();
  const BlockHeader c1 = make_child(g, 13, 1);
  const BlockHeader c2 = make_child(c1, 26, 2);
  CHECK_THROWS_AS(fork_select(g, c1, g.id), Error);
  CHECK_THROWS_AS(fork_select(c1, c2, c1.id), Error);
  BlockHeader other_parent = make_child(g, 13, 3);
  other_parent.parent_id = 77;
  CHECK_THROWS_AS(fork_select(c1, other_parent, c1.id), Error);
}

TEST_CASE("tie rule names round trip") {
  CHECK(std::string(tie_rule_name(TieRule::FirstSeen)) == "first_seen");
  CHECK(std::string(tie_rule_name(TieRule::PreferAdversary)) ==
        "prefer_adversary");
  CHECK(parse_tie_rule("first_seen") == TieRule::FirstSeen);
  CHECK(parse_tie_rule("prefer_adversary") == TieRule::PreferAdversary);
  CHECK(!parse_tie_rule("bogus").has_value());
}
