// timefork — timestamp-forking attack simulator and analyzer
// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "timefork/difficulty.hpp"
#include "timefork/errors.hpp"

namespace timefork {

constexpr std::int64_t kNoParent = -1;

struct BlockHeader {
    std::int64_t height = 0;
    std::int64_t timestamp = 0;       // seconds since genesis
    std::uint64_t difficulty = 1;
    std::int64_t parent_id = kNoParent;
    int miner = 0;                    // participant id: 0 honest pool, 1 adversary
    std::vector<std::int64_t> uncle_ids;
    std::int64_t id = 0;

    int refs_uncles() const { return uncle_ids.empty() ? 0 : 1; }
};

enum class HeaderViolation {
    TimestampOrder,      // child timestamp not strictly after parent
    HeightMismatch,      // child height != parent height + 1
    DifficultyMismatch,  // stored difficulty != retarget rule output
};

inline const char* header_violation_name(HeaderViolation v) {
    switch (v) {
        case HeaderViolation::TimestampOrder: return "timestamp-order";
        case HeaderViolation::HeightMismatch: return "height";
        case HeaderViolation::DifficultyMismatch: return "difficulty-mismatch";
    }
    return "unknown";
}

// Checks a child header against its parent.  Every violated clause is
// reported; an empty result means the header is consistent.
inline std::vector<HeaderViolation> validate_header(const BlockHeader& header,
                                                    const BlockHeader& parent) {
    if (header.parent_id != parent.id)
        throw Error(ErrorCode::InvalidInput, "validate_header called with non-parent");
    std::vector<HeaderViolation> out;
    const std::int64_t dt = header.timestamp - parent.timestamp;
    if (dt < 1) out.push_back(HeaderViolation::TimestampOrder);
    if (header.height != parent.height + 1) out.push_back(HeaderViolation::HeightMismatch);
    if (dt >= 1) {
        const std::uint64_t want =
            compute_difficulty(parent.difficulty, parent.refs_uncles(), dt);
        if (header.difficulty != want) out.push_back(HeaderViolation::DifficultyMismatch);
    }
    return out;
}

enum class ForkReason { HigherDifficulty, TieBrokenFirstSeen };

struct ForkChoice {
    std::int64_t winner = 0;
    ForkReason reason = ForkReason::HigherDifficulty;
};

// Fork-choice between two same-height siblings: strictly higher difficulty
// wins; an exact tie goes to whichever block the observer saw first.
inline ForkChoice fork_select(const BlockHeader& a, const BlockHeader& b,
                              std::int64_t first_seen) {
    if (a.height != b.height || a.parent_id != b.parent_id)
        throw Error(ErrorCode::IncomparableCandidates,
                    "fork candidates must share height and parent");
    if (a.difficulty > b.difficulty) return {a.id, ForkReason::HigherDifficulty};
    if (b.difficulty > a.difficulty) return {b.id, ForkReason::HigherDifficulty};
    if (first_seen != a.id && first_seen != b.id)
        throw Error(ErrorCode::InvalidInput, "first_seen must name one of the candidates");
    return {first_seen, ForkReason::TieBrokenFirstSeen};
}

// How equal-difficulty races resolve inside the simulator.  FirstSeen is the
// deterministic default; PreferAdversary realizes the "either block may be
// selected" freedom in the attacker's favor for sensitivity runs.
enum class TieRule { FirstSeen, PreferAdversary };

inline const char* tie_rule_name(TieRule t) {
    return t == TieRule::FirstSeen ? "first_seen" : "prefer_adversary";
}

inline std::optional<TieRule> parse_tie_rule(const std::string& s) {
    if (s == "first_seen") return TieRule::FirstSeen;
    if (s == "prefer_adversary") return TieRule::PreferAdversary;
    return std::nullopt;
}

}  // namespace timefork
