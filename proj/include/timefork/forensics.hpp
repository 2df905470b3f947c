// SPDX-License-Identifier: MIT
//
// On-chain forensics: ingest block-header dumps, build per-pool
// timestamp-difference histograms, and flag pools that systematically avoid
// gaps divisible by 9 — the signature a timestamp-manipulating miner leaves
// on the public chain.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "timefork/constants.hpp"
#include "timefork/errors.hpp"
#include "timefork/rational.hpp"

namespace timefork {

struct HeaderRecord {
  std::string chain_id;
  std::int64_t height = 0;
  std::int64_t timestamp = 0;
  std::string miner;
  std::optional<std::uint64_t> difficulty;
};

enum class HeaderFormat { Csv, Jsonl };

struct PoolStats {
  std::string miner;
  std::int64_t block_count = 0;  // blocks mined by the pool (with any dt)
  std::map<std::int64_t, std::int64_t> dt_histogram;
  std::int64_t multiples_of_9_count = 0;
  std::int64_t multiples_minus_1_count = 0;
};

struct ManipulationVerdict {
  std::string miner;
  Rational avoidance_score = Rational(0);
  Rational expected_at_multiples = Rational(0);
  std::int64_t observed_at_multiples = 0;
  bool flagged = false;
  bool sample_sufficient = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline std::int64_t parse_int_field(const std::string& s, const char* what,
                                    std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::DataFormat, "line " + std::to_string(line_no) +
                                           ": bad " + what + " value '" + s +
                                           "'");
  }
}

// Minimal JSONL field extraction: each line is a flat object with string or
// integer values; we locate "key": and read the scalar after it.
inline std::optional<std::string> jsonl_field(const std::string& line,
                                              const std::string& key) {
  const std::string needle = "\"" + key + "\"";
  std::size_t p = line.find(needle);
  if (p == std::string::npos) return std::nullopt;
  p = line.find(':', p + needle.size());
  if (p == std::string::npos) return std::nullopt;
  ++p;
  while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p])))
    ++p;
  if (p >= line.size()) return std::nullopt;
  if (line[p] == '"') {
    const std::size_t q = line.find('"', p + 1);
    if (q == std::string::npos) return std::nullopt;
    return line.substr(p + 1, q - p - 1);
  }
  std::size_t q = p;
  while (q < line.size() && line[q] != ',' && line[q] != '}') ++q;
  return trim(line.substr(p, q - p));
}

}  // namespace detail

// Parse a header dump. CSV needs a `chain,height,timestamp,miner[,difficulty]`
// header row; JSONL is one object per line with the same keys. Records come
// back sorted by (chain_id, height); duplicate heights within a chain and
// malformed rows are errors naming the offending line.
inline std::vector<HeaderRecord> load_headers(std::istream& in,
                                              HeaderFormat format) {
  std::vector<HeaderRecord> out;
  std::string line;
  std::size_t line_no = 0;

  if (format == HeaderFormat::Csv) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::DataFormat, "line 1: missing CSV header row");
    }
    line_no = 1;
    const auto header = detail::split_csv_line(line);
    if (header.size() < 4 || header[0] != "chain" || header[1] != "height" ||
        header[2] != "timestamp" || header[3] != "miner" ||
        (header.size() == 5 && header[4] != "difficulty") ||
        header.size() > 5) {
      throw Error(ErrorCode::DataFormat,
                  "line 1: expected header chain,height,timestamp,miner"
                  "[,difficulty]");
    }
    const bool has_difficulty = header.size() == 5;
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::trim(line).empty()) continue;
      const auto f = detail::split_csv_line(line);
      if (f.size() != header.size()) {
        throw Error(ErrorCode::DataFormat,
                    "line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(f.size()));
      }
      HeaderRecord r;
      r.chain_id = f[0];
      r.height = detail::parse_int_field(f[1], "height", line_no);
      r.timestamp = detail::parse_int_field(f[2], "timestamp", line_no);
      r.miner = f[3];
      if (r.chain_id.empty() || r.miner.empty()) {
        throw Error(ErrorCode::DataFormat,
                    "line " + std::to_string(line_no) +
                        ": chain and miner must be non-empty");
      }
      if (has_difficulty && !f[4].empty()) {
        r.difficulty = static_cast<std::uint64_t>(
            detail::parse_int_field(f[4], "difficulty", line_no));
      }
      out.push_back(std::move(r));
    }
  } else {
    while (std::getline(in, line)) {
      ++line_no;
      if (detail::trim(line).empty()) continue;
      HeaderRecord r;
      const auto chain = detail::jsonl_field(line, "chain");
      const auto height = detail::jsonl_field(line, "height");
      const auto ts = detail::jsonl_field(line, "timestamp");
      const auto miner = detail::jsonl_field(line, "miner");
      if (!chain || !height || !ts || !miner || chain->empty() ||
          miner->empty()) {
        throw Error(ErrorCode::DataFormat,
                    "line " + std::to_string(line_no) +
                        ": object needs chain, height, timestamp, miner");
      }
      r.chain_id = *chain;
      r.height = detail::parse_int_field(*height, "height", line_no);
      r.timestamp = detail::parse_int_field(*ts, "timestamp", line_no);
      r.miner = *miner;
      if (const auto d = detail::jsonl_field(line, "difficulty")) {
        r.difficulty = static_cast<std::uint64_t>(
            detail::parse_int_field(*d, "difficulty", line_no));
      }
      out.push_back(std::move(r));
    }
  }

  std::stable_sort(out.begin(), out.end(),
                   [](const HeaderRecord& a, const HeaderRecord& b) {
                     if (a.chain_id != b.chain_id) return a.chain_id < b.chain_id;
                     return a.height < b.height;
                   });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].chain_id == out[i - 1].chain_id &&
        out[i].height == out[i - 1].height) {
      throw Error(ErrorCode::DataFormat,
                  "duplicate height " + std::to_string(out[i].height) +
                      " in chain '" + out[i].chain_id + "'");
    }
  }
  return out;
}

// Timestamp-difference histogram over consecutive-height pairs within each
// chain. A pair contributes to the child block's miner; gaps in the height
// sequence are skipped. Records must be sorted (load_headers' order).
inline std::map<std::int64_t, std::int64_t> diff_histogram(
    const std::vector<HeaderRecord>& records,
    const std::optional<std::string>& filter_miner = std::nullopt) {
  std::map<std::int64_t, std::int64_t> hist;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const HeaderRecord& child = records[i];
    const HeaderRecord& parent = records[i - 1];
    if (child.chain_id != parent.chain_id) continue;
    if (child.height != parent.height + 1) continue;
    if (filter_miner && child.miner != *filter_miner) continue;
    hist[child.timestamp - parent.timestamp] += 1;
  }
  return hist;
}

// Top-k miners by block count, ties broken lexicographically.
inline std::vector<std::string> pool_rank(
    const std::vector<HeaderRecord>& records, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& r : records) counts[r.miner] += 1;
  std::vector<std::pair<std::string, std::int64_t>> v(counts.begin(),
                                                      counts.end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (const auto& [miner, n] : v) {
    if (static_cast<int>(out.size()) == k) break;
    out.push_back(miner);
  }
  return out;
}

// Per-pool stats (or whole-chain stats when filter_miner is empty).
inline PoolStats pool_stats(const std::vector<HeaderRecord>& records,
                            const std::optional<std::string>& filter_miner) {
  PoolStats s;
  s.miner = filter_miner.value_or("(all)");
  for (const auto& r : records) {
    if (!filter_miner || r.miner == *filter_miner) s.block_count += 1;
  }
  s.dt_histogram = diff_histogram(records, filter_miner);
  for (const auto& [dt, n] : s.dt_histogram) {
    if (dt > 0 && dt % 9 == 0) s.multiples_of_9_count += n;
    if (dt > 0 && dt % 9 == 8) s.multiples_minus_1_count += n;
  }
  return s;
}

// Score how strongly a pool avoids gaps divisible by 9 inside
// [1, window_max]. For each multiple m the expected count is the mean of the
// m-2 and m+1 bins (m-1 is skipped: that is exactly where remapped mass
// lands), and the score is the normalized positive deficit. A pool is flagged
// when the score reaches 0.9 on a sufficient sample, or on the perfect-
// avoidance fast path (zero observed at every multiple with enough expected
// mass for that to be significant).
inline ManipulationVerdict avoidance_score(const PoolStats& stats,
                                           std::int64_t window_max = 45,
                                           std::int64_t min_sample = 200) {
  if (window_max < kBucketSeconds) {
    throw Error(ErrorCode::InvalidInput, "window_max must cover one bucket");
  }
  ManipulationVerdict v;
  v.miner = stats.miner;

  auto count = [&](std::int64_t dt) {
    const auto it = stats.dt_histogram.find(dt);
    return it == stats.dt_histogram.end() ? std::int64_t{0} : it->second;
  };

  std::int64_t window_blocks = 0;
  for (const auto& [dt, n] : stats.dt_histogram) {
    if (dt >= 1 && dt <= window_max) window_blocks += n;
  }

  Rational expected_total(0);
  Rational deficit_total(0);
  std::int64_t observed_total = 0;
  for (std::int64_t m = kBucketSeconds; m <= window_max; m += kBucketSeconds) {
    const Rational expected =
        Rational(count(m - 2) + count(m + 1), 2);
    const std::int64_t observed = count(m);
    expected_total += expected;
    observed_total += observed;
    const Rational deficit = expected - Rational(observed);
    if (deficit > Rational(0)) deficit_total += deficit;
  }
  v.expected_at_multiples = expected_total;
  v.observed_at_multiples = observed_total;
  v.avoidance_score = expected_total > Rational(0)
                          ? deficit_total / expected_total
                          : Rational(0);
  v.sample_sufficient = window_blocks >= min_sample;
  v.flagged =
      v.sample_sufficient && v.avoidance_score >= Rational(9, 10);
  if (!v.flagged && observed_total == 0 && expected_total >= Rational(20)) {
    // Perfect avoidance: expected mass this large with zero hits is already
    // conclusive, so the fast path also vouches for the sample.
    v.flagged = true;
    v.sample_sufficient = true;
  }
  return v;
}

// Verdicts for the top-k pools plus a whole-chain verdict (miner "(all)").
inline std::vector<ManipulationVerdict> detect(
    const std::vector<HeaderRecord>& records, int k,
    std::int64_t window_max = 45, std::int64_t min_sample = 200) {
  std::vector<ManipulationVerdict> out;
  if (records.empty()) return out;
  for (const std::string& miner : pool_rank(records, k)) {
    out.push_back(
        avoidance_score(pool_stats(records, miner), window_max, min_sample));
  }
  out.push_back(
      avoidance_score(pool_stats(records, std::nullopt), window_max,
                      min_sample));
  return out;
}

}  // namespace timefork
