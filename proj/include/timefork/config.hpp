// SPDX-License-Identifier: MIT
//
// Plain `key = value` run-configuration files. Keys are exactly the SimConfig
// field names, so a config file and the CLI flags describe runs in the same
// vocabulary. '#' starts a comment; unknown keys and unparsable values are
// errors that name the offending line.

#pragma once

#include <cstdint>
#include <istream>
#include <sstream>
#include <string>

#include "timefork/errors.hpp"
#include "timefork/forensics.hpp"  // detail::trim
#include "timefork/sim.hpp"

namespace timefork {

namespace detail {

inline Error config_error(std::size_t line_no, const std::string& msg) {
  return Error(ErrorCode::DataFormat,
               "line " + std::to_string(line_no) + ": " + msg);
}

inline double parse_config_double(const std::string& v, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw config_error(line_no, "bad number '" + v + "'");
  }
}

inline std::int64_t parse_config_int(const std::string& v,
                                     std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const std::int64_t x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw config_error(line_no, "bad integer '" + v + "'");
  }
}

inline std::uint64_t parse_config_uint(const std::string& v,
                                       std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size() || v.front() == '-')
      throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw config_error(line_no, "bad unsigned integer '" + v + "'");
  }
}

inline bool parse_config_bool(const std::string& v, std::size_t line_no) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw config_error(line_no, "bad boolean '" + v + "' (use true/false)");
}

inline Rational parse_config_rational(const std::string& v,
                                      std::size_t line_no) {
  try {
    const std::size_t slash = v.find('/');
    if (slash != std::string::npos) {
      return Rational(parse_config_int(v.substr(0, slash), line_no),
                      parse_config_int(v.substr(slash + 1), line_no));
    }
    return Rational::from_decimal(v);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw config_error(line_no, "bad rational '" + v + "'");
  }
}

}  // namespace detail

// Apply one key/value pair to a config. Shared by the file parser and the
// CLI so both accept exactly the same vocabulary.
inline void set_config_field(SimConfig& cfg, const std::string& key,
                             const std::string& value,
                             std::size_t line_no = 0) {
  using namespace detail;
  if (key == "alpha") {
    cfg.alpha = parse_config_double(value, line_no);
  } else if (key == "strategy") {
    const auto k = parse_strategy(value);
    if (!k) throw config_error(line_no, "unknown strategy '" + value + "'");
    cfg.strategy = *k;
  } else if (key == "mean_block_time") {
    cfg.mean_block_time = parse_config_double(value, line_no);
  } else if (key == "n_blocks") {
    cfg.n_blocks = parse_config_int(value, line_no);
  } else if (key == "n_trials") {
    cfg.n_trials = static_cast<int>(parse_config_int(value, line_no));
  } else if (key == "seed") {
    cfg.seed = parse_config_uint(value, line_no);
  } else if (key == "timing") {
    try {
      cfg.timing = parse_timing_kind(value);
    } catch (const Error&) {
      throw config_error(line_no, "unknown timing '" + value + "'");
    }
  } else if (key == "genesis_difficulty") {
    cfg.genesis_difficulty = parse_config_uint(value, line_no);
  } else if (key == "fee_rate_lambda") {
    cfg.fee_rate_lambda = parse_config_rational(value, line_no);
  } else if (key == "include_uncle_rewards") {
    cfg.include_uncle_rewards = parse_config_bool(value, line_no);
  } else if (key == "tie_break") {
    const auto t = parse_tie_rule(value);
    if (!t) throw config_error(line_no, "unknown tie_break '" + value + "'");
    cfg.tie_break = *t;
  } else if (key == "suum_stamp_policy") {
    const auto p = parse_stamp_policy(value);
    if (!p) {
      throw config_error(line_no, "unknown suum_stamp_policy '" + value + "'");
    }
    cfg.suum_stamp_policy = *p;
  } else {
    throw config_error(line_no, "unknown key '" + key + "'");
  }
}

// Parse a config stream on top of `base` (defaults, or CLI-provided values
// that the file then overrides — callers choose the layering).
inline SimConfig parse_config(std::istream& in, SimConfig base = SimConfig{}) {
  SimConfig cfg = base;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = detail::trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw detail::config_error(line_no, "expected 'key = value'");
    }
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw detail::config_error(line_no, "expected 'key = value'");
    }
    set_config_field(cfg, key, value, line_no);
  }
  return cfg;
}

}  // namespace timefork
