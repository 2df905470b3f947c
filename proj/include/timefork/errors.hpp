// timefork — timestamp-forking attack simulator and analyzer
// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace timefork {

// Every domain failure carries a stable machine-readable code plus a
// human-readable message.  The CLI maps these to exit code 2 (data error);
// code paths that must distinguish cases switch on the code.
enum class ErrorCode {
    InvalidTimestamp,        // dt <= 0 where a positive block gap is required
    InvalidUncleCount,       // more than 2 uncles referenced
    InvalidDistance,         // uncle generational distance < 1
    IncomparableCandidates,  // fork candidates with different parent/height
    InvalidInput,            // precondition violated (bad alpha, empty grid, ...)
    NegativeCost,            // attack cost queried with d0 < d1
    NoUniqueStationary,      // reducible/periodic chain, no unique fixed point
    DataFormat,              // malformed forensic input row
    Io,                      // file could not be read/written
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidTimestamp: return "invalid-timestamp";
        case ErrorCode::InvalidUncleCount: return "invalid-uncle-count";
        case ErrorCode::InvalidDistance: return "invalid-distance";
        case ErrorCode::IncomparableCandidates: return "incomparable-candidates";
        case ErrorCode::InvalidInput: return "invalid-input";
        case ErrorCode::NegativeCost: return "negative-cost";
        case ErrorCode::NoUniqueStationary: return "no-unique-stationary";
        case ErrorCode::DataFormat: return "data-format";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace timefork
