// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nrpos {

// Failure categories surfaced by the library. The CLI maps these onto exit
// codes, so keep the enumerator values stable.
enum class Errc {
  kRange,            // value outside its representable or permitted range
  kDomain,           // math domain violation (log of zero, negative RTT, ...)
  kInvalidRoot,      // Zadoff-Chu root not coprime with the sequence length
  kConfig,           // invalid configuration
  kMappingConflict,  // two signals mapped onto the same resource element
  kLength,           // buffer too short / lengths inconsistent
  kNoPeak,           // impulse response carries no energy
  kNotDetected,      // no correlation peak above threshold
  kShape,            // sequences of mismatching shape
  kDegenerateNoise,  // zero noise power
  kScenario,         // simulation scenario not realizable
  kParse,            // text or binary format error
  kLookup,           // unknown trace id or field
  kMissingFile,      // required dataset file absent
  kTruncated,        // file ends mid-record or has an odd byte count
  kIo,               // filesystem failure
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Parse failures carry the 1-based line they were detected on.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(Errc::kParse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace nrpos
