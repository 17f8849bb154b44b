// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/error.hpp"

namespace nrpos {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::kRange: return "range";
    case Errc::kDomain: return "domain";
    case Errc::kInvalidRoot: return "invalid-root";
    case Errc::kConfig: return "config";
    case Errc::kMappingConflict: return "mapping-conflict";
    case Errc::kLength: return "length";
    case Errc::kNoPeak: return "no-peak";
    case Errc::kNotDetected: return "not-detected";
    case Errc::kShape: return "shape";
    case Errc::kDegenerateNoise: return "degenerate-noise";
    case Errc::kScenario: return "scenario";
    case Errc::kParse: return "parse";
    case Errc::kLookup: return "lookup";
    case Errc::kMissingFile: return "missing-file";
    case Errc::kTruncated: return "truncated";
    case Errc::kIo: return "io";
  }
  return "unknown";
}

}  // namespace nrpos
