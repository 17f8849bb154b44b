// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace nrpos::cli {

// Parses argv, runs one subcommand and returns the process exit code:
// 0 success, 1 usage, 2 data error, 3 internal failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nrpos::cli
