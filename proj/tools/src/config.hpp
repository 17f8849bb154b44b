// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Flat key=value configuration files. Every key must be read by the command
// that loads the file; leftovers are reported as typos.

#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nrpos/dataset.hpp"
#include "nrpos/numerology.hpp"

namespace nrpos::cli {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;
  KeyValueConfig(MetaMap values, std::string source);

  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(std::string_view key) const;
  std::string get_string(std::string_view key, std::string fallback);
  int get_int(std::string_view key, int fallback);
  std::uint64_t get_u64(std::string_view key, std::uint64_t fallback);
  double get_double(std::string_view key, double fallback);
  std::vector<double> get_doubles(std::string_view key,
                                  std::vector<double> fallback);

  // Throws Errc::kConfig naming the first key nobody asked for.
  void reject_unused() const;

 private:
  const std::string* lookup(std::string_view key);
  [[noreturn]] void bad_value(std::string_view key, const std::string& value,
                              const char* expected) const;

  MetaMap values_;
  std::string source_;
  std::set<std::string, std::less<>> used_;
};

// Reads fft_size, scs_hz, sampling_rate_hz, cp_len, occupied_subcarriers
// and center_freq_hz, defaulting to the 38.16 MHz system profile.
NumerologyConfig read_numerology(KeyValueConfig& cfg);

}  // namespace nrpos::cli
