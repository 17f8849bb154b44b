// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>

namespace nrpos {

// OFDM dimensioning. Defaults are the 30 kHz / 38.16 MHz carrier used by the
// ranging prototype: 1536-point FFT at 46.08 MHz with a 132-sample CP.
struct NumerologyConfig {
  int fft_size = 1536;
  double scs_hz = 30e3;
  double sampling_rate_hz = 46.08e6;
  int cp_len = 132;
  int occupied_subcarriers = 1272;
  double center_freq_hz = 3.69e9;  // metadata only

  // Throws Errc::kConfig when the fields are inconsistent.
  void validate() const;

  // Logical subcarrier index of the first occupied RE. Logical indices run
  // 0..fft_size-1 with DC at fft_size/2.
  int first_occupied() const noexcept {
    return fft_size / 2 - occupied_subcarriers / 2;
  }
  bool is_occupied(int subcarrier) const noexcept {
    return subcarrier >= first_occupied() &&
           subcarrier < first_occupied() + occupied_subcarriers;
  }
  int symbol_length() const noexcept { return fft_size + cp_len; }
};

// Logical (DC-centered) subcarrier index -> FFT bin (negative frequencies in
// the upper half).
constexpr int fft_bin(int subcarrier, int fft_size) noexcept {
  const int b = (subcarrier - fft_size / 2) % fft_size;
  return b < 0 ? b + fft_size : b;
}

constexpr int subcarrier_of_bin(int bin, int fft_size) noexcept {
  return (bin + fft_size / 2) % fft_size;
}

// Position of one resource element.
struct ReLocation {
  int symbol = 0;
  int subcarrier = 0;

  friend auto operator<=>(const ReLocation&, const ReLocation&) = default;
};

}  // namespace nrpos
