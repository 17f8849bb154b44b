// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/numerology.hpp"

#include <cmath>
#include <string>

#include "nrpos/error.hpp"

namespace nrpos {

void NumerologyConfig::validate() const {
  if (fft_size <= 0 || fft_size % 2 != 0) {
    throw Error(Errc::kConfig, "fft_size must be positive and even, got " +
                                   std::to_string(fft_size));
  }
  if (cp_len < 0 || cp_len >= fft_size) {
    throw Error(Errc::kConfig, "cp_len must be in [0, fft_size)");
  }
  if (occupied_subcarriers <= 0 || occupied_subcarriers > fft_size) {
    throw Error(Errc::kConfig, "occupied_subcarriers must be in (0, fft_size]");
  }
  if (scs_hz <= 0 || sampling_rate_hz <= 0) {
    throw Error(Errc::kConfig, "scs_hz and sampling_rate_hz must be positive");
  }
  const double expected = fft_size * scs_hz;
  if (std::abs(expected - sampling_rate_hz) > 1e-6 * sampling_rate_hz) {
    throw Error(Errc::kConfig, "sampling_rate_hz must equal fft_size * scs_hz");
  }
}

}  // namespace nrpos
