// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Link-budget arithmetic on Q15 samples: mean power per RE, conversion to dBm
// at the antenna port, noise power from empty REs and SNR.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>

#include "nrpos/fixedpoint.hpp"
#include "nrpos/numerology.hpp"
#include "nrpos/ofdm.hpp"

namespace nrpos {

struct DeviceProfile {
  std::string name;
  Amplitude amp = Amplitude::full_scale();
  double g_t = 0.0;      // transmit gain, dB
  double g_r = 0.0;      // receive gain, dB
  double g_t_cal = 0.0;  // TX calibration offset, dB
  double g_r_cal = 0.0;  // RX calibration offset, dB
};

// -36 dBFS, A = 519.
DeviceProfile usrp_b210_profile();
// -12 dBFS, A = 8231.
DeviceProfile oran_vvdn_profile();

struct PowerReport {
  double p_linear = 0.0;     // mean |x|^2 per RE, Q15^2 units
  std::size_t n_res = 0;
  // Exact sum of I^2 + Q^2 when computed from Q15 input; 0 otherwise.
  std::uint64_t energy = 0;
};

// Throws Errc::kDomain on an empty set.
PowerReport power_per_re(std::span<const SampleQ15> values);
PowerReport power_per_re(std::span<const std::complex<double>> values);

// 10log10(P) - 10log10(2^30) + 30 + G_t + G_t^c. Throws Errc::kDomain for
// non-positive power.
double tx_power_dbm(const PowerReport& p, const DeviceProfile& dev);
// 10log10(P) - 10log10(2^30) + 30 - G_r + G_r^c.
double rx_power_dbm(const PowerReport& p, const DeviceProfile& dev);

// power_per_re over the designated empty REs of a grid.
PowerReport noise_power(const ResourceGrid& grid,
                        std::span<const ReLocation> empty_res);

struct SnrEstimate {
  double linear = 0.0;  // (P_r - P_n) / P_n, unclamped
  double db = 0.0;      // 10log10(max(linear, floor))
  bool unreliable = false;  // linear fell below the floor
};

inline constexpr double kDefaultSnrFloor = 1e-6;

// Throws Errc::kDegenerateNoise when p_n has zero power.
SnrEstimate estimate_snr(const PowerReport& p_r, const PowerReport& p_n,
                         double floor = kDefaultSnrFloor);

}  // namespace nrpos
