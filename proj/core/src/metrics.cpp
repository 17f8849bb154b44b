// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/metrics.hpp"

#include <cmath>

#include "nrpos/error.hpp"

namespace nrpos {
namespace {

// 10log10((2^15)^2)
const double kFullScaleDb = 20.0 * std::log10(static_cast<double>(kQ15One));

double power_db(const PowerReport& p) {
  if (!(p.p_linear > 0.0)) {
    throw Error(Errc::kDomain, "power must be positive to convert to dBm");
  }
  return 10.0 * std::log10(p.p_linear);
}

}  // namespace

DeviceProfile usrp_b210_profile() {
  return {"usrp_b210", Amplitude(519)};
}

DeviceProfile oran_vvdn_profile() {
  return {"oran_vvdn_ru", Amplitude(8231)};
}

PowerReport power_per_re(std::span<const SampleQ15> values) {
  if (values.empty()) throw Error(Errc::kDomain, "power over an empty RE set");
  std::uint64_t energy = 0;
  for (const auto& s : values) {
    const std::int64_t i = s.i;
    const std::int64_t q = s.q;
    energy += static_cast<std::uint64_t>(i * i + q * q);
  }
  return {static_cast<double>(energy) / static_cast<double>(values.size()),
          values.size(), energy};
}

PowerReport power_per_re(std::span<const std::complex<double>> values) {
  if (values.empty()) throw Error(Errc::kDomain, "power over an empty RE set");
  double acc = 0.0;
  for (const auto& z : values) acc += std::norm(z);
  return {acc / static_cast<double>(values.size()), values.size(), 0};
}

double tx_power_dbm(const PowerReport& p, const DeviceProfile& dev) {
  return power_db(p) - kFullScaleDb + 30.0 + dev.g_t + dev.g_t_cal;
}

double rx_power_dbm(const PowerReport& p, const DeviceProfile& dev) {
  return power_db(p) - kFullScaleDb + 30.0 - dev.g_r + dev.g_r_cal;
}

PowerReport noise_power(const ResourceGrid& grid,
                        std::span<const ReLocation> empty_res) {
  if (empty_res.empty()) {
    throw Error(Errc::kDomain, "noise power needs at least one empty RE");
  }
  IqBufferQ15 values;
  values.reserve(empty_res.size());
  for (const auto& loc : empty_res) values.push_back(grid.at(loc));
  return power_per_re(values);
}

SnrEstimate estimate_snr(const PowerReport& p_r, const PowerReport& p_n,
                         double floor) {
  if (!(p_n.p_linear > 0.0)) {
    throw Error(Errc::kDegenerateNoise, "noise power is zero");
  }
  SnrEstimate est;
  est.linear = (p_r.p_linear - p_n.p_linear) / p_n.p_linear;
  est.unreliable = !(est.linear >= floor);
  est.db = 10.0 * std::log10(est.unreliable ? floor : est.linear);
  return est;
}

}  // namespace nrpos
