// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/simchan.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nrpos/chanest.hpp"
#include "nrpos/error.hpp"
#include "nrpos/metrics.hpp"

namespace nrpos {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double hann_sinc(double t) {
  constexpr double kHalfWidth = kFractionalDelayHalfTaps + 1;
  if (std::abs(t) >= kHalfWidth) return 0.0;
  const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * t / kHalfWidth));
  const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
  return sinc * window;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t CounterRng::next_u64() noexcept {
  ++counter_;
  return splitmix_finalize(seed_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::gaussian() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::vector<Cplx> apply_delay(std::span<const Cplx> samples, double delay,
                              DelayMode mode) {
  const auto size = static_cast<double>(samples.size());
  if (!(delay >= 0.0) || !(delay < size)) {
    throw Error(Errc::kRange, "delay " + std::to_string(delay) +
                                  " outside [0, " + std::to_string(samples.size()) +
                                  ")");
  }
  const int len = static_cast<int>(samples.size());
  if (mode == DelayMode::kCyclic) {
    auto spec = fft(samples);
    for (int b = 0; b < len; ++b) {
      const int f = b < (len + 1) / 2 ? b : b - len;
      const double phase = -2.0 * std::numbers::pi * f * delay / len;
      spec[b] *= Cplx(std::cos(phase), std::sin(phase));
    }
    return ifft(spec, 1.0 / len);
  }

  const int whole = static_cast<int>(std::floor(delay));
  const double frac = delay - whole;
  std::vector<Cplx> out(len);
  if (frac == 0.0) {
    for (int n = whole; n < len; ++n) out[n] = samples[n - whole];
    return out;
  }
  constexpr int kHalf = kFractionalDelayHalfTaps;
  double taps[2 * kHalf + 1];
  for (int m = -kHalf; m <= kHalf; ++m) taps[m + kHalf] = hann_sinc(m - frac);
  for (int n = whole; n < len; ++n) {
    Cplx acc{};
    for (int m = -kHalf; m <= kHalf; ++m) {
      const int src = n - whole - m;
      if (src >= 0 && src < len) acc += taps[m + kHalf] * samples[src];
    }
    out[n] = acc;
  }
  return out;
}

std::vector<Cplx> apply_awgn(std::span<const Cplx> samples, double snr_db,
                             double signal_power, std::uint64_t seed) {
  std::vector<Cplx> out(samples.begin(), samples.end());
  if (std::isinf(snr_db) && snr_db > 0) return out;
  if (!(signal_power > 0.0)) {
    throw Error(Errc::kDomain, "apply_awgn needs positive signal power");
  }
  const double variance = signal_power / std::pow(10.0, snr_db / 10.0);
  const double sigma = std::sqrt(variance / 2.0);
  CounterRng rng(seed);
  for (auto& v : out) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    v += Cplx(sigma * re, sigma * im);
  }
  return out;
}

std::vector<Cplx> apply_channel(std::span<const Cplx> samples,
                                const ChannelSpec& spec, double signal_power) {
  if (spec.taps.empty()) throw Error(Errc::kConfig, "channel needs a tap");
  std::vector<Cplx> mixed(samples.size());
  for (const auto& tap : spec.taps) {
    const auto delayed = apply_delay(samples, tap.delay_samples);
    for (std::size_t n = 0; n < mixed.size(); ++n) mixed[n] += tap.gain * delayed[n];
  }
  return apply_awgn(mixed, spec.snr_db, signal_power, spec.seed);
}

double round_trip_delay_samples(double distance_m,
                                const NumerologyConfig& numerology) {
  return 2.0 * distance_m / kSpeedOfLight * numerology.sampling_rate_hz;
}

ReferenceSignal scenario_srs(const RttScenario& sc) {
  SrsConfig srs = sc.srs;
  srs.symbol = kSrsSymbol;
  return generate_srs(srs, sc.numerology);
}

std::vector<ReLocation> scenario_noise_res(const RttScenario& sc) {
  const auto srs = scenario_srs(sc);
  std::vector<ReLocation> out;
  out.reserve(srs.re_indices.size());
  for (const auto& loc : srs.re_indices) out.push_back({kNoiseSymbol, loc.subcarrier});
  return out;
}

namespace {

// Mean per-RE power of the mapped SRS at the scenario amplitude.
double srs_re_power(const RttScenario& sc, const ReferenceSignal& srs) {
  IqBufferQ15 mapped;
  mapped.reserve(srs.symbols.size());
  for (const auto& z : srs.symbols) mapped.push_back(rescale(quantize(z), sc.amp));
  return power_per_re(mapped).p_linear;
}

}  // namespace

double receiver_scale(const RttScenario& sc) {
  constexpr double kHeadroomSigma = 7.0;
  constexpr double kCeiling = 32000.0;
  const double p_re = srs_re_power(sc, scenario_srs(sc));
  const double noise_sigma =
      std::isinf(sc.snr_db) ? 0.0 : std::sqrt(p_re / std::pow(10.0, sc.snr_db / 10.0) / 2.0);
  const double peak = std::sqrt(p_re) + kHeadroomSigma * noise_sigma;
  return peak > kCeiling ? kCeiling / peak : 1.0;
}

std::vector<Snapshot> simulate_rtt_exchange(const RttScenario& sc) {
  const auto& nm = sc.numerology;
  nm.validate();
  if (sc.num_snapshots < 1) throw Error(Errc::kScenario, "num_snapshots must be >= 1");
  if (!(sc.distance_m >= 0.0)) throw Error(Errc::kScenario, "distance must be >= 0");

  const double delay = round_trip_delay_samples(sc.distance_m, nm) + sc.bias_samples;
  if (!(delay >= 0.0)) throw Error(Errc::kScenario, "negative total delay");

  // The receiver's FFT window must only see this symbol's CP: the delay plus
  // the fractional filter's look-back has to fit inside cp_len.
  double support = delay;
  for (const auto& tap : sc.multipath) {
    if (!(tap.delay_samples >= 0.0)) {
      throw Error(Errc::kScenario, "multipath delays must be >= 0");
    }
    support = std::max(support, delay + tap.delay_samples);
  }
  const double look_back = std::ceil(support) +
                           (support != std::floor(support) ? kFractionalDelayHalfTaps : 0);
  if (look_back > nm.cp_len) {
    throw Error(Errc::kScenario,
                "round trip of " + std::to_string(delay) +
                    " samples exceeds the cyclic prefix window (range ambiguity)");
  }

  const auto srs = scenario_srs(sc);
  const auto grid = grid_map(ResourceGrid(2, nm.fft_size), srs, sc.amp, nm);
  const auto tx = to_complex(modulate(grid, nm));

  std::vector<Cplx> mixed = apply_delay(tx, delay);
  for (const auto& tap : sc.multipath) {
    const auto echo = apply_delay(tx, delay + tap.delay_samples);
    for (std::size_t n = 0; n < mixed.size(); ++n) mixed[n] += tap.gain * echo[n];
  }

  // Per-sample noise variance giving the requested per-RE SNR after the
  // unnormalized forward DFT: P_re / (K * snr).
  IqBufferQ15 mapped;
  for (const auto& loc : srs.re_indices) mapped.push_back(grid.at(loc));
  const double signal_power = power_per_re(mapped).p_linear / nm.fft_size;

  const double scale = receiver_scale(sc);
  const double truth = delay - sc.bias_samples;
  std::vector<Snapshot> out;
  out.reserve(sc.num_snapshots);
  for (int s = 0; s < sc.num_snapshots; ++s) {
    const auto noisy = apply_awgn(mixed, sc.snr_db, signal_power,
                                  sc.seed ^ static_cast<std::uint64_t>(s));
    IqBufferQ15 rx;
    rx.reserve(noisy.size());
    for (const auto& v : noisy) rx.push_back(round_to_q15(scale * v));
    out.push_back({demodulate(rx, nm, 2), truth});
  }
  return out;
}

DatasetRecord to_dataset_record(const RttScenario& sc,
                                std::span<const Snapshot> snapshots,
                                double tx_gain_db) {
  const auto& nm = sc.numerology;
  const auto srs = scenario_srs(sc);
  const auto noise_res = scenario_noise_res(sc);
  const CombLayout layout{sc.srs.start_re, sc.srs.comb_size, nm.fft_size};

  DatasetRecord rec;
  rec.distance_m = sc.distance_m;
  rec.tx_gain_db = tx_gain_db;
  for (const auto& snap : snapshots) {
    const auto comb = ls_estimate(snap.rx_grid, srs);
    const auto interp = interpolate_linear(comb, sc.srs.comb_size);
    auto impulse = impulse_response(interp, nm.fft_size, {layout.first_subcarrier, 1});
    for (auto& v : impulse) v /= nm.fft_size;

    const auto q_comb = floor_to_q15(comb);
    const auto q_interp = floor_to_q15(interp);
    const auto q_impulse = floor_to_q15(impulse);
    rec.srs_chF.insert(rec.srs_chF.end(), q_comb.begin(), q_comb.end());
    rec.srs_chF_lin_interp.insert(rec.srs_chF_lin_interp.end(), q_interp.begin(),
                                  q_interp.end());
    rec.srs_chT.insert(rec.srs_chT.end(), q_impulse.begin(), q_impulse.end());
    for (const auto& loc : noise_res) rec.noise.push_back(snap.rx_grid.at(loc));
  }

  auto& m = rec.meta;
  m["fft_size"] = std::to_string(nm.fft_size);
  m["scs_hz"] = fmt(nm.scs_hz);
  m["sampling_rate_hz"] = fmt(nm.sampling_rate_hz);
  m["cp_len"] = std::to_string(nm.cp_len);
  m["occupied_subcarriers"] = std::to_string(nm.occupied_subcarriers);
  m["srs_start_re"] = std::to_string(sc.srs.start_re);
  m["srs_comb_size"] = std::to_string(sc.srs.comb_size);
  m["srs_num_subcarriers"] = std::to_string(sc.srs.num_subcarriers);
  m["num_snapshots"] = std::to_string(snapshots.size());
  m["seed"] = std::to_string(sc.seed);
  m["snr_db"] = fmt(sc.snr_db);
  m["distance_m"] = fmt(sc.distance_m);
  m["tx_gain_db"] = fmt(tx_gain_db);
  m["amplitude"] = std::to_string(sc.amp.linear());
  m["bias_samples"] = fmt(sc.bias_samples);
  m["rx_scale"] = fmt(receiver_scale(sc));
  m["ground_truth_delay_samples"] =
      fmt(snapshots.empty() ? 0.0 : snapshots.front().ground_truth_delay_samples);
  return rec;
}

}  // namespace nrpos
