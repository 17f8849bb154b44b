// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Deterministic baseband channel simulator and the SRS round-trip exchange
// used in place of over-the-air measurements.
//
// Randomness comes from a counter-based SplitMix64 stream: draw i of seed s is
// mix(s + (i + 1) * 0x9E3779B97F4A7C15), with mix the SplitMix64 finalizer
// (shift/multiply constants 30/0xBF58476D1CE4E5B9, 27/0x94D049BB133111EB, 31).
// Gaussian variates use Box-Muller on pairs of 53-bit uniforms. Snapshot s of
// a scenario seeded with S draws from seed S ^ s.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "nrpos/dataset.hpp"
#include "nrpos/fft.hpp"
#include "nrpos/fixedpoint.hpp"
#include "nrpos/numerology.hpp"
#include "nrpos/ofdm.hpp"
#include "nrpos/refsig.hpp"

namespace nrpos {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next_u64() noexcept;
  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Standard normal via Box-Muller; caches the second variate.
  double gaussian() noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Half-length of the fractional-delay filter (31 taps, Hann windowed sinc).
inline constexpr int kFractionalDelayHalfTaps = 15;

enum class DelayMode {
  kTimeDomain,  // index shift plus 31-tap windowed-sinc fraction, zero fill
  kCyclic,      // frequency-domain phase ramp, circular over the buffer
};

// Throws Errc::kRange for negative delays or delays beyond the buffer.
std::vector<Cplx> apply_delay(std::span<const Cplx> samples, double delay,
                              DelayMode mode = DelayMode::kTimeDomain);

// Adds i.i.d. circular Gaussian noise of variance
// signal_power / 10^(snr_db / 10) per sample. snr_db = +inf is identity.
// Throws Errc::kDomain for non-positive signal power.
std::vector<Cplx> apply_awgn(std::span<const Cplx> samples, double snr_db,
                             double signal_power, std::uint64_t seed);

struct ChannelTap {
  double delay_samples = 0.0;
  Cplx gain{1.0, 0.0};
};

struct ChannelSpec {
  std::vector<ChannelTap> taps{ChannelTap{}};
  double snr_db = 25.0;
  std::uint64_t seed = 0;
};

// Sum of delayed taps plus AWGN relative to signal_power.
std::vector<Cplx> apply_channel(std::span<const Cplx> samples,
                                const ChannelSpec& spec, double signal_power);

struct RttScenario {
  double distance_m = 10.0;  // 0 runs a loopback
  NumerologyConfig numerology;
  SrsConfig srs;
  double snr_db = 25.0;  // per-RE SNR in the frequency domain
  int num_snapshots = 1;
  std::uint64_t seed = 1;
  Amplitude amp = Amplitude(8231);
  double bias_samples = 0.0;  // fixed front-end group delay
  // Extra paths after the line-of-sight one, delays relative to it.
  std::vector<ChannelTap> multipath;
};

// One simulated slot: symbol 0 carries the SRS, symbol 1 is empty.
inline constexpr int kSrsSymbol = 0;
inline constexpr int kNoiseSymbol = 1;

struct Snapshot {
  ResourceGrid rx_grid;
  double ground_truth_delay_samples = 0.0;
};

// 2 * distance / c in samples at the scenario's sampling rate.
double round_trip_delay_samples(double distance_m,
                                const NumerologyConfig& numerology);

// Digital gain (<= 1) the simulated receiver applies before its FFT so the
// demodulated grid keeps 7 sigma of noise headroom under Q15 full scale.
// Signal and noise scale together; the per-RE SNR is unchanged.
double receiver_scale(const RttScenario& sc);

// Throws Errc::kScenario when the round trip (plus filter support for
// fractional delays) no longer fits inside the cyclic prefix.
std::vector<Snapshot> simulate_rtt_exchange(const RttScenario& sc);

// The SRS as transmitted in the scenario.
ReferenceSignal scenario_srs(const RttScenario& sc);
// Empty-symbol REs at the SRS comb positions, used as the noise reference.
std::vector<ReLocation> scenario_noise_res(const RttScenario& sc);

// Dataset arrays for a run of snapshots: LS comb estimates, their linear
// interpolation, the impulse response (inverse DFT scaled by 1/K) and the
// empty-symbol noise REs, each concatenated over snapshots.
DatasetRecord to_dataset_record(const RttScenario& sc,
                                std::span<const Snapshot> snapshots,
                                double tx_gain_db);

}  // namespace nrpos
