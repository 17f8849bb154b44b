// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Comb least-squares channel estimation and time-of-arrival ranging.
//
//   rx grid --ls_estimate--> comb estimates --interpolate_linear-->
//   full-band estimates --impulse_response--> impulse --detect_toa-->
//   ToA --rtt_to_range--> meters
//
// Impulse responses use the unnormalized inverse DFT, so a flat band of ones
// peaks at the band width and per-RE noise power P_n shows up in every
// impulse sample as P_n times the band's noise gain (see ChannelEstimate).

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nrpos/fft.hpp"
#include "nrpos/fixedpoint.hpp"
#include "nrpos/metrics.hpp"
#include "nrpos/numerology.hpp"
#include "nrpos/ofdm.hpp"
#include "nrpos/refsig.hpp"

namespace nrpos {

inline constexpr double kSpeedOfLight = 299792458.0;

// h[k] = y[k] * conj(x[k]) over the reference REs, in the grid's Q15 units.
// Throws Errc::kDomain if a reference symbol has (near) zero modulus.
std::vector<Cplx> ls_estimate(const ResourceGrid& rx,
                              const ReferenceSignal& ref);

// Output length comb_size * (len - 1) + 1; comb points preserved exactly.
// Throws Errc::kLength for fewer than two points.
std::vector<Cplx> interpolate_linear(std::span<const Cplx> comb,
                                     int comb_size);

// Where a frequency-domain band sits on the grid: value n belongs to logical
// subcarrier first_subcarrier + n * spacing.
struct BandPlacement {
  int first_subcarrier = 0;
  int spacing = 1;
};

// Unnormalized inverse DFT of the band placed at its true FFT bins; length
// fft_size.
std::vector<Cplx> impulse_response(std::span<const Cplx> freq, int fft_size,
                                   BandPlacement placement);

enum class PeakRefinement {
  kParabolicPower,  // 3-point parabola on |h|^2
  kParabolicLog,    // 3-point parabola on log|h|^2
  kBandLimited,     // maximize the band-limited interpolant of h
};

enum class PeakMode {
  kStrongest,            // argmax over the search window
  kFirstAboveThreshold,  // earliest local maximum above the threshold
};

struct ToaOptions {
  int window_begin = 0;
  int window_end = -1;  // exclusive; -1 means cp_len
  double threshold_db = 10.0;
  PeakRefinement refinement = PeakRefinement::kParabolicLog;
  PeakMode mode = PeakMode::kStrongest;
};

struct ToaResult {
  int peak_index = 0;
  double frac_offset = 0.0;  // in (-0.5, 0.5)
  double toa_seconds = 0.0;
  double peak_to_noise_db = 0.0;
  bool reliable = false;

  double delay_samples() const noexcept { return peak_index + frac_offset; }
};

// noise is the expected noise power per impulse sample (see
// ChannelEstimate::impulse_noise). Throws Errc::kNoPeak when the window
// holds no energy and Errc::kDomain for non-positive noise.
ToaResult detect_toa(std::span<const Cplx> impulse, const PowerReport& noise,
                     const NumerologyConfig& numerology,
                     const ToaOptions& options = {});

struct PrachDetection {
  int preamble_id = 0;
  int timing_samples = 0;
  double peak_metric_db = 0.0;  // peak over mean correlation power
};

struct PrachDetectorOptions {
  double threshold_db = 15.0;
};

// Cyclic correlation of the preamble window against the configured root,
// searched zone by zone. Throws Errc::kLength when rx is shorter than one
// preamble and Errc::kNotDetected below threshold.
PrachDetection detect_prach(std::span<const SampleQ15> rx,
                            const PrachConfig& cfg,
                            const PrachDetectorOptions& options = {});

// Element-wise mean. Throws Errc::kShape on empty input or length mismatch.
std::vector<Cplx> combine_coherent(std::span<const std::vector<Cplx>> estimates);

// c * rtt / 2. Throws Errc::kDomain for negative RTT.
double rtt_to_range(double rtt_seconds);

enum class ImpulseSource { kInterpolated, kComb };

struct ChannelEstimate {
  std::vector<Cplx> freq_comb;
  std::vector<Cplx> freq_interp;
  std::vector<Cplx> impulse;
  PowerReport noise_ref;     // per-RE noise power
  double noise_gain = 0.0;   // peak ratio of impulse-sample noise power to
                             // per-RE noise power (reached at lag 0)

  PowerReport impulse_noise() const {
    return {noise_ref.p_linear * noise_gain, noise_ref.n_res, 0};
  }
};

struct CombLayout {
  int first_subcarrier = 0;
  int comb_size = 2;
  int fft_size = 1536;
};

ChannelEstimate build_channel_estimate(std::span<const Cplx> comb,
                                       const PowerReport& noise_per_re,
                                       const CombLayout& layout,
                                       ImpulseSource source);

struct RangeEstimate {
  ToaResult toa;
  double range_m = 0.0;
};

// detect_toa on the estimate's impulse followed by rtt_to_range; bias_samples
// is subtracted first (fixed front-end group delay).
RangeEstimate estimate_range(const ChannelEstimate& est,
                             const NumerologyConfig& numerology,
                             const ToaOptions& options,
                             double bias_samples = 0.0);

}  // namespace nrpos
