// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/chanest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nrpos/error.hpp"

namespace nrpos {
namespace {

constexpr double kMinRefModulus = 1e-12;

int wrap(int n, int size) {
  const int r = n % size;
  return r < 0 ? r + size : r;
}

// |sum_b F[b] exp(j 2 pi f_b t / K)|^2 over the nonzero bins of the
// impulse's spectrum: the band-limited interpolant of |h(t)|^2.
class BandLimitedPower {
 public:
  explicit BandLimitedPower(std::span<const Cplx> impulse)
      : size_(static_cast<int>(impulse.size())) {
    const auto spectrum = fft(impulse);
    double peak = 0.0;
    for (const auto& v : spectrum) peak = std::max(peak, std::abs(v));
    for (int b = 0; b < size_; ++b) {
      if (std::abs(spectrum[b]) > 1e-12 * peak) {
        const int f = b < size_ / 2 ? b : b - size_;
        bins_.push_back({f, spectrum[b]});
      }
    }
  }

  double operator()(double t) const {
    Cplx acc{};
    const double w = 2.0 * std::numbers::pi * t / size_;
    for (const auto& [f, v] : bins_) {
      acc += v * Cplx(std::cos(w * f), std::sin(w * f));
    }
    return std::norm(acc);
  }

 private:
  struct Bin {
    int f;
    Cplx value;
  };
  int size_;
  std::vector<Bin> bins_;
};

double parabolic_offset(double left, double center, double right) {
  const double denom = left - 2.0 * center + right;
  if (!(std::abs(denom) > 0.0)) return 0.0;
  return 0.5 * (left - right) / denom;
}

double refine(std::span<const Cplx> impulse, int peak,
              PeakRefinement refinement) {
  const int size = static_cast<int>(impulse.size());
  if (size < 3) return 0.0;
  double left = std::norm(impulse[wrap(peak - 1, size)]);
  double center = std::norm(impulse[peak]);
  double right = std::norm(impulse[wrap(peak + 1, size)]);
  double offset = 0.0;
  switch (refinement) {
    case PeakRefinement::kParabolicPower:
      offset = parabolic_offset(left, center, right);
      break;
    case PeakRefinement::kParabolicLog: {
      const double tiny = center * 1e-30 + 1e-300;
      offset = parabolic_offset(std::log(left + tiny), std::log(center),
                                std::log(right + tiny));
      break;
    }
    case PeakRefinement::kBandLimited: {
      // Golden-section search for the interpolant's maximum within half a
      // sample of the discrete peak.
      const BandLimitedPower power(impulse);
      const double g = (std::sqrt(5.0) - 1.0) / 2.0;
      double lo = -0.5;
      double hi = 0.5;
      double m1 = hi - g * (hi - lo);
      double m2 = lo + g * (hi - lo);
      double f1 = power(peak + m1);
      double f2 = power(peak + m2);
      for (int it = 0; it < 48; ++it) {
        if (f1 > f2) {
          hi = m2;
          m2 = m1;
          f2 = f1;
          m1 = hi - g * (hi - lo);
          f1 = power(peak + m1);
        } else {
          lo = m1;
          m1 = m2;
          f1 = f2;
          m2 = lo + g * (hi - lo);
          f2 = power(peak + m2);
        }
      }
      offset = 0.5 * (lo + hi);
      break;
    }
  }
  constexpr double kEdge = 0.5 - 1e-9;
  return std::clamp(offset, -kEdge, kEdge);
}

}  // namespace

std::vector<Cplx> ls_estimate(const ResourceGrid& rx,
                              const ReferenceSignal& ref) {
  if (ref.symbols.size() != ref.re_indices.size()) {
    throw Error(Errc::kShape, "reference signal symbol/RE count mismatch");
  }
  std::vector<Cplx> out;
  out.reserve(ref.symbols.size());
  for (std::size_t n = 0; n < ref.symbols.size(); ++n) {
    const Cplx x = ref.symbols[n];
    const double mod2 = std::norm(x);
    if (!(mod2 > kMinRefModulus)) {
      throw Error(Errc::kDomain, "reference symbol " + std::to_string(n) +
                                     " has zero modulus");
    }
    // Unit-modulus reference: y / x == y * conj(x).
    out.push_back(to_complex(rx.at(ref.re_indices[n])) * std::conj(x) / mod2);
  }
  return out;
}

std::vector<Cplx> interpolate_linear(std::span<const Cplx> comb,
                                     int comb_size) {
  if (comb.size() < 2) {
    throw Error(Errc::kLength, "interpolation needs at least two comb points");
  }
  if (comb_size < 1) throw Error(Errc::kConfig, "comb_size must be >= 1");
  std::vector<Cplx> out;
  out.reserve(comb_size * (comb.size() - 1) + 1);
  for (std::size_t n = 0; n + 1 < comb.size(); ++n) {
    out.push_back(comb[n]);
    for (int j = 1; j < comb_size; ++j) {
      const double a = static_cast<double>(j) / comb_size;
      out.push_back((1.0 - a) * comb[n] + a * comb[n + 1]);
    }
  }
  out.push_back(comb.back());
  return out;
}

std::vector<Cplx> impulse_response(std::span<const Cplx> freq, int fft_size,
                                   BandPlacement placement) {
  if (fft_size <= 0 || freq.size() > static_cast<std::size_t>(fft_size)) {
    throw Error(Errc::kLength, "band of " + std::to_string(freq.size()) +
                                   " values exceeds fft_size " +
                                   std::to_string(fft_size));
  }
  std::vector<Cplx> bins(fft_size);
  for (std::size_t n = 0; n < freq.size(); ++n) {
    const int sc = placement.first_subcarrier +
                   static_cast<int>(n) * placement.spacing;
    bins[fft_bin(wrap(sc, fft_size), fft_size)] += freq[n];
  }
  return ifft(bins, 1.0);
}

ToaResult detect_toa(std::span<const Cplx> impulse, const PowerReport& noise,
                     const NumerologyConfig& numerology,
                     const ToaOptions& options) {
  if (impulse.empty()) throw Error(Errc::kNoPeak, "empty impulse response");
  if (!(noise.p_linear > 0.0)) {
    throw Error(Errc::kDomain, "detect_toa needs positive noise power");
  }
  const int size = static_cast<int>(impulse.size());
  const int begin = std::clamp(options.window_begin, 0, size);
  const int end = std::clamp(
      options.window_end < 0 ? numerology.cp_len : options.window_end, begin,
      size);
  const double threshold = std::pow(10.0, options.threshold_db / 10.0);

  int peak = -1;
  double peak_power = 0.0;
  for (int n = begin; n < end; ++n) {
    const double p = std::norm(impulse[n]);
    if (p > peak_power) {
      peak_power = p;
      peak = n;
    }
  }
  if (peak < 0) {
    throw Error(Errc::kNoPeak, "impulse response has no energy in window [" +
                                   std::to_string(begin) + ", " +
                                   std::to_string(end) + ")");
  }
  if (options.mode == PeakMode::kFirstAboveThreshold) {
    for (int n = begin; n < end; ++n) {
      const double p = std::norm(impulse[n]);
      if (p / noise.p_linear >= threshold) {
        // Climb to the local maximum of this arrival.
        while (n + 1 < end && std::norm(impulse[n + 1]) > std::norm(impulse[n])) {
          ++n;
        }
        peak = n;
        peak_power = std::norm(impulse[n]);
        break;
      }
    }
  }

  ToaResult result;
  result.peak_index = peak;
  result.frac_offset = refine(impulse, peak, options.refinement);
  result.toa_seconds = result.delay_samples() / numerology.sampling_rate_hz;
  result.peak_to_noise_db = 10.0 * std::log10(peak_power / noise.p_linear);
  result.reliable = result.peak_to_noise_db >= options.threshold_db;
  return result;
}

PrachDetection detect_prach(std::span<const SampleQ15> rx,
                            const PrachConfig& cfg,
                            const PrachDetectorOptions& options) {
  const int len = cfg.sequence_length();
  const int cp = cfg.effective_cp_len();
  if (rx.size() < static_cast<std::size_t>(cp + len)) {
    throw Error(Errc::kLength, "PRACH detection needs " +
                                   std::to_string(cp + len) + " samples, got " +
                                   std::to_string(rx.size()));
  }
  std::vector<Cplx> window(len);
  for (int n = 0; n < len; ++n) window[n] = to_complex(rx[cp + n]);

  const auto base = generate_zadoff_chu(cfg.zc_root, len, 0);
  const auto w = fft(window);
  const auto x = fft(base);
  std::vector<Cplx> prod(len);
  for (int k = 0; k < len; ++k) prod[k] = w[k] * std::conj(x[k]);
  // corr[m] = sum_n window[n] conj(base[(n - m) mod L]); a preamble with
  // shift C_v delayed by d peaks at m = (d - C_v) mod L.
  const auto corr = ifft(prod, 1.0 / len);

  double mean = 0.0;
  for (const auto& c : corr) mean += std::norm(c);
  mean /= len;

  const int zone = cfg.effective_zone_width();
  PrachDetection best;
  double best_power = -1.0;
  for (int v = 0; v < cfg.num_preambles(); ++v) {
    for (int d = 0; d < zone; ++d) {
      const double p = std::norm(corr[wrap(d - v * zone, len)]);
      if (p > best_power) {
        best_power = p;
        best.preamble_id = v;
        best.timing_samples = d;
      }
    }
  }
  if (!(mean > 0.0) || !(best_power > 0.0)) {
    throw Error(Errc::kNotDetected, "no PRACH energy in window");
  }
  best.peak_metric_db = 10.0 * std::log10(best_power / mean);
  if (best.peak_metric_db < options.threshold_db) {
    throw Error(Errc::kNotDetected,
                "PRACH peak " + std::to_string(best.peak_metric_db) +
                    " dB below threshold " +
                    std::to_string(options.threshold_db) + " dB");
  }
  return best;
}

std::vector<Cplx> combine_coherent(
    std::span<const std::vector<Cplx>> estimates) {
  if (estimates.empty()) {
    throw Error(Errc::kShape, "combine_coherent needs at least one estimate");
  }
  const std::size_t len = estimates.front().size();
  std::vector<Cplx> out(len);
  for (const auto& e : estimates) {
    if (e.size() != len) {
      throw Error(Errc::kShape, "estimate lengths differ: " +
                                    std::to_string(e.size()) + " vs " +
                                    std::to_string(len));
    }
    for (std::size_t n = 0; n < len; ++n) out[n] += e[n];
  }
  const double scale = 1.0 / static_cast<double>(estimates.size());
  for (auto& v : out) v *= scale;
  return out;
}

double rtt_to_range(double rtt_seconds) {
  if (!(rtt_seconds >= 0.0)) {
    throw Error(Errc::kDomain, "negative round trip time");
  }
  return kSpeedOfLight * rtt_seconds / 2.0;
}

ChannelEstimate build_channel_estimate(std::span<const Cplx> comb,
                                       const PowerReport& noise_per_re,
                                       const CombLayout& layout,
                                       ImpulseSource source) {
  ChannelEstimate est;
  est.freq_comb.assign(comb.begin(), comb.end());
  est.freq_interp = interpolate_linear(comb, layout.comb_size);
  est.noise_ref = noise_per_re;
  if (source == ImpulseSource::kComb) {
    est.impulse = impulse_response(est.freq_comb, layout.fft_size,
                                   {layout.first_subcarrier, layout.comb_size});
    est.noise_gain = static_cast<double>(comb.size());
  } else {
    est.impulse = impulse_response(est.freq_interp, layout.fft_size,
                                   {layout.first_subcarrier, 1});
    // Comb point i reaches the band through a triangle of weights w_m, and
    // contributes |sum_m w_m e^{j w m}|^2 to the noise at time lag w. That
    // is largest at w = 0, where it is (sum_m w_m)^2. Edge points lose the
    // outer half of their triangle.
    const int c = layout.comb_size;
    double edge = 0.0;
    for (int m = 0; m < c; ++m) edge += 1.0 - static_cast<double>(m) / c;
    const double n = static_cast<double>(comb.size());
    est.noise_gain = (n - 2.0) * c * c + 2.0 * edge * edge;
  }
  return est;
}

RangeEstimate estimate_range(const ChannelEstimate& est,
                             const NumerologyConfig& numerology,
                             const ToaOptions& options, double bias_samples) {
  RangeEstimate out;
  out.toa = detect_toa(est.impulse, est.impulse_noise(), numerology, options);
  const double rtt =
      (out.toa.delay_samples() - bias_samples) / numerology.sampling_rate_hz;
  out.range_m = rtt >= 0.0 ? rtt_to_range(rtt) : -rtt_to_range(-rtt);
  return out;
}

}  // namespace nrpos
