// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Signed Q1.15 baseband samples.
//
// A Q15 component v represents the real value v / 2^15 in [-1, 1). Complex
// samples are stored as interleaved I/Q pairs, I first, each component a
// little-endian two's complement int16 when serialized:
//
//   I0 Q0 I1 Q1 ... I(K-1) Q(K-1)
//
// Conversions from floating point use floor (toward -inf). Nothing in this
// module saturates: out-of-range values raise Errc::kRange.

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nrpos {

inline constexpr std::int32_t kQ15One = 1 << 15;  // A_max, full scale
inline constexpr std::int32_t kQ15Max = kQ15One - 1;
inline constexpr std::int32_t kQ15Min = -kQ15One;

struct SampleQ15 {
  std::int16_t i = 0;
  std::int16_t q = 0;

  friend bool operator==(const SampleQ15&, const SampleQ15&) = default;
};

using IqBufferQ15 = std::vector<SampleQ15>;

// floor(x * 2^15). Throws Errc::kRange unless -1 <= x < 1.
std::int16_t float_to_q15(double x);

constexpr double q15_to_float(std::int16_t v) noexcept {
  return static_cast<double>(v) / kQ15One;
}

// Linear amplitude A in full-scale units, 0 < A <= 2^15, paired with its
// dBFS value 20*log10(A / 2^15).
class Amplitude {
 public:
  // Throws Errc::kRange for a outside (0, 32768].
  explicit Amplitude(std::int32_t a);

  static Amplitude full_scale() { return Amplitude(kQ15One); }
  // Nearest integer amplitude for a dBFS level, rounding half up.
  static Amplitude from_dbfs(double dbfs);

  std::int32_t linear() const noexcept { return a_; }
  double dbfs() const noexcept;

  friend bool operator==(const Amplitude&, const Amplitude&) = default;

 private:
  std::int32_t a_;
};

// floor(A * x / 2^15), 32-bit intermediate. |result| <= A.
std::int16_t rescale(std::int16_t x, Amplitude amp) noexcept;
SampleQ15 rescale(SampleQ15 s, Amplitude amp) noexcept;

// 20*log10(a / 2^15). Throws Errc::kDomain for a <= 0.
double amplitude_to_dbfs(std::int64_t a);

// round(2^15 * 10^(dbfs/20)). Throws Errc::kDomain for dbfs > 0 or when the
// level rounds to zero amplitude.
std::int32_t dbfs_to_amplitude(double dbfs);

// Number of magnitude bits an amplitude occupies: floor(log2(a)).
// 519 -> 9 (USRP B210 profile), 8231 -> 13 (O-RAN 7.2 RU profile).
int effective_bits(std::int32_t a);

// Quantize a complex value (component-wise floor). Components equal to +1
// up to rounding (unit-modulus symbols such as 1+0j) map to 32767, anything
// further out is a range error.
SampleQ15 quantize(std::complex<double> z);

// Round-to-nearest quantization for transform outputs that are already in
// Q15 integer units. Throws Errc::kRange if a component leaves int16.
SampleQ15 round_to_q15(std::complex<double> z);

inline std::complex<double> to_complex(SampleQ15 s) noexcept {
  return {static_cast<double>(s.i), static_cast<double>(s.q)};
}

std::vector<std::complex<double>> to_complex(std::span<const SampleQ15> s);

// Component-wise floor of values already expressed in Q15 integer units.
IqBufferQ15 floor_to_q15(std::span<const std::complex<double>> z);

// Little-endian interleaved serialization.
std::vector<std::uint8_t> serialize_iq(std::span<const SampleQ15> samples);
// Throws Errc::kTruncated when the byte count is not a multiple of 4.
IqBufferQ15 deserialize_iq(std::span<const std::uint8_t> bytes);

}  // namespace nrpos
