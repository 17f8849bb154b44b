// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/fixedpoint.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "nrpos/error.hpp"

namespace nrpos {
namespace {

// Unit-modulus symbols evaluated in double may land a few ulps above 1.
constexpr double kUnitSlack = 1e-9;

std::int32_t floor_div_q15(std::int32_t num) noexcept {
  // Arithmetic shift is floor division for two's complement in C++20.
  return num >> 15;
}

std::int16_t checked_int16(double v, const char* what) {
  if (!(v >= kQ15Min && v <= kQ15Max)) {
    throw Error(Errc::kRange,
                std::string(what) + ": value " + std::to_string(v) +
                    " outside int16");
  }
  return static_cast<std::int16_t>(v);
}

}  // namespace

std::int16_t float_to_q15(double x) {
  if (!(x >= -1.0 && x < 1.0)) {
    throw Error(Errc::kRange, "float_to_q15: " + std::to_string(x) +
                                  " not in [-1, 1); normalize first");
  }
  return static_cast<std::int16_t>(std::floor(x * kQ15One));
}

Amplitude::Amplitude(std::int32_t a) : a_(a) {
  if (a <= 0 || a > kQ15One) {
    throw Error(Errc::kRange,
                "amplitude " + std::to_string(a) + " not in (0, 32768]");
  }
}

Amplitude Amplitude::from_dbfs(double dbfs) {
  return Amplitude(dbfs_to_amplitude(dbfs));
}

double Amplitude::dbfs() const noexcept {
  return 20.0 * std::log10(static_cast<double>(a_) / kQ15One);
}

std::int16_t rescale(std::int16_t x, Amplitude amp) noexcept {
  // |A * x| <= 2^30, fits comfortably in 32 bits.
  return static_cast<std::int16_t>(
      floor_div_q15(amp.linear() * static_cast<std::int32_t>(x)));
}

SampleQ15 rescale(SampleQ15 s, Amplitude amp) noexcept {
  return {rescale(s.i, amp), rescale(s.q, amp)};
}

double amplitude_to_dbfs(std::int64_t a) {
  if (a <= 0) {
    throw Error(Errc::kDomain,
                "amplitude_to_dbfs: amplitude must be positive, got " +
                    std::to_string(a));
  }
  return 20.0 * std::log10(static_cast<double>(a) / kQ15One);
}

std::int32_t dbfs_to_amplitude(double dbfs) {
  if (!(dbfs <= 0.0)) {
    throw Error(Errc::kDomain, "dbfs_to_amplitude: " + std::to_string(dbfs) +
                                   " dBFS exceeds full scale");
  }
  const double a = std::floor(kQ15One * std::pow(10.0, dbfs / 20.0) + 0.5);
  if (a < 1.0) {
    throw Error(Errc::kDomain, "dbfs_to_amplitude: " + std::to_string(dbfs) +
                                   " dBFS rounds to zero amplitude");
  }
  return static_cast<std::int32_t>(a);
}

int effective_bits(std::int32_t a) {
  if (a <= 0) {
    throw Error(Errc::kDomain, "effective_bits: amplitude must be positive");
  }
  return std::bit_width(static_cast<std::uint32_t>(a)) - 1;
}

SampleQ15 quantize(std::complex<double> z) {
  auto component = [](double v) {
    if (v >= 1.0 && v <= 1.0 + kUnitSlack) return static_cast<std::int16_t>(kQ15Max);
    if (v < -1.0 && v >= -1.0 - kUnitSlack) return static_cast<std::int16_t>(kQ15Min);
    return float_to_q15(v);
  };
  return {component(z.real()), component(z.imag())};
}

SampleQ15 round_to_q15(std::complex<double> z) {
  return {checked_int16(std::floor(z.real() + 0.5), "round_to_q15"),
          checked_int16(std::floor(z.imag() + 0.5), "round_to_q15")};
}

std::vector<std::complex<double>> to_complex(std::span<const SampleQ15> s) {
  std::vector<std::complex<double>> out;
  out.reserve(s.size());
  for (const auto& v : s) out.push_back(to_complex(v));
  return out;
}

IqBufferQ15 floor_to_q15(std::span<const std::complex<double>> z) {
  IqBufferQ15 out;
  out.reserve(z.size());
  for (const auto& v : z) {
    out.push_back({checked_int16(std::floor(v.real()), "floor_to_q15"),
                   checked_int16(std::floor(v.imag()), "floor_to_q15")});
  }
  return out;
}

std::vector<std::uint8_t> serialize_iq(std::span<const SampleQ15> samples) {
  std::vector<std::uint8_t> out;
  out.reserve(samples.size() * 4);
  auto put = [&out](std::int16_t v) {
    const auto u = static_cast<std::uint16_t>(v);
    out.push_back(static_cast<std::uint8_t>(u & 0xff));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
  };
  for (const auto& s : samples) {
    put(s.i);
    put(s.q);
  }
  return out;
}

IqBufferQ15 deserialize_iq(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 4 != 0) {
    throw Error(Errc::kTruncated,
                "IQ buffer of " + std::to_string(bytes.size()) +
                    " bytes is not a whole number of int16 I/Q pairs");
  }
  auto get = [&bytes](std::size_t at) {
    return static_cast<std::int16_t>(static_cast<std::uint16_t>(
        bytes[at] | (static_cast<std::uint16_t>(bytes[at + 1]) << 8)));
  };
  IqBufferQ15 out(bytes.size() / 4);
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = {get(4 * n), get(4 * n + 2)};
  }
  return out;
}

}  // namespace nrpos
