// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/fixedpoint.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nrpos/error.hpp"

namespace nrpos {
namespace {

TEST(FloatToQ15, Examples) {
  EXPECT_EQ(float_to_q15(0.5), 16384);
  EXPECT_EQ(float_to_q15(-1.0), -32768);
  EXPECT_EQ(float_to_q15(0.1), 3276);
  // Floor, not round-to-nearest.
  EXPECT_EQ(float_to_q15(-0.1), -3277);
  EXPECT_EQ(float_to_q15(std::nextafter(1.0, 0.0)), 32767);
}

TEST(FloatToQ15, RejectsUnnormalizedInput) {
  for (double bad : {1.0, 1.5, -1.0000001, std::nan("")}) {
    try {
      float_to_q15(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kRange);
    }
  }
}

TEST(Q15ToFloat, Examples) {
  EXPECT_EQ(q15_to_float(16384), 0.5);
  EXPECT_EQ(q15_to_float(-32768), -1.0);
  EXPECT_EQ(q15_to_float(3276), 0.0999755859375);
}

TEST(Q15, ExhaustiveRoundTrip) {
  for (int v = kQ15Min; v <= kQ15Max; ++v) {
    ASSERT_EQ(float_to_q15(q15_to_float(static_cast<std::int16_t>(v))), v);
  }
}

TEST(Q15, QuantizationBound) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int n = 0; n < 100000; ++n) {
    const double x = dist(rng);
    const double err = q15_to_float(float_to_q15(x)) - x;
    ASSERT_LE(err, 0.0);  // floor never rounds up
    ASSERT_GT(err, -1.0 / 32768);
  }
}

TEST(Rescale, Examples) {
  EXPECT_EQ(rescale(32767, Amplitude(519)), 518);
  EXPECT_EQ(rescale(0, Amplitude(8231)), 0);
  EXPECT_EQ(rescale(-32768, Amplitude(32768)), -32768);
  EXPECT_EQ(rescale(-1, Amplitude(519)), -1);
}

TEST(Rescale, MonotoneAndBounded) {
  for (int a : {1, 519, 8231, 32768}) {
    const Amplitude amp(a);
    int prev = rescale(static_cast<std::int16_t>(kQ15Min), amp);
    for (int x = kQ15Min; x <= kQ15Max; ++x) {
      const int r = rescale(static_cast<std::int16_t>(x), amp);
      ASSERT_LE(prev, r);
      ASSERT_LE(std::abs(r), a);
      prev = r;
    }
  }
}

TEST(Dbfs, DeviceTable) {
  EXPECT_NEAR(amplitude_to_dbfs(519), -36.0, 0.1);
  EXPECT_NEAR(amplitude_to_dbfs(8231), -12.0, 0.1);
  EXPECT_EQ(amplitude_to_dbfs(32768), 0.0);
  EXPECT_EQ(dbfs_to_amplitude(-36.0), 519);
  EXPECT_EQ(dbfs_to_amplitude(-12.0), 8231);
  EXPECT_EQ(dbfs_to_amplitude(0.0), 32768);
  EXPECT_EQ(effective_bits(519), 9);
  EXPECT_EQ(effective_bits(8231), 13);
}

TEST(Dbfs, DomainErrors) {
  EXPECT_THROW(amplitude_to_dbfs(0), Error);
  EXPECT_THROW(amplitude_to_dbfs(-5), Error);
  EXPECT_THROW(dbfs_to_amplitude(0.5), Error);
  EXPECT_THROW(dbfs_to_amplitude(-200.0), Error);
  EXPECT_THROW(Amplitude(0), Error);
  EXPECT_THROW(Amplitude(32769), Error);
}

TEST(Dbfs, InversionIsExactOnIntegers) {
  for (int a = 1; a <= kQ15One; ++a) {
    ASSERT_EQ(dbfs_to_amplitude(amplitude_to_dbfs(a)), a) << a;
  }
}

TEST(Dbfs, AmplitudeApproximatesLevel) {
  for (double db = -36.0; db <= 0.0; db += 0.37) {
    EXPECT_NEAR(amplitude_to_dbfs(dbfs_to_amplitude(db)), db, 0.02) << db;
  }
}

TEST(Quantize, UnitModulusEdge) {
  EXPECT_EQ(quantize({1.0, 0.0}), (SampleQ15{32767, 0}));
  EXPECT_EQ(quantize({-1.0, 1.0 + 1e-12}), (SampleQ15{-32768, 32767}));
  EXPECT_THROW(quantize({1.01, 0.0}), Error);
}

TEST(Serialize, LayoutIsLittleEndianInterleaved) {
  const IqBufferQ15 s{{1, -1}, {0x1234, -32768}};
  const auto bytes = serialize_iq(s);
  const std::vector<std::uint8_t> expected{0x01, 0x00, 0xff, 0xff,
                                           0x34, 0x12, 0x00, 0x80};
  EXPECT_EQ(bytes, expected);
  EXPECT_EQ(deserialize_iq(bytes), s);
}

TEST(Serialize, RandomRoundTripAndTruncation) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> dist(kQ15Min, kQ15Max);
  IqBufferQ15 s(257);
  for (auto& v : s) {
    v = {static_cast<std::int16_t>(dist(rng)), static_cast<std::int16_t>(dist(rng))};
  }
  auto bytes = serialize_iq(s);
  EXPECT_EQ(deserialize_iq(bytes), s);
  bytes.pop_back();
  try {
    deserialize_iq(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTruncated);
  }
}

}  // namespace
}  // namespace nrpos
