// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Positioning reference signals: SRS (Zadoff-Chu on a comb), PRS (QPSK over a
// length-31 Gold sequence) and PRACH preambles (Zadoff-Chu, long/short
// formats). Sequences are produced in double precision with unit modulus;
// quantization to Q15 happens only when a signal is mapped onto a grid.

#pragma once

#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

#include "nrpos/fixedpoint.hpp"
#include "nrpos/numerology.hpp"

namespace nrpos {

enum class SignalKind { kSrs, kPrs, kPrach };

struct ReferenceSignal {
  SignalKind kind = SignalKind::kSrs;
  std::vector<std::complex<double>> symbols;
  std::vector<ReLocation> re_indices;  // strictly increasing, same size
};

// SRS on a single OFDM symbol. The default occupies 624 REs on every second
// subcarrier (37.44 MHz at 30 kHz), centered in the 1272-RE carrier.
struct SrsConfig {
  int comb_size = 2;
  int num_subcarriers = 624;
  int start_re = 144;
  int zc_root = 1;
  int cyclic_shift = 0;
  int symbol = 0;
};

struct PrsConfig {
  int num_prb = 4;
  int num_symbols = 2;
  std::uint32_t gold_seed = 0;  // 31-bit c_init
  int comb_size = 2;
  int re_offset = 0;   // comb offset of the first symbol
  int start_re = 0;    // first subcarrier of the PRS allocation
  int first_symbol = 0;
};

enum class PrachFormat { kF0, kF1, kF2, kF3, kA1, kA2, kA3, kB1, kB2, kB3 };

struct PrachConfig {
  PrachFormat format = PrachFormat::kF0;
  int zc_root = 1;
  int cyclic_shift = 0;  // C_v applied to the transmitted preamble
  // Width N_cs of each cyclic-shift zone; 0 selects the format default
  // (119 for long formats, 23 for short formats).
  int zone_width = 0;
  // Time-domain cyclic prefix ahead of the preamble; 0 selects zone width.
  int cp_len = 0;
  int start_re = 0;  // first subcarrier when mapped onto a grid
  int symbol = 0;

  int sequence_length() const noexcept;
  int effective_zone_width() const noexcept;
  int effective_cp_len() const noexcept;
  int num_preambles() const noexcept;
};

int prach_sequence_length(PrachFormat format) noexcept;
PrachFormat parse_prach_format(std::string_view name);
std::string_view to_string(PrachFormat format) noexcept;

// z[n] = exp(-j pi u n (n+1) / N), returned as z[(n + shift) mod N].
// Throws Errc::kInvalidRoot if gcd(root, length) != 1 and Errc::kConfig for
// an even length or a shift outside [0, length).
std::vector<std::complex<double>> generate_zadoff_chu(int root, int length,
                                                      int shift);

// Length-31 Gold sequence c(n) = x1(n+1600) ^ x2(n+1600), with x1 seeded
// (1, 0, ..., 0) and x2 seeded from c_init.
std::vector<std::uint8_t> generate_gold31(std::uint32_t c_init,
                                          std::size_t length);

// Largest prime <= n (n >= 2).
int largest_prime_at_most(int n);

ReferenceSignal generate_srs(const SrsConfig& cfg,
                             const NumerologyConfig& numerology = {});
ReferenceSignal generate_prs(const PrsConfig& cfg,
                             const NumerologyConfig& numerology = {});
// Frequency-domain preamble: unit-modulus DFT of the cyclically shifted ZC
// sequence, mapped to consecutive subcarriers from cfg.start_re.
ReferenceSignal generate_prach(const PrachConfig& cfg);

// Time-domain preamble x_{u,v}(n) = z_u((n + C_v) mod L), scaled by amp and
// preceded by its cyclic prefix.
IqBufferQ15 prach_waveform(const PrachConfig& cfg, Amplitude amp);

}  // namespace nrpos
