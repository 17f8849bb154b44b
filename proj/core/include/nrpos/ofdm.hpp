// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Resource grids and OFDM (de)modulation.
//
// Grids are indexed by logical subcarrier, DC at fft_size/2. The inverse
// transform carries the 1/K normalization and the forward transform none, so
// modulate() of any grid whose REs fit in Q15 stays inside Q15 (up to a
// sqrt(2) factor on pathological all-aligned grids, which is reported as a
// range error rather than clipped). Time samples are rounded to nearest.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nrpos/fft.hpp"
#include "nrpos/fixedpoint.hpp"
#include "nrpos/numerology.hpp"
#include "nrpos/refsig.hpp"

namespace nrpos {

class ResourceGrid {
 public:
  ResourceGrid() = default;
  ResourceGrid(int num_symbols, int width);

  int num_symbols() const noexcept { return num_symbols_; }
  int width() const noexcept { return width_; }

  SampleQ15& at(int symbol, int subcarrier);
  const SampleQ15& at(int symbol, int subcarrier) const;
  SampleQ15& at(ReLocation loc) { return at(loc.symbol, loc.subcarrier); }
  const SampleQ15& at(ReLocation loc) const {
    return at(loc.symbol, loc.subcarrier);
  }

  std::span<SampleQ15> symbol(int l);
  std::span<const SampleQ15> symbol(int l) const;
  std::span<const SampleQ15> cells() const noexcept { return cells_; }

  friend bool operator==(const ResourceGrid&, const ResourceGrid&) = default;

 private:
  int num_symbols_ = 0;
  int width_ = 0;
  std::vector<SampleQ15> cells_;
};

// Quantizes each symbol (floor to Q15, then rescale by amp) onto its RE.
// Throws Errc::kConfig for REs outside the occupied band or grid and
// Errc::kMappingConflict when an RE is already nonzero.
ResourceGrid grid_map(ResourceGrid grid, const ReferenceSignal& sig,
                      Amplitude amp, const NumerologyConfig& numerology = {});

// Per symbol: 1/K inverse DFT, cyclic prefix of cp_len samples prepended.
IqBufferQ15 modulate(const ResourceGrid& grid,
                     const NumerologyConfig& numerology = {});

// Strips the CP and applies the unnormalized forward DFT per symbol.
// Throws Errc::kLength when samples are too short.
ResourceGrid demodulate(std::span<const SampleQ15> samples,
                        const NumerologyConfig& numerology, int num_symbols);

// Floating-point forward DFT of one symbol body, in logical subcarrier order.
std::vector<Cplx> demodulate_symbol(std::span<const Cplx> body);

// txdataF layout: symbol-major, logical subcarrier order, interleaved
// little-endian int16 I/Q.
std::vector<std::uint8_t> serialize_txdataF(const ResourceGrid& grid);
ResourceGrid deserialize_txdataF(std::span<const std::uint8_t> bytes,
                                 int width);

}  // namespace nrpos
