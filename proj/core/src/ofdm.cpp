// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/ofdm.hpp"

#include <string>

#include "nrpos/error.hpp"
#include "nrpos/fft.hpp"

namespace nrpos {

ResourceGrid::ResourceGrid(int num_symbols, int width)
    : num_symbols_(num_symbols), width_(width) {
  if (num_symbols < 0 || width < 0) {
    throw Error(Errc::kConfig, "grid dimensions must be non-negative");
  }
  cells_.resize(static_cast<std::size_t>(num_symbols) * width);
}

SampleQ15& ResourceGrid::at(int symbol, int subcarrier) {
  return const_cast<SampleQ15&>(std::as_const(*this).at(symbol, subcarrier));
}

const SampleQ15& ResourceGrid::at(int symbol, int subcarrier) const {
  if (symbol < 0 || symbol >= num_symbols_ || subcarrier < 0 ||
      subcarrier >= width_) {
    throw Error(Errc::kRange, "RE (" + std::to_string(symbol) + ", " +
                                  std::to_string(subcarrier) +
                                  ") outside grid");
  }
  return cells_[static_cast<std::size_t>(symbol) * width_ + subcarrier];
}

std::span<SampleQ15> ResourceGrid::symbol(int l) {
  return {&at(l, 0), static_cast<std::size_t>(width_)};
}

std::span<const SampleQ15> ResourceGrid::symbol(int l) const {
  return {&at(l, 0), static_cast<std::size_t>(width_)};
}

ResourceGrid grid_map(ResourceGrid grid, const ReferenceSignal& sig,
                      Amplitude amp, const NumerologyConfig& numerology) {
  if (sig.symbols.size() != sig.re_indices.size()) {
    throw Error(Errc::kShape, "reference signal symbol/RE count mismatch");
  }
  for (std::size_t n = 0; n < sig.symbols.size(); ++n) {
    const auto loc = sig.re_indices[n];
    if (!numerology.is_occupied(loc.subcarrier) || loc.symbol < 0 ||
        loc.symbol >= grid.num_symbols() || loc.subcarrier >= grid.width()) {
      throw Error(Errc::kConfig, "RE (" + std::to_string(loc.symbol) + ", " +
                                     std::to_string(loc.subcarrier) +
                                     ") outside the occupied grid");
    }
    auto& cell = grid.at(loc);
    if (cell != SampleQ15{}) {
      throw Error(Errc::kMappingConflict,
                  "RE (" + std::to_string(loc.symbol) + ", " +
                      std::to_string(loc.subcarrier) + ") already mapped");
    }
    cell = rescale(quantize(sig.symbols[n]), amp);
  }
  return grid;
}

IqBufferQ15 modulate(const ResourceGrid& grid,
                     const NumerologyConfig& numerology) {
  const int k = numerology.fft_size;
  const int cp = numerology.cp_len;
  if (grid.width() != k) {
    throw Error(Errc::kShape, "grid width " + std::to_string(grid.width()) +
                                  " != fft_size " + std::to_string(k));
  }
  IqBufferQ15 out;
  out.reserve(static_cast<std::size_t>(grid.num_symbols()) * (k + cp));
  std::vector<Cplx> bins(k);
  for (int l = 0; l < grid.num_symbols(); ++l) {
    const auto row = grid.symbol(l);
    for (int sc = 0; sc < k; ++sc) bins[fft_bin(sc, k)] = to_complex(row[sc]);
    const auto time = ifft(bins, 1.0 / k);
    for (int n = k - cp; n < k; ++n) out.push_back(round_to_q15(time[n]));
    for (int n = 0; n < k; ++n) out.push_back(round_to_q15(time[n]));
  }
  return out;
}

std::vector<Cplx> demodulate_symbol(std::span<const Cplx> body) {
  const int k = static_cast<int>(body.size());
  const auto bins = fft(body);
  std::vector<Cplx> out(k);
  for (int b = 0; b < k; ++b) out[subcarrier_of_bin(b, k)] = bins[b];
  return out;
}

ResourceGrid demodulate(std::span<const SampleQ15> samples,
                        const NumerologyConfig& numerology, int num_symbols) {
  const int k = numerology.fft_size;
  const int len = numerology.symbol_length();
  if (num_symbols < 0 ||
      samples.size() < static_cast<std::size_t>(num_symbols) * len) {
    throw Error(Errc::kLength,
                "demodulate: " + std::to_string(samples.size()) +
                    " samples for " + std::to_string(num_symbols) +
                    " symbols of " + std::to_string(len));
  }
  ResourceGrid grid(num_symbols, k);
  std::vector<Cplx> body(k);
  for (int l = 0; l < num_symbols; ++l) {
    const auto* start = samples.data() + static_cast<std::size_t>(l) * len +
                        numerology.cp_len;
    for (int n = 0; n < k; ++n) body[n] = to_complex(start[n]);
    const auto freq = demodulate_symbol(body);
    auto row = grid.symbol(l);
    for (int sc = 0; sc < k; ++sc) row[sc] = round_to_q15(freq[sc]);
  }
  return grid;
}

std::vector<std::uint8_t> serialize_txdataF(const ResourceGrid& grid) {
  return serialize_iq(grid.cells());
}

ResourceGrid deserialize_txdataF(std::span<const std::uint8_t> bytes,
                                 int width) {
  const auto samples = deserialize_iq(bytes);
  if (width <= 0 || samples.size() % width != 0) {
    throw Error(Errc::kLength, "txdataF holds " +
                                   std::to_string(samples.size()) +
                                   " REs, not a multiple of width " +
                                   std::to_string(width));
  }
  ResourceGrid grid(static_cast<int>(samples.size() / width), width);
  for (int l = 0; l < grid.num_symbols(); ++l) {
    auto row = grid.symbol(l);
    std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(l) * width,
                width, row.begin());
  }
  return grid;
}

}  // namespace nrpos
