// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/refsig.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "nrpos/error.hpp"
#include "nrpos/fft.hpp"

namespace nrpos {
namespace {

constexpr int kGoldOffset = 1600;

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

void check_band(const std::vector<ReLocation>& locs,
                const NumerologyConfig& numerology, const char* what) {
  for (const auto& loc : locs) {
    if (!numerology.is_occupied(loc.subcarrier)) {
      throw Error(Errc::kConfig,
                  std::string(what) + ": subcarrier " +
                      std::to_string(loc.subcarrier) +
                      " falls outside the occupied band");
    }
  }
}

}  // namespace

int prach_sequence_length(PrachFormat format) noexcept {
  switch (format) {
    case PrachFormat::kF0:
    case PrachFormat::kF1:
    case PrachFormat::kF2:
    case PrachFormat::kF3:
      return 839;
    default:
      return 139;
  }
}

int PrachConfig::sequence_length() const noexcept {
  return prach_sequence_length(format);
}

int PrachConfig::effective_zone_width() const noexcept {
  if (zone_width > 0) return zone_width;
  return sequence_length() == 839 ? 119 : 23;
}

int PrachConfig::effective_cp_len() const noexcept {
  return cp_len > 0 ? cp_len : effective_zone_width();
}

int PrachConfig::num_preambles() const noexcept {
  return sequence_length() / effective_zone_width();
}

PrachFormat parse_prach_format(std::string_view name) {
  static constexpr std::pair<std::string_view, PrachFormat> kNames[] = {
      {"0", PrachFormat::kF0},   {"1", PrachFormat::kF1},
      {"2", PrachFormat::kF2},   {"3", PrachFormat::kF3},
      {"F0", PrachFormat::kF0},  {"F1", PrachFormat::kF1},
      {"F2", PrachFormat::kF2},  {"F3", PrachFormat::kF3},
      {"A1", PrachFormat::kA1},  {"A2", PrachFormat::kA2},
      {"A3", PrachFormat::kA3},  {"B1", PrachFormat::kB1},
      {"B2", PrachFormat::kB2},  {"B3", PrachFormat::kB3},
  };
  for (const auto& [text, format] : kNames) {
    if (text == name) return format;
  }
  throw Error(Errc::kConfig,
              "unknown PRACH format '" + std::string(name) + "'");
}

std::string_view to_string(PrachFormat format) noexcept {
  switch (format) {
    case PrachFormat::kF0: return "F0";
    case PrachFormat::kF1: return "F1";
    case PrachFormat::kF2: return "F2";
    case PrachFormat::kF3: return "F3";
    case PrachFormat::kA1: return "A1";
    case PrachFormat::kA2: return "A2";
    case PrachFormat::kA3: return "A3";
    case PrachFormat::kB1: return "B1";
    case PrachFormat::kB2: return "B2";
    case PrachFormat::kB3: return "B3";
  }
  return "?";
}

std::vector<std::complex<double>> generate_zadoff_chu(int root, int length,
                                                      int shift) {
  if (length <= 0 || length % 2 == 0) {
    throw Error(Errc::kConfig, "Zadoff-Chu length must be odd and positive, got " +
                                   std::to_string(length));
  }
  if (root <= 0 || std::gcd(root, length) != 1) {
    throw Error(Errc::kInvalidRoot, "Zadoff-Chu root " + std::to_string(root) +
                                        " is not coprime with length " +
                                        std::to_string(length));
  }
  if (shift < 0 || shift >= length) {
    throw Error(Errc::kConfig, "cyclic shift must be in [0, length)");
  }
  // Reduce u*n*(n+1) modulo 2N in integers so the phase stays exact for
  // long sequences.
  const std::int64_t two_n = 2 * static_cast<std::int64_t>(length);
  std::vector<std::complex<double>> z(length);
  for (int n = 0; n < length; ++n) {
    const std::int64_t m = (n + shift) % length;
    const std::int64_t e = (root % two_n) * ((m * (m + 1)) % two_n) % two_n;
    const double phase = -std::numbers::pi * static_cast<double>(e) / length;
    z[n] = {std::cos(phase), std::sin(phase)};
  }
  return z;
}

std::vector<std::uint8_t> generate_gold31(std::uint32_t c_init,
                                          std::size_t length) {
  const std::size_t total = length + kGoldOffset;
  std::vector<std::uint8_t> x1(total + 31, 0);
  std::vector<std::uint8_t> x2(total + 31, 0);
  x1[0] = 1;
  for (int i = 0; i < 31; ++i) x2[i] = (c_init >> i) & 1u;
  for (std::size_t n = 0; n < total; ++n) {
    x1[n + 31] = x1[n + 3] ^ x1[n];
    x2[n + 31] = x2[n + 3] ^ x2[n + 2] ^ x2[n + 1] ^ x2[n];
  }
  std::vector<std::uint8_t> c(length);
  for (std::size_t n = 0; n < length; ++n) {
    c[n] = x1[n + kGoldOffset] ^ x2[n + kGoldOffset];
  }
  return c;
}

int largest_prime_at_most(int n) {
  for (int p = n; p >= 2; --p) {
    if (is_prime(p)) return p;
  }
  throw Error(Errc::kConfig, "no prime <= " + std::to_string(n));
}

ReferenceSignal generate_srs(const SrsConfig& cfg,
                             const NumerologyConfig& numerology) {
  if (cfg.comb_size != 2 && cfg.comb_size != 4) {
    throw Error(Errc::kConfig, "SRS comb_size must be 2 or 4");
  }
  if (cfg.num_subcarriers < 2) {
    throw Error(Errc::kConfig, "SRS needs at least two subcarriers");
  }
  if (cfg.symbol < 0) throw Error(Errc::kConfig, "SRS symbol must be >= 0");
  if (static_cast<long>(cfg.num_subcarriers) * cfg.comb_size >
      numerology.occupied_subcarriers) {
    throw Error(Errc::kConfig, "SRS span exceeds the occupied band");
  }

  // Base sequence: ZC of the largest prime length not exceeding N, extended
  // cyclically to N.
  const int zc_len = largest_prime_at_most(cfg.num_subcarriers);
  const auto base = generate_zadoff_chu(cfg.zc_root, zc_len, cfg.cyclic_shift);

  ReferenceSignal sig;
  sig.kind = SignalKind::kSrs;
  sig.symbols.reserve(cfg.num_subcarriers);
  sig.re_indices.reserve(cfg.num_subcarriers);
  for (int n = 0; n < cfg.num_subcarriers; ++n) {
    sig.symbols.push_back(base[n % zc_len]);
    sig.re_indices.push_back({cfg.symbol, cfg.start_re + n * cfg.comb_size});
  }
  check_band(sig.re_indices, numerology, "SRS");
  return sig;
}

ReferenceSignal generate_prs(const PrsConfig& cfg,
                             const NumerologyConfig& numerology) {
  if (cfg.num_symbols != 2 && cfg.num_symbols != 4 && cfg.num_symbols != 6 &&
      cfg.num_symbols != 12) {
    throw Error(Errc::kConfig, "PRS num_symbols must be one of {2,4,6,12}, got " +
                                   std::to_string(cfg.num_symbols));
  }
  if (cfg.comb_size <= 0 || 12 % cfg.comb_size != 0) {
    throw Error(Errc::kConfig, "PRS comb_size must divide 12");
  }
  if (cfg.num_prb <= 0) throw Error(Errc::kConfig, "PRS num_prb must be > 0");
  if (cfg.re_offset < 0 || cfg.re_offset >= cfg.comb_size) {
    throw Error(Errc::kConfig, "PRS re_offset must be in [0, comb_size)");
  }
  if (cfg.gold_seed >= (1u << 31)) {
    throw Error(Errc::kConfig, "PRS gold_seed must fit in 31 bits");
  }
  if (cfg.first_symbol < 0) {
    throw Error(Errc::kConfig, "PRS first_symbol must be >= 0");
  }

  const int per_symbol = cfg.num_prb * 12 / cfg.comb_size;
  const std::size_t total = static_cast<std::size_t>(per_symbol) * cfg.num_symbols;
  const auto bits = generate_gold31(cfg.gold_seed, 2 * total);
  const double norm = 1.0 / std::numbers::sqrt2;

  ReferenceSignal sig;
  sig.kind = SignalKind::kPrs;
  sig.symbols.reserve(total);
  sig.re_indices.reserve(total);
  std::size_t m = 0;
  for (int l = 0; l < cfg.num_symbols; ++l) {
    const int offset = (cfg.re_offset + l) % cfg.comb_size;
    for (int i = 0; i < per_symbol; ++i, ++m) {
      sig.symbols.push_back({(1.0 - 2.0 * bits[2 * m]) * norm,
                             (1.0 - 2.0 * bits[2 * m + 1]) * norm});
      sig.re_indices.push_back(
          {cfg.first_symbol + l, cfg.start_re + offset + i * cfg.comb_size});
    }
  }
  check_band(sig.re_indices, numerology, "PRS");
  return sig;
}

ReferenceSignal generate_prach(const PrachConfig& cfg) {
  const int len = cfg.sequence_length();
  if (cfg.start_re < 0 || cfg.symbol < 0) {
    throw Error(Errc::kConfig, "PRACH start_re and symbol must be >= 0");
  }
  const auto x = generate_zadoff_chu(cfg.zc_root, len, cfg.cyclic_shift);
  auto y = fft(x);
  const double norm = 1.0 / std::sqrt(static_cast<double>(len));

  ReferenceSignal sig;
  sig.kind = SignalKind::kPrach;
  sig.symbols.reserve(len);
  sig.re_indices.reserve(len);
  for (int k = 0; k < len; ++k) {
    sig.symbols.push_back(y[k] * norm);
    sig.re_indices.push_back({cfg.symbol, cfg.start_re + k});
  }
  return sig;
}

IqBufferQ15 prach_waveform(const PrachConfig& cfg, Amplitude amp) {
  const int len = cfg.sequence_length();
  const int cp = cfg.effective_cp_len();
  if (cp >= len) throw Error(Errc::kConfig, "PRACH cp_len must be < length");
  const auto x = generate_zadoff_chu(cfg.zc_root, len, cfg.cyclic_shift);
  IqBufferQ15 out;
  out.reserve(cp + len);
  for (int n = len - cp; n < len; ++n) out.push_back(rescale(quantize(x[n]), amp));
  for (int n = 0; n < len; ++n) out.push_back(rescale(quantize(x[n]), amp));
  return out;
}

}  // namespace nrpos
