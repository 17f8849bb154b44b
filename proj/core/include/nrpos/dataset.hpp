// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Ranging dataset layout.
//
//   <root>/<D>m_ue_att_<x>/
//       srs_chF.raw             LS estimates on the SRS comb
//       srs_chF_lin_interp.raw  same, with in-between subcarriers interpolated
//       srs_chT.raw             impulse response, fft_size samples
//       noise.raw               REs of an empty OFDM symbol
//       meta.txt                optional key=value sidecar (simulated data)
//
// Every .raw file is headerless little-endian int16 I/Q, I first. Files may
// hold several snapshots back to back. The folder name carries the distance
// in meters and the attenuation x in dB below the 89.5 dB maximum TX gain.

#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nrpos/fft.hpp"
#include "nrpos/fixedpoint.hpp"

namespace nrpos {

inline constexpr double kMaxTxGainDb = 89.5;

inline constexpr const char* kChFFile = "srs_chF.raw";
inline constexpr const char* kChFInterpFile = "srs_chF_lin_interp.raw";
inline constexpr const char* kChTFile = "srs_chT.raw";
inline constexpr const char* kNoiseFile = "noise.raw";
inline constexpr const char* kMetaFile = "meta.txt";

using MetaMap = std::map<std::string, std::string>;

struct DatasetRecord {
  double distance_m = 0.0;
  double tx_gain_db = kMaxTxGainDb;
  IqBufferQ15 srs_chF;
  IqBufferQ15 srs_chF_lin_interp;
  IqBufferQ15 srs_chT;
  IqBufferQ15 noise;
  MetaMap meta;
  std::vector<std::string> warnings;  // populated by read_record
};

struct FolderInfo {
  double distance_m = 0.0;
  double attenuation_db = 0.0;
  double tx_gain_db = kMaxTxGainDb;
};

// "<D>m_ue_att_<x>" -> (D, 89.5 - x). Falls back to scanning for a
// "ue_att_<x>" substring and a standalone "<D>m" token. Throws Errc::kParse.
FolderInfo parse_folder_name(std::string_view name);
std::string folder_name(double distance_m, double tx_gain_db);

// Throws Errc::kMissingFile, Errc::kTruncated, Errc::kLength or Errc::kIo.
// fft_size validates srs_chT unless meta.txt overrides it.
DatasetRecord read_record(const std::filesystem::path& folder,
                          int fft_size = 1536);

// Writes into root / folder_name(...) and returns that folder.
std::filesystem::path write_record(const DatasetRecord& rec,
                                   const std::filesystem::path& root);

struct ScanEntry {
  std::filesystem::path path;
  FolderInfo info;
};

struct ScanResult {
  std::vector<ScanEntry> entries;  // sorted by path
  std::vector<std::string> warnings;
};

// Recursively finds record folders. Folders holding srs_chF.raw whose names
// do not parse are skipped with a warning.
ScanResult scan_dataset(const std::filesystem::path& root);

// Splits a file's samples into consecutive snapshots of per_snapshot values.
// Throws Errc::kLength unless the size is an exact positive multiple.
std::vector<std::vector<Cplx>> split_snapshots(std::span<const SampleQ15> data,
                                               std::size_t per_snapshot);

// Flat key=value text, '#' comments. Throws ParseError on malformed lines.
MetaMap parse_key_values(std::string_view text);
std::string format_key_values(const MetaMap& kv);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);

}  // namespace nrpos
