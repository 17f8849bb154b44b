// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <regex>

#include "nrpos/error.hpp"

namespace nrpos {
namespace fs = std::filesystem;
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

FolderInfo make_info(double distance, double attenuation) {
  return {distance, attenuation, kMaxTxGainDb - attenuation};
}

IqBufferQ15 read_iq_file(const fs::path& folder, const char* name) {
  const auto path = folder / name;
  if (!fs::exists(path)) {
    throw Error(Errc::kMissingFile,
                "missing " + std::string(name) + " in " + folder.string());
  }
  const auto bytes = read_file_bytes(path);
  try {
    return deserialize_iq(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace

FolderInfo parse_folder_name(std::string_view name) {
  static const std::regex kStrict(
      R"(^([0-9]+(?:\.[0-9]+)?)m_ue_att_([0-9]+(?:\.[0-9]+)?)$)");
  static const std::regex kAtt(R"(ue_att_([0-9]+(?:\.[0-9]+)?))");
  static const std::regex kDistance(R"(^([0-9]+(?:\.[0-9]+)?)m$)");

  const std::string text(name);
  std::smatch m;
  if (std::regex_match(text, m, kStrict)) {
    return make_info(std::stod(m[1]), std::stod(m[2]));
  }
  // Permissive fallback: "ue_att_<x>" anywhere plus a standalone "<D>m"
  // token between '_', '-' or the ends of the name.
  if (!std::regex_search(text, m, kAtt)) {
    throw Error(Errc::kParse, "folder name '" + text + "' has no ue_att_<x>");
  }
  const double attenuation = std::stod(m[1]);
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find_first_of("_-", start);
    const std::string token =
        text.substr(start, end == std::string::npos ? std::string::npos
                                                    : end - start);
    std::smatch dm;
    if (std::regex_match(token, dm, kDistance)) {
      return make_info(std::stod(dm[1]), attenuation);
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  throw Error(Errc::kParse, "folder name '" + text + "' has no <D>m token");
}

std::string folder_name(double distance_m, double tx_gain_db) {
  if (!(distance_m >= 0.0) || !(tx_gain_db <= kMaxTxGainDb)) {
    throw Error(Errc::kRange, "folder_name: distance must be >= 0 and gain <= 89.5 dB");
  }
  return format_number(distance_m) + "m_ue_att_" +
         format_number(kMaxTxGainDb - tx_gain_db);
}

DatasetRecord read_record(const fs::path& folder, int fft_size) {
  if (!fs::is_directory(folder)) {
    throw Error(Errc::kMissingFile, folder.string() + " is not a directory");
  }
  DatasetRecord rec;
  const auto meta_path = folder / kMetaFile;
  if (fs::exists(meta_path)) {
    const auto bytes = read_file_bytes(meta_path);
    rec.meta = parse_key_values(std::string(bytes.begin(), bytes.end()));
    if (auto it = rec.meta.find("fft_size"); it != rec.meta.end()) {
      try {
        fft_size = std::stoi(it->second);
      } catch (const std::exception&) {
        throw Error(Errc::kParse, meta_path.string() + ": bad fft_size '" +
                                      it->second + "'");
      }
    }
  }
  try {
    const auto info = parse_folder_name(folder.filename().string());
    rec.distance_m = info.distance_m;
    rec.tx_gain_db = info.tx_gain_db;
  } catch (const Error&) {
    rec.warnings.push_back("folder name does not follow <D>m_ue_att_<x>");
    auto number = [&rec](const char* key, double& target) {
      if (auto it = rec.meta.find(key); it != rec.meta.end()) {
        try {
          target = std::stod(it->second);
        } catch (const std::exception&) {
          rec.warnings.push_back(std::string("meta.txt: bad ") + key);
        }
      }
    };
    number("distance_m", rec.distance_m);
    number("tx_gain_db", rec.tx_gain_db);
  }

  rec.srs_chF = read_iq_file(folder, kChFFile);
  rec.srs_chF_lin_interp = read_iq_file(folder, kChFInterpFile);
  rec.srs_chT = read_iq_file(folder, kChTFile);
  rec.noise = read_iq_file(folder, kNoiseFile);

  if (rec.srs_chF_lin_interp.size() < rec.srs_chF.size()) {
    throw Error(Errc::kLength, folder.string() +
                                   ": interpolated estimates shorter than comb "
                                   "estimates");
  }
  if (fft_size > 0 &&
      (rec.srs_chT.empty() || rec.srs_chT.size() % fft_size != 0)) {
    throw Error(Errc::kLength, folder.string() + ": srs_chT holds " +
                                   std::to_string(rec.srs_chT.size()) +
                                   " samples, expected a multiple of " +
                                   std::to_string(fft_size));
  }
  if (rec.noise.empty()) rec.warnings.push_back("noise.raw is empty");
  return rec;
}

fs::path write_record(const DatasetRecord& rec, const fs::path& root) {
  const auto folder = root / folder_name(rec.distance_m, rec.tx_gain_db);
  std::error_code ec;
  fs::create_directories(folder, ec);
  if (ec) {
    throw Error(Errc::kIo, "cannot create " + folder.string() + ": " +
                               ec.message());
  }
  write_file_bytes(folder / kChFFile, serialize_iq(rec.srs_chF));
  write_file_bytes(folder / kChFInterpFile,
                   serialize_iq(rec.srs_chF_lin_interp));
  write_file_bytes(folder / kChTFile, serialize_iq(rec.srs_chT));
  write_file_bytes(folder / kNoiseFile, serialize_iq(rec.noise));
  if (!rec.meta.empty()) {
    const auto text = format_key_values(rec.meta);
    write_file_bytes(folder / kMetaFile,
                     std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                               text.size()));
  }
  return folder;
}

ScanResult scan_dataset(const fs::path& root) {
  ScanResult result;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    result.warnings.push_back(root.string() + " is not a directory");
    return result;
  }
  for (auto it = fs::recursive_directory_iterator(root, ec);
       !ec && it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (!it->is_directory()) continue;
    const auto& path = it->path();
    try {
      result.entries.push_back({path, parse_folder_name(path.filename().string())});
    } catch (const Error&) {
      if (fs::exists(path / kChFFile)) {
        result.warnings.push_back("skipping " + path.string() +
                                  ": name does not follow <D>m_ue_att_<x>");
      }
    }
  }
  if (ec) result.warnings.push_back("scan stopped: " + ec.message());
  std::sort(result.entries.begin(), result.entries.end(),
            [](const ScanEntry& a, const ScanEntry& b) { return a.path < b.path; });
  return result;
}

std::vector<std::vector<Cplx>> split_snapshots(std::span<const SampleQ15> data,
                                               std::size_t per_snapshot) {
  if (per_snapshot == 0 || data.empty() || data.size() % per_snapshot != 0) {
    throw Error(Errc::kLength, std::to_string(data.size()) +
                                   " samples do not split into snapshots of " +
                                   std::to_string(per_snapshot));
  }
  std::vector<std::vector<Cplx>> out;
  for (std::size_t at = 0; at < data.size(); at += per_snapshot) {
    out.push_back(to_complex(data.subspan(at, per_snapshot)));
  }
  return out;
}

MetaMap parse_key_values(std::string_view text) {
  MetaMap kv;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line = trim(line.substr(0, hash));
    }
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key=value");
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "empty key");
    if (kv.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
    kv.emplace(std::move(key), trim(line.substr(eq + 1)));
  }
  return kv;
}

std::string format_key_values(const MetaMap& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::kIo, "short write to " + path.string());
}

}  // namespace nrpos
