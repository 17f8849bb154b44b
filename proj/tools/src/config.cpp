// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <charconv>
#include <cstdlib>

#include "nrpos/error.hpp"

namespace nrpos::cli {

KeyValueConfig::KeyValueConfig(MetaMap values, std::string source)
    : values_(std::move(values)), source_(std::move(source)) {}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(Errc::kMissingFile, "config file " + path.string() + " not found");
  }
  const auto bytes = read_file_bytes(path);
  try {
    return {parse_key_values(std::string(bytes.begin(), bytes.end())), path.string()};
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

bool KeyValueConfig::has(std::string_view key) const {
  return values_.find(std::string(key)) != values_.end();
}

const std::string* KeyValueConfig::lookup(std::string_view key) {
  const auto it = values_.find(std::string(key));
  if (it == values_.end()) return nullptr;
  used_.insert(it->first);
  return &it->second;
}

void KeyValueConfig::bad_value(std::string_view key, const std::string& value,
                               const char* expected) const {
  throw Error(Errc::kConfig, source_ + ": " + std::string(key) + " = '" + value +
                                 "' is not " + expected);
}

std::string KeyValueConfig::get_string(std::string_view key, std::string fallback) {
  const auto* v = lookup(key);
  return v ? *v : std::move(fallback);
}

int KeyValueConfig::get_int(std::string_view key, int fallback) {
  const auto* v = lookup(key);
  if (!v) return fallback;
  int out = 0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, *v, "an integer");
  return out;
}

std::uint64_t KeyValueConfig::get_u64(std::string_view key, std::uint64_t fallback) {
  const auto* v = lookup(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, *v, "an unsigned integer");
  return out;
}

namespace {

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size();
}

}  // namespace

double KeyValueConfig::get_double(std::string_view key, double fallback) {
  const auto* v = lookup(key);
  if (!v) return fallback;
  double out = 0.0;
  if (!parse_double(*v, out)) bad_value(key, *v, "a number");
  return out;
}

std::vector<double> KeyValueConfig::get_doubles(std::string_view key,
                                                std::vector<double> fallback) {
  const auto* v = lookup(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= v->size()) {
    auto end = v->find(',', start);
    if (end == std::string::npos) end = v->size();
    std::string item = v->substr(start, end - start);
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    item = b == std::string::npos ? std::string() : item.substr(b, e - b + 1);
    double d = 0.0;
    if (!parse_double(item, d)) bad_value(key, *v, "a comma-separated list of numbers");
    out.push_back(d);
    start = end + 1;
  }
  return out;
}

void KeyValueConfig::reject_unused() const {
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) {
      throw Error(Errc::kConfig, source_ + ": unknown key '" + key + "'");
    }
  }
}

NumerologyConfig read_numerology(KeyValueConfig& cfg) {
  NumerologyConfig nm;
  nm.fft_size = cfg.get_int("fft_size", nm.fft_size);
  nm.scs_hz = cfg.get_double("scs_hz", nm.scs_hz);
  nm.sampling_rate_hz = cfg.get_double("sampling_rate_hz", nm.fft_size * nm.scs_hz);
  nm.cp_len = cfg.get_int("cp_len", nm.cp_len);
  nm.occupied_subcarriers = cfg.get_int("occupied_subcarriers", nm.occupied_subcarriers);
  nm.center_freq_hz = cfg.get_double("center_freq_hz", nm.center_freq_hz);
  nm.validate();
  return nm;
}

}  // namespace nrpos::cli
