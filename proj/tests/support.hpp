// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Receiver chain shared by the unit and acceptance tests: snapshots in,
// range estimate out.

#pragma once

#include <unistd.h>

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nrpos/chanest.hpp"
#include "nrpos/metrics.hpp"
#include "nrpos/simchan.hpp"

namespace nrpos::testing {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "nrpos") {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct Observation {
  std::vector<Cplx> comb;   // LS estimate over the SRS comb
  std::vector<Cplx> noise;  // empty-symbol REs at the same subcarriers
};

inline Observation observe(const RttScenario& sc, const Snapshot& snap) {
  const auto srs = scenario_srs(sc);
  Observation obs;
  obs.comb = ls_estimate(snap.rx_grid, srs);
  for (const auto& loc : scenario_noise_res(sc)) {
    obs.noise.push_back(to_complex(snap.rx_grid.at(loc)));
  }
  return obs;
}

// Coherently combines the first m observations (estimates and noise alike).
inline ChannelEstimate combined_estimate(const RttScenario& sc,
                                         std::span<const Observation> obs,
                                         ImpulseSource source) {
  std::vector<std::vector<Cplx>> combs;
  std::vector<std::vector<Cplx>> noises;
  for (const auto& o : obs) {
    combs.push_back(o.comb);
    noises.push_back(o.noise);
  }
  const auto comb = combine_coherent(combs);
  const auto noise = combine_coherent(noises);
  return build_channel_estimate(
      comb, power_per_re(noise),
      {sc.srs.start_re, sc.srs.comb_size, sc.numerology.fft_size}, source);
}

inline std::vector<Observation> observe_all(const RttScenario& sc) {
  std::vector<Observation> out;
  for (const auto& snap : simulate_rtt_exchange(sc)) out.push_back(observe(sc, snap));
  return out;
}

}  // namespace nrpos::testing
