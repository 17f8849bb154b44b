// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "commands.hpp"
#include "nrpos/chanest.hpp"
#include "nrpos/dataset.hpp"
#include "nrpos/error.hpp"
#include "nrpos/fixedpoint.hpp"
#include "nrpos/metrics.hpp"
#include "nrpos/ofdm.hpp"
#include "nrpos/simchan.hpp"
#include "nrpos/tracefmt.hpp"
#include "support.hpp"

namespace nrpos {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records the first failure; later ones only bump the count.
  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail = what;
    pass = false;
    ++failures;
  }
  int failures = 0;
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const NumerologyConfig kNum{};

// 1 --------------------------------------------------------------------------
Outcome dbfs_profiles() {
  Outcome o;
  const double d519 = amplitude_to_dbfs(519);
  const double d8231 = amplitude_to_dbfs(8231);
  o.require(std::abs(d519 + 36.0) <= 0.1, fmt("dBFS(519) = %.4f", d519));
  o.require(std::abs(d8231 + 12.0) <= 0.1, fmt("dBFS(8231) = %.4f", d8231));
  o.require(dbfs_to_amplitude(d519) == 519, "inverse of dBFS(519)");
  o.require(dbfs_to_amplitude(d8231) == 8231, "inverse of dBFS(8231)");
  o.require(dbfs_to_amplitude(-36.0) == 519, "dbfs_to_amplitude(-36)");
  o.require(dbfs_to_amplitude(-12.0) == 8231, "dbfs_to_amplitude(-12)");
  if (o.pass) o.detail = fmt("dBFS(519)=%.3f", d519) + fmt(" dBFS(8231)=%.3f", d8231);
  return o;
}

// 2 --------------------------------------------------------------------------
Outcome q15_contract() {
  Outcome o;
  for (int v = kQ15Min; v <= kQ15Max; ++v) {
    const auto s = static_cast<std::int16_t>(v);
    o.require(float_to_q15(q15_to_float(s)) == s, "round trip of " + std::to_string(v));
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double worst = 0.0;
  for (int n = 0; n < 1'000'000; ++n) {
    const double x = dist(rng);
    const double err = x - q15_to_float(float_to_q15(x));
    worst = std::max(worst, std::abs(err));
    o.require(err >= 0.0 && err < 0x1.0p-15, fmt("quantization error %.3g", err));
  }
  if (o.pass) o.detail = "65536 codes, 1e6 floats, max error " + fmt("%.3g", worst * 32768) + " LSB";
  return o;
}

// 3 --------------------------------------------------------------------------
Outcome power_and_snr() {
  Outcome o;
  DeviceProfile dev;
  const PowerReport p28{268435456.0, 1, 0};
  const PowerReport p30{1073741824.0, 1, 0};
  const double tx = tx_power_dbm(p28, dev);
  o.require(std::abs(tx - 23.979) <= 1e-3, fmt("tx 2^28 -> %.6f dBm", tx));
  dev.g_r = 40.0;
  const double rx = rx_power_dbm(p30, dev);
  o.require(std::abs(rx + 10.0) <= 1e-3, fmt("rx 2^30 G_r=40 -> %.6f dBm", rx));

  std::string worst;
  double worst_err = 0.0;
  for (double snr : {0.0, 10.0, 20.0, 25.0}) {
    RttScenario sc;
    sc.snr_db = snr;
    sc.num_snapshots = 100;
    sc.seed = 300 + static_cast<std::uint64_t>(snr);
    const auto srs = scenario_srs(sc);
    const auto empty = scenario_noise_res(sc);
    double mean = 0.0;
    for (const auto& snap : simulate_rtt_exchange(sc)) {
      IqBufferQ15 sig;
      for (const auto& loc : srs.re_indices) sig.push_back(snap.rx_grid.at(loc));
      mean += estimate_snr(power_per_re(sig), noise_power(snap.rx_grid, empty)).db / 100.0;
    }
    const double err = mean - snr;
    if (std::abs(err) >= worst_err) {
      worst_err = std::abs(err);
      worst = fmt("%.0f dB", snr) + fmt(" off by %.3f", err);
    }
    o.require(std::abs(err) <= 0.5, fmt("SNR %.0f dB", snr) + fmt(" measured %.3f", mean));
  }
  if (o.pass) o.detail = fmt("tx %.4f dBm", tx) + fmt(", rx %.4f dBm, worst SNR ", rx) + worst;
  return o;
}

// 4 --------------------------------------------------------------------------
Outcome ranging_sweep() {
  Outcome o;
  ToaOptions toa;
  toa.refinement = PeakRefinement::kBandLimited;
  double worst_single = 0.0;
  double mae = 0.0;
  for (int d = 7; d <= 11; ++d) {
    RttScenario sc;
    sc.distance_m = d;
    sc.snr_db = 25.0;
    sc.num_snapshots = 10;
    sc.seed = 4000 + d;
    const auto obs = testing::observe_all(sc);
    for (std::size_t s = 0; s < obs.size(); ++s) {
      const auto est = testing::combined_estimate(sc, std::span(obs).subspan(s, 1),
                                                  ImpulseSource::kInterpolated);
      const double err = estimate_range(est, kNum, toa).range_m - d;
      worst_single = std::max(worst_single, std::abs(err));
      o.require(std::abs(err) <= 1.0,
                std::to_string(d) + " m snapshot " + std::to_string(s) + fmt(" error %.3f m", err));
    }
    const auto est = testing::combined_estimate(sc, obs, ImpulseSource::kInterpolated);
    mae += std::abs(estimate_range(est, kNum, toa).range_m - d) / 5.0;
  }
  o.require(mae <= 0.5, fmt("combined MAE %.3f m", mae));

  // The same sweep through the command-line path: simulate to disk, then
  // estimate from the files.
  TempDir dir("nrpos_acc");
  const auto scenario = dir.path() / "sweep.txt";
  {
    std::ofstream(scenario) << "distances = 7,8,9,10,11\nsnr_at_max_gain_db = 25\n"
                               "num_snapshots = 10\n";
  }
  cli::SimulateOptions sim{scenario, dir.path() / "ds", 4, 1};
  cli::cmd_simulate(sim);
  std::ostringstream out, err;
  cli::EstimateOptions est_opt;
  est_opt.root = dir.path() / "ds";
  est_opt.refinement = PeakRefinement::kBandLimited;
  const auto summary = cli::cmd_estimate(est_opt, {out, err});
  o.require(summary.rows.size() == 5, "estimate CLI returned " +
                                          std::to_string(summary.rows.size()) + " rows");
  double cli_mae = 0.0;
  for (const auto& row : summary.rows) {
    const double truth = parse_folder_name(row.file).distance_m;
    cli_mae += std::abs(row.range_m - truth) / 5.0;
    o.require(std::abs(row.range_m - truth) <= 1.0, row.file + fmt(" CLI range %.3f", row.range_m));
  }
  o.require(cli_mae <= 0.5, fmt("CLI MAE %.3f m", cli_mae));
  if (o.pass) {
    o.detail = fmt("worst snapshot %.3f m, ", worst_single) + fmt("combined MAE %.3f m, ", mae) +
               fmt("CLI MAE %.3f m", cli_mae);
  }
  return o;
}

// 5 --------------------------------------------------------------------------
Outcome shift_sweep() {
  Outcome o;
  for (int d = 0; d <= 131; ++d) {
    RttScenario sc;
    sc.distance_m = 0.0;
    sc.bias_samples = d;
    sc.snr_db = 10.0;
    sc.seed = 5000 + d;
    const auto obs = testing::observe_all(sc);
    const auto est = testing::combined_estimate(sc, obs, ImpulseSource::kInterpolated);
    const auto r = detect_toa(est.impulse, est.impulse_noise(), kNum);
    o.require(r.peak_index == d && std::lround(r.delay_samples()) == d,
              "D=" + std::to_string(d) + " detected " + std::to_string(r.peak_index));
  }
  if (o.pass) o.detail = "132 delays at 10 dB";
  return o;
}

// 6 --------------------------------------------------------------------------
Outcome combining_gain() {
  Outcome o;
  constexpr int kTrials = 100;
  constexpr int kM = 10;
  double gain = 0.0;
  for (int t = 0; t < kTrials; ++t) {
    RttScenario sc;
    sc.distance_m = 10.0;
    sc.snr_db = 10.0;
    sc.num_snapshots = kM;
    sc.seed = 6000 + t;
    const auto obs = testing::observe_all(sc);
    const auto one = testing::combined_estimate(sc, std::span(obs).first(1),
                                                ImpulseSource::kInterpolated);
    const auto all = testing::combined_estimate(sc, obs, ImpulseSource::kInterpolated);
    gain += (detect_toa(all.impulse, all.impulse_noise(), kNum).peak_to_noise_db -
             detect_toa(one.impulse, one.impulse_noise(), kNum).peak_to_noise_db) /
            kTrials;
  }
  o.require(std::abs(gain - 10.0 * std::log10(kM)) <= 1.0, fmt("gain %.3f dB", gain));
  if (o.pass) o.detail = fmt("mean gain %.3f dB over 100 trials", gain);
  return o;
}

// 7 --------------------------------------------------------------------------
Outcome dataset_format() {
  Outcome o;
  TempDir dir("nrpos_acc");
  std::mt19937 rng(7);
  auto random_iq = [&rng](std::size_t n) {
    IqBufferQ15 v(n);
    for (auto& s : v) s = {static_cast<std::int16_t>(rng()), static_cast<std::int16_t>(rng())};
    return v;
  };
  DatasetRecord rec;
  rec.distance_m = 9;
  rec.tx_gain_db = 79.5;
  rec.srs_chF = random_iq(624 * 3);
  rec.srs_chF_lin_interp = random_iq(1247 * 3);
  rec.srs_chT = random_iq(1536 * 3);
  rec.noise = random_iq(624 * 3);
  rec.meta = {{"fft_size", "1536"}, {"note", "acceptance"}};
  const auto folder = write_record(rec, dir.path());
  o.require(folder.filename() == "9m_ue_att_10", "folder " + folder.filename().string());
  const auto back = read_record(folder);
  o.require(back.srs_chF == rec.srs_chF && back.srs_chF_lin_interp == rec.srs_chF_lin_interp &&
                back.srs_chT == rec.srs_chT && back.noise == rec.noise && back.meta == rec.meta,
            "record contents differ after read");
  for (const char* name : {kChFFile, kChFInterpFile, kChTFile, kNoiseFile}) {
    const auto bytes = read_file_bytes(folder / name);
    o.require(deserialize_iq(bytes).size() * 4 == bytes.size() &&
                  serialize_iq(deserialize_iq(bytes)) == bytes,
              std::string(name) + " bytes differ");
  }

  o.require(folder_name(10, 89.5) == "10m_ue_att_0", "folder_name ue_att_0");
  o.require(folder_name(10, 39.5) == "10m_ue_att_50", "folder_name ue_att_50");
  const auto a0 = parse_folder_name("10m_ue_att_0");
  const auto a50 = parse_folder_name("10m_ue_att_50");
  o.require(a0.distance_m == 10 && a0.tx_gain_db == 89.5, "parse ue_att_0");
  o.require(a50.distance_m == 10 && a50.tx_gain_db == 39.5, "parse ue_att_50");

  const auto scenario = dir.path() / "grid.txt";
  {
    std::ofstream(scenario) << "distances = 7,8,9,10,11\nattenuations = 0,10,20,30,40,50\n"
                               "num_snapshots = 1\n";
  }
  cli::SimulateOptions sim{scenario, dir.path() / "sweep", 1, 2};
  cli::cmd_simulate(sim);
  const auto scan = scan_dataset(dir.path() / "sweep");
  o.require(scan.entries.size() == 30, std::to_string(scan.entries.size()) + " records");
  if (o.pass) o.detail = "round trip exact, 30 records from 5x6";
  return o;
}

// 8 --------------------------------------------------------------------------
constexpr std::string_view kDefsText = R"(ID = GNB_PHY_UL_FREQ_CHANNEL_ESTIMATE
    GROUP = ALL:PHY:GNB
    FORMAT = int,frame : buffer,chest_f
ID = GNB_PHY_UL_TIME_CHANNEL_ESTIMATE
    GROUP = ALL:PHY:GNB
    FORMAT = int,frame : int,slot : buffer,chest_t
ID = UE_PHY_DL_TICK
    GROUP = ALL:PHY:UE
    FORMAT = int,frame
)";

Outcome trace_format() {
  Outcome o;
  const auto defs = parse_message_defs(kDefsText);
  std::mt19937_64 rng(8);
  std::vector<TraceEvent> events(10'000);
  for (auto& ev : events) {
    ev.numeric_id = static_cast<std::uint32_t>(rng() % defs.size());
    ev.timestamp_ns = rng();
    for (const auto& f : defs[ev.numeric_id].fields) {
      if (f.kind == FieldKind::kInt) {
        ev.payload.emplace_back(static_cast<std::int64_t>(rng()));
      } else {
        TraceBytes b(rng() % 64);
        for (auto& x : b) x = static_cast<std::uint8_t>(rng());
        ev.payload.emplace_back(std::move(b));
      }
    }
  }
  std::ostringstream out;
  const auto stats = record(events, defs, out);
  const std::string text = out.str();
  const std::span bytes(reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
  o.require(stats.written == events.size() && stats.rejected == 0, "record rejected events");
  const auto decoded = read_trace(bytes, defs);
  o.require(!decoded.truncated && decoded.events == events, "decoded events differ");

  // extract reassembles each field from the source events.
  for (const auto& def : defs) {
    for (std::size_t f = 0; f < def.fields.size(); ++f) {
      TraceBytes expect;
      for (const auto& ev : events) {
        if (ev.numeric_id != def.numeric_id) continue;
        if (const auto* b = std::get_if<TraceBytes>(&ev.payload[f])) {
          expect.insert(expect.end(), b->begin(), b->end());
        } else {
          const auto v = static_cast<std::uint64_t>(std::get<std::int64_t>(ev.payload[f]));
          for (int k = 0; k < 8; ++k) expect.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
        }
      }
      o.require(extract(bytes, def.id, def.fields[f].name, defs).data == expect,
                "extract " + def.id + "." + def.fields[f].name);
    }
  }

  // Parser totality: mutated definition files either parse or fail with a
  // located ParseError.
  const std::string seed_text(kDefsText);
  const std::string alphabet = "ID=GROUPFORMATintbuffer,: \n#\t_x0";
  int rejected = 0;
  for (int n = 0; n < 10'000; ++n) {
    std::string t = seed_text;
    const int edits = 1 + static_cast<int>(rng() % 8);
    for (int e = 0; e < edits; ++e) {
      const auto pos = rng() % (t.size() + 1);
      switch (rng() % 3) {
        case 0: t.insert(t.begin() + static_cast<std::ptrdiff_t>(pos), alphabet[rng() % alphabet.size()]); break;
        case 1: if (pos < t.size()) t.erase(pos, 1); break;
        default: if (pos < t.size()) t[pos] = static_cast<char>(rng() % 256); break;
      }
    }
    try {
      parse_message_defs(t);
    } catch (const ParseError& e) {
      ++rejected;
      o.require(e.line() > 0, "parse error without a line");
    } catch (const std::exception& e) {
      o.require(false, std::string("unexpected exception: ") + e.what());
    }
  }

  // Non-perturbation: a stalled consumer makes the queue overflow; emit keeps
  // returning immediately and counts the drops.
  std::atomic<bool> release{false};
  std::atomic<std::size_t> delivered{0};
  std::uint64_t dropped = 0;
  double worst_us = 0.0;
  {
    TraceRecorder rec(16, [&](const TraceEvent&) {
      while (!release.load()) std::this_thread::sleep_for(std::chrono::microseconds(50));
      ++delivered;
    });
    std::size_t accepted = 0;
    for (int n = 0; n < 5000; ++n) {
      TraceEvent ev{0, 0, {std::int64_t{n}, TraceBytes(16)}};
      const auto t0 = std::chrono::steady_clock::now();
      accepted += rec.emit(std::move(ev)) ? 1 : 0;
      const auto us = std::chrono::duration<double, std::micro>(
                          std::chrono::steady_clock::now() - t0).count();
      worst_us = std::max(worst_us, us);
    }
    dropped = rec.dropped();
    o.require(dropped > 0, "no drops under a stalled consumer");
    o.require(accepted + dropped == 5000, "accepted + dropped != emitted");
    release = true;
    rec.stop();
    o.require(delivered == accepted, "delivered != accepted");
  }
  // Generous bound: a blocking enqueue would wait for the sink's release.
  o.require(worst_us < 50'000.0, fmt("slowest emit %.0f us", worst_us));
  if (o.pass) {
    o.detail = "1e4 events exact, " + std::to_string(rejected) +
               "/10000 fuzzed defs rejected with lines, " + std::to_string(dropped) +
               " drops, slowest emit " + fmt("%.0f us", worst_us);
  }
  return o;
}

// 9 --------------------------------------------------------------------------
Outcome ofdm_integrity() {
  Outcome o;
  std::mt19937 rng(9);
  std::uniform_int_distribution<int> dist(-30000, 30000);
  double worst_parseval = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    ResourceGrid g(1, kNum.fft_size);
    for (auto& c : g.symbol(0)) {
      c = {static_cast<std::int16_t>(dist(rng)), static_cast<std::int16_t>(dist(rng))};
    }
    const auto t = modulate(g, kNum);
    const auto t2 = modulate(demodulate(t, kNum, 1), kNum);
    int worst = 0;
    for (std::size_t n = 0; n < t.size(); ++n) {
      worst = std::max({worst, std::abs(t[n].i - t2[n].i), std::abs(t[n].q - t2[n].q)});
    }
    o.require(worst <= 1, "round trip off by " + std::to_string(worst) + " LSB");

    double e_time = 0.0;
    double e_freq = 0.0;
    for (int n = kNum.cp_len; n < kNum.symbol_length(); ++n) e_time += std::norm(to_complex(t[n]));
    for (const auto& c : g.cells()) e_freq += std::norm(to_complex(c));
    const double ratio = e_time / (e_freq / kNum.fft_size);
    worst_parseval = std::max(worst_parseval, std::abs(ratio - 1.0));
    o.require(std::abs(ratio - 1.0) <= 1e-3, fmt("Parseval ratio %.6f", ratio));

    for (int n = 0; n < kNum.cp_len; ++n) {
      o.require(t[n] == t[n + kNum.fft_size], "CP sample " + std::to_string(n));
    }
  }
  if (o.pass) o.detail = "1000 grids, worst Parseval deviation " + fmt("%.2e", worst_parseval);
  return o;
}

// 10 -------------------------------------------------------------------------
Outcome determinism() {
  Outcome o;
  TempDir dir("nrpos_acc");
  const auto scenario = dir.path() / "sc.txt";
  {
    std::ofstream(scenario) << "distances = 7,9,11\nattenuations = 0,10\nnum_snapshots = 5\n";
  }
  auto tree = [](const fs::path& root) {
    std::map<std::string, std::vector<std::uint8_t>> t;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
      if (e.is_regular_file()) {
        t[e.path().lexically_relative(root).generic_string()] = read_file_bytes(e.path());
      }
    }
    return t;
  };
  cli::cmd_simulate({scenario, dir.path() / "a", 42, 1});
  cli::cmd_simulate({scenario, dir.path() / "b", 42, 1});
  cli::cmd_simulate({scenario, dir.path() / "c", 42, 4});
  const auto a = tree(dir.path() / "a");
  o.require(a.size() == 6u * 5, std::to_string(a.size()) + " files");
  o.require(a == tree(dir.path() / "b"), "repeated run differs");
  o.require(a == tree(dir.path() / "c"), "--jobs 4 run differs");
  if (o.pass) o.detail = "3 runs, " + std::to_string(a.size()) + " files identical";
  return o;
}

}  // namespace
}  // namespace nrpos

int main() {
  using namespace nrpos;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"dBFS of the device amplitudes", dbfs_profiles},
      {"Q15 contract", q15_contract},
      {"power and SNR formulas", power_and_snr},
      {"ranging sweep 7-11 m", ranging_sweep},
      {"shift-theorem sweep", shift_sweep},
      {"coherent combining gain", combining_gain},
      {"dataset format", dataset_format},
      {"trace format", trace_format},
      {"OFDM integrity", ofdm_integrity},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
