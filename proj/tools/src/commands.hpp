// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Subcommand implementations behind the nrpos tool. Each takes a plain
// options struct so the commands can be driven from tests without argv.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrpos/chanest.hpp"
#include "nrpos/dataset.hpp"

namespace nrpos::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitInternal = 3,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Console {
  std::ostream& out;
  std::ostream& err;
};

// generate ------------------------------------------------------------------

struct GenerateOptions {
  std::string kind;  // srs, prs or prach
  fs::path config;   // optional key=value file
  fs::path output;   // txdataF bytes
  fs::path re_map;   // CSV; defaults to output with a .csv extension
  std::uint64_t seed = 0;
};

struct GenerateSummary {
  std::size_t mapped_res = 0;
  int grid_symbols = 0;
  fs::path output;
  fs::path re_map;
};

GenerateSummary cmd_generate(const GenerateOptions& opt);

// simulate ------------------------------------------------------------------

struct SimulateOptions {
  fs::path scenario;  // optional; defaults give the 7-11 m sweep at max gain
  fs::path output;
  std::optional<std::uint64_t> seed;  // overrides the scenario's seed
  int jobs = 1;
};

struct SimulatedPoint {
  fs::path folder;
  double distance_m = 0.0;
  double attenuation_db = 0.0;
  double snr_db = 0.0;
  int amplitude = 0;
  std::uint64_t seed = 0;
};

struct SimulateSummary {
  std::uint64_t seed = 0;
  std::vector<SimulatedPoint> points;
};

SimulateSummary cmd_simulate(const SimulateOptions& opt);

// estimate ------------------------------------------------------------------

struct EstimateOptions {
  fs::path root;
  fs::path output;  // empty writes the CSV to Console::out
  ImpulseSource source = ImpulseSource::kInterpolated;
  PeakRefinement refinement = PeakRefinement::kParabolicLog;
  PeakMode mode = PeakMode::kStrongest;
  double threshold_db = 10.0;
  double bias_samples = 0.0;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct EstimateRow {
  std::string file;
  int snapshots = 0;
  ToaResult toa;
  double range_m = 0.0;
};

struct EstimateSummary {
  std::vector<EstimateRow> rows;
  std::vector<std::string> warnings;
  std::size_t failed = 0;
};

EstimateSummary cmd_estimate(const EstimateOptions& opt, const Console& io);

// metrics -------------------------------------------------------------------

struct MetricsOptions {
  fs::path root;      // dataset records: receive power and SNR
  fs::path txdataF;   // or a generated grid: transmit power
  fs::path output;
  std::string device = "usrp";  // usrp or oran
  // Overrides for the device profile's gains, dB.
  std::optional<double> g_t;
  std::optional<double> g_r;
  std::optional<double> g_t_cal;
  std::optional<double> g_r_cal;
  int fft_size = 1536;
  std::uint64_t seed = 0;
};

struct MetricsRow {
  std::string file;
  std::size_t re_count = 0;
  double p_linear = 0.0;
  double p_dbm = 0.0;
  std::optional<SnrEstimate> snr;
};

struct MetricsSummary {
  std::vector<MetricsRow> rows;
  std::vector<std::string> warnings;
  std::size_t failed = 0;
};

MetricsSummary cmd_metrics(const MetricsOptions& opt, const Console& io);

// trace ---------------------------------------------------------------------

struct TraceRecordOptions {
  fs::path defs;
  fs::path output;
  std::string id;
  std::string field;
  fs::path from;              // record folder or raw Q15 file
  std::size_t chunk_bytes = 0;     // bytes per event; 0 = one SRS snapshot
  std::size_t queue_capacity = 0;  // 0 = large enough for every chunk
};

struct TraceRecordSummary {
  std::size_t events = 0;
  std::size_t written = 0;
  std::size_t rejected = 0;
  std::uint64_t dropped = 0;
};

TraceRecordSummary cmd_trace_record(const TraceRecordOptions& opt);

struct TraceExtractOptions {
  fs::path defs;
  fs::path trace;
  std::string id;
  std::string field;
  fs::path output;
};

struct TraceExtractSummary {
  std::size_t bytes = 0;
  std::size_t matched = 0;
  bool truncated = false;
  std::uint64_t truncated_at = 0;
};

TraceExtractSummary cmd_trace_extract(const TraceExtractOptions& opt);

// dataset scan --------------------------------------------------------------

struct ScanOptions {
  fs::path root;
  fs::path output;
  std::uint64_t seed = 0;
};

ScanResult cmd_dataset_scan(const ScanOptions& opt, const Console& io);

// Shared helpers ------------------------------------------------------------

// Receiver-side view of a dataset record: SRS layout from meta.txt, or the
// 38.16 MHz system defaults when the record carries no sidecar.
struct RecordLayout {
  NumerologyConfig numerology;
  int start_re = 144;
  int comb_size = 2;
  int num_subcarriers = 624;
};

RecordLayout record_layout(const DatasetRecord& rec);

// Combines all snapshots of a record coherently and builds the estimate.
ChannelEstimate record_estimate(const DatasetRecord& rec, const RecordLayout& layout,
                                ImpulseSource source, int* snapshots = nullptr);

std::string format_double(double v, int precision = 9);

}  // namespace nrpos::cli
