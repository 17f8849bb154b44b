// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "app.hpp"

#include <CLI11.hpp>

#include <map>
#include <ostream>

#include "commands.hpp"
#include "nrpos/error.hpp"

namespace nrpos::cli {
namespace {

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"5G NR ranging toolkit: signals, simulation, ToA estimation, traces",
               "nrpos"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nrpos 0.1.0");

  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed, echoed in output headers");

  const Console io{out, err};
  std::function<int()> action;

  // generate
  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Map SRS, PRS or PRACH onto a grid");
  generate->add_option("--kind", gen.kind, "srs, prs or prach")->required();
  generate->add_option("--config", gen.config, "key=value signal config");
  generate->add_option("--output", gen.output, "txdataF output")->required();
  generate->add_option("--re-map", gen.re_map, "RE map CSV (default: output.csv)");
  generate->callback([&] {
    action = [&] {
      gen.seed = seed;
      const auto s = cmd_generate(gen);
      out << "mapped " << s.mapped_res << " REs on " << s.grid_symbols << " symbol(s)\n"
          << "wrote " << s.output.string() << " and " << s.re_map.string() << "\n";
      return kExitOk;
    };
  });

  // simulate, also reachable as `dataset make`
  SimulateOptions sim;
  auto add_simulate = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", sim.scenario, "key=value scenario file");
    cmd->add_option("--output", sim.output, "dataset root to write")->required();
    cmd->add_option("--jobs", sim.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd->callback([&] {
      action = [&] {
        if (seed_opt->count() > 0) sim.seed = seed;
        const auto s = cmd_simulate(sim);
        out << "# nrpos simulate seed=" << s.seed << "\n";
        for (const auto& p : s.points) {
          out << p.folder.string() << " snr_db=" << format_double(p.snr_db)
              << " amplitude=" << p.amplitude << "\n";
        }
        return kExitOk;
      };
    });
  };
  add_simulate(app.add_subcommand("simulate", "Simulate the ranging sweep into a dataset"));

  // estimate
  EstimateOptions est;
  const std::map<std::string, PeakRefinement> refinements{
      {"parabolic-log", PeakRefinement::kParabolicLog},
      {"parabolic-power", PeakRefinement::kParabolicPower},
      {"band-limited", PeakRefinement::kBandLimited}};
  const std::map<std::string, ImpulseSource> sources{
      {"interp", ImpulseSource::kInterpolated}, {"comb", ImpulseSource::kComb}};
  const std::map<std::string, PeakMode> modes{
      {"strongest", PeakMode::kStrongest}, {"first", PeakMode::kFirstAboveThreshold}};
  auto* estimate = app.add_subcommand("estimate", "ToA and range for every record");
  estimate->add_option("--root", est.root, "dataset root or record folder")->required();
  estimate->add_option("--output", est.output, "CSV output (default: stdout)");
  estimate->add_option("--refine", est.refinement, "peak refinement")
      ->transform(CLI::CheckedTransformer(refinements));
  estimate->add_option("--impulse", est.source, "impulse from interp or comb")
      ->transform(CLI::CheckedTransformer(sources));
  estimate->add_option("--peak", est.mode, "strongest or first")
      ->transform(CLI::CheckedTransformer(modes));
  estimate->add_option("--threshold-db", est.threshold_db, "reliability threshold");
  estimate->add_option("--bias-samples", est.bias_samples, "front-end delay to remove");
  estimate->add_option("--jobs", est.jobs, "worker threads")->check(CLI::PositiveNumber);
  estimate->callback([&] {
    action = [&] {
      est.seed = seed;
      const auto s = cmd_estimate(est, io);
      print_warnings(s.warnings, err);
      err << s.rows.size() << " record(s) estimated, " << s.failed << " skipped\n";
      return s.failed > 0 && s.rows.empty() ? kExitData : kExitOk;
    };
  });

  // metrics
  MetricsOptions met;
  auto* metrics = app.add_subcommand("metrics", "Per-RE power in dBm and SNR");
  auto* m_root = metrics->add_option("--root", met.root, "dataset root (receive side)");
  auto* m_tx = metrics->add_option("--txdataF", met.txdataF, "generated grid (transmit side)");
  m_root->excludes(m_tx);
  metrics->add_option("--output", met.output, "CSV output (default: stdout)");
  metrics->add_option("--device", met.device, "usrp or oran");
  metrics->add_option("--fft-size", met.fft_size, "grid width of --txdataF");
  metrics->add_option("--g-t", met.g_t, "transmit gain override, dB");
  metrics->add_option("--g-r", met.g_r, "receive gain override, dB");
  metrics->add_option("--g-t-cal", met.g_t_cal, "TX calibration override, dB");
  metrics->add_option("--g-r-cal", met.g_r_cal, "RX calibration override, dB");
  metrics->callback([&] {
    action = [&] {
      met.seed = seed;
      const auto s = cmd_metrics(met, io);
      print_warnings(s.warnings, err);
      return s.failed > 0 && s.rows.empty() ? kExitData : kExitOk;
    };
  });

  // trace record / extract
  auto* trace = app.add_subcommand("trace", "Record or extract binary traces");
  trace->require_subcommand(1);
  TraceRecordOptions rec;
  auto* record = trace->add_subcommand("record", "Replay IQ buffers into a trace");
  record->add_option("--defs", rec.defs, "message definition file")->required();
  record->add_option("--output", rec.output, "trace file to write")->required();
  record->add_option("--id", rec.id, "message ID")->required();
  record->add_option("--field", rec.field, "buffer field to fill")->required();
  record->add_option("--from", rec.from, "record folder or raw IQ file")->required();
  record->add_option("--chunk", rec.chunk_bytes, "bytes per event");
  record->add_option("--queue", rec.queue_capacity, "recorder queue capacity");
  record->callback([&] {
    action = [&] {
      const auto s = cmd_trace_record(rec);
      out << "# nrpos trace-record seed=" << seed << "\n"
          << "events=" << s.events << " written=" << s.written
          << " rejected=" << s.rejected << " dropped=" << s.dropped << "\n";
      return kExitOk;
    };
  });
  TraceExtractOptions ext;
  auto* extract = trace->add_subcommand("extract", "Concatenate one field of one message");
  extract->add_option("--defs", ext.defs, "message definition file")->required();
  extract->add_option("--id", ext.id, "message ID")->required();
  extract->add_option("--field", ext.field, "field to extract")->required();
  extract->add_option("--output", ext.output, "raw output file")->required();
  extract->add_option("trace", ext.trace, "trace file")->required();
  extract->callback([&] {
    action = [&] {
      const auto s = cmd_trace_extract(ext);
      out << "# nrpos trace-extract seed=" << seed << "\n"
          << "matched=" << s.matched << " bytes=" << s.bytes << "\n";
      if (s.truncated) {
        err << "warning: trace truncated at byte " << s.truncated_at << "\n";
      }
      return kExitOk;
    };
  });

  // dataset make / scan
  auto* dataset = app.add_subcommand("dataset", "Create or inventory dataset folders");
  dataset->require_subcommand(1);
  add_simulate(dataset->add_subcommand("make", "Same as simulate"));
  ScanOptions scan;
  auto* scan_cmd = dataset->add_subcommand("scan", "List records with distance and gain");
  scan_cmd->add_option("--root", scan.root, "dataset root")->required();
  scan_cmd->add_option("--output", scan.output, "CSV output (default: stdout)");
  scan_cmd->callback([&] {
    action = [&] {
      scan.seed = seed;
      const auto s = cmd_dataset_scan(scan, io);
      print_warnings(s.warnings, err);
      return kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace nrpos::cli
