// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "config.hpp"
#include "nrpos/error.hpp"
#include "nrpos/metrics.hpp"
#include "nrpos/ofdm.hpp"
#include "nrpos/refsig.hpp"
#include "nrpos/simchan.hpp"
#include "nrpos/tracefmt.hpp"

namespace nrpos::cli {
namespace {

// Runs fn(0..count-1) on up to `jobs` threads. Results are indexed by the
// caller, so completion order never leaks into the output. The exception of
// the lowest failing index wins.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  if (jobs < 1) throw UsageError("--jobs must be >= 1");
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

KeyValueConfig load_optional(const fs::path& path) {
  if (path.empty()) return KeyValueConfig({}, "defaults");
  return KeyValueConfig::load(path);
}

void emit_csv(const std::string& text, const fs::path& output, const Console& io) {
  if (output.empty()) {
    io.out << text;
    return;
  }
  write_file_bytes(output, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                     text.size()));
}

std::string relative_name(const fs::path& path, const fs::path& root) {
  if (path == root) return path.filename().string();
  auto rel = path.lexically_relative(root);
  return rel.empty() ? path.string() : rel.generic_string();
}

// Record folders under root; root itself counts when it holds srs_chF.raw.
std::vector<fs::path> record_folders(const fs::path& root,
                                     std::vector<std::string>& warnings) {
  if (!fs::exists(root)) {
    throw Error(Errc::kMissingFile, "dataset root " + root.string() + " not found");
  }
  if (fs::exists(root / kChFFile)) return {root};
  auto scan = scan_dataset(root);
  warnings.insert(warnings.end(), scan.warnings.begin(), scan.warnings.end());
  std::vector<fs::path> out;
  for (const auto& e : scan.entries) out.push_back(e.path);
  if (out.empty()) warnings.push_back("no dataset records under " + root.string());
  return out;
}

const char* refinement_name(PeakRefinement r) {
  switch (r) {
    case PeakRefinement::kParabolicPower: return "parabolic-power";
    case PeakRefinement::kParabolicLog: return "parabolic-log";
    case PeakRefinement::kBandLimited: return "band-limited";
  }
  return "?";
}

std::size_t mapped_symbols(const ReferenceSignal& sig) {
  int last = 0;
  for (const auto& loc : sig.re_indices) last = std::max(last, loc.symbol);
  return static_cast<std::size_t>(last) + 1;
}

DeviceProfile device_profile(const MetricsOptions& opt) {
  DeviceProfile dev;
  if (opt.device == "usrp" || opt.device == "usrp_b210") {
    dev = usrp_b210_profile();
  } else if (opt.device == "oran" || opt.device == "oran_vvdn") {
    dev = oran_vvdn_profile();
  } else {
    throw UsageError("unknown device '" + opt.device + "' (usrp or oran)");
  }
  if (opt.g_t) dev.g_t = *opt.g_t;
  if (opt.g_r) dev.g_r = *opt.g_r;
  if (opt.g_t_cal) dev.g_t_cal = *opt.g_t_cal;
  if (opt.g_r_cal) dev.g_r_cal = *opt.g_r_cal;
  return dev;
}

}  // namespace

std::string format_double(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

// generate -------------------------------------------------------------------

GenerateSummary cmd_generate(const GenerateOptions& opt) {
  if (opt.kind != "srs" && opt.kind != "prs" && opt.kind != "prach") {
    throw UsageError("unknown signal kind '" + opt.kind + "' (srs, prs or prach)");
  }
  if (opt.output.empty()) throw UsageError("--output is required");
  auto cfg = load_optional(opt.config);
  const auto nm = read_numerology(cfg);
  const int amplitude = cfg.get_int("amplitude", usrp_b210_profile().amp.linear());

  ReferenceSignal sig;
  if (opt.kind == "srs") {
    SrsConfig c;
    c.comb_size = cfg.get_int("comb_size", c.comb_size);
    c.num_subcarriers = cfg.get_int("num_subcarriers", c.num_subcarriers);
    c.start_re = cfg.get_int("start_re", c.start_re);
    c.zc_root = cfg.get_int("zc_root", c.zc_root);
    c.cyclic_shift = cfg.get_int("cyclic_shift", c.cyclic_shift);
    c.symbol = cfg.get_int("symbol", c.symbol);
    cfg.reject_unused();
    sig = generate_srs(c, nm);
  } else if (opt.kind == "prs") {
    PrsConfig c;
    c.num_prb = cfg.get_int("num_prb", c.num_prb);
    c.num_symbols = cfg.get_int("num_symbols", c.num_symbols);
    const auto seed = cfg.get_u64("gold_seed", c.gold_seed);
    if (seed >= (1ull << 31)) {
      throw Error(Errc::kConfig, "gold_seed must fit in 31 bits");
    }
    c.gold_seed = static_cast<std::uint32_t>(seed);
    c.comb_size = cfg.get_int("comb_size", c.comb_size);
    c.re_offset = cfg.get_int("re_offset", c.re_offset);
    c.start_re = cfg.get_int("start_re", nm.first_occupied());
    c.first_symbol = cfg.get_int("first_symbol", c.first_symbol);
    cfg.reject_unused();
    sig = generate_prs(c, nm);
  } else {
    PrachConfig c;
    c.format = parse_prach_format(cfg.get_string("format", "F0"));
    c.zc_root = cfg.get_int("zc_root", c.zc_root);
    c.cyclic_shift = cfg.get_int("cyclic_shift", c.cyclic_shift);
    c.zone_width = cfg.get_int("zone_width", c.zone_width);
    c.cp_len = cfg.get_int("prach_cp_len", c.cp_len);
    // Centred on DC unless told otherwise.
    c.start_re = cfg.get_int("start_re", nm.fft_size / 2 - c.sequence_length() / 2);
    c.symbol = cfg.get_int("symbol", c.symbol);
    cfg.reject_unused();
    sig = generate_prach(c);
  }

  const auto symbols = static_cast<int>(mapped_symbols(sig));
  const auto grid =
      grid_map(ResourceGrid(symbols, nm.fft_size), sig, Amplitude(amplitude), nm);
  write_file_bytes(opt.output, serialize_txdataF(grid));

  GenerateSummary out;
  out.mapped_res = sig.re_indices.size();
  out.grid_symbols = symbols;
  out.output = opt.output;
  out.re_map = opt.re_map;
  if (out.re_map.empty()) {
    out.re_map = fs::path(opt.output).replace_extension(".csv");
    if (out.re_map == opt.output) out.re_map += ".re_map.csv";
  }

  std::ostringstream csv;
  csv << "# nrpos generate kind=" << opt.kind << " seed=" << opt.seed
      << " mapped_res=" << out.mapped_res << "\n";
  csv << "symbol,subcarrier,fft_bin,i,q\n";
  for (const auto& loc : sig.re_indices) {
    const auto v = grid.at(loc);
    csv << loc.symbol << ',' << loc.subcarrier << ','
        << fft_bin(loc.subcarrier, nm.fft_size) << ',' << v.i << ',' << v.q << '\n';
  }
  const auto text = csv.str();
  write_file_bytes(out.re_map, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                         text.size()));
  return out;
}

// simulate -------------------------------------------------------------------

SimulateSummary cmd_simulate(const SimulateOptions& opt) {
  if (opt.output.empty()) throw UsageError("--output is required");
  if (opt.jobs < 1) throw UsageError("--jobs must be >= 1");
  auto cfg = load_optional(opt.scenario);

  RttScenario base;
  base.numerology = read_numerology(cfg);
  const auto distances = cfg.get_doubles("distances", {7, 8, 9, 10, 11});
  const auto attenuations = cfg.get_doubles("attenuations", {0});
  const double snr_at_max = cfg.get_double("snr_at_max_gain_db", 25.0);
  base.num_snapshots = cfg.get_int("num_snapshots", 10);
  const auto file_seed = cfg.get_u64("seed", 1);
  const int amplitude = cfg.get_int("amplitude", base.amp.linear());
  base.bias_samples = cfg.get_double("bias_samples", 0.0);
  base.srs.start_re = cfg.get_int("srs_start_re", base.srs.start_re);
  base.srs.comb_size = cfg.get_int("srs_comb_size", base.srs.comb_size);
  base.srs.num_subcarriers = cfg.get_int("srs_num_subcarriers", base.srs.num_subcarriers);
  base.srs.zc_root = cfg.get_int("zc_root", base.srs.zc_root);
  base.srs.cyclic_shift = cfg.get_int("cyclic_shift", base.srs.cyclic_shift);
  cfg.reject_unused();

  if (distances.empty() || attenuations.empty()) {
    throw Error(Errc::kScenario, "distances and attenuations must be non-empty");
  }
  for (double x : attenuations) {
    if (!(x >= 0.0)) throw Error(Errc::kScenario, "attenuations must be >= 0 dB");
  }

  SimulateSummary summary;
  summary.seed = opt.seed.value_or(file_seed);
  CounterRng seeds(summary.seed);
  std::set<std::string> names;
  for (double d : distances) {
    for (double x : attenuations) {
      SimulatedPoint p;
      p.distance_m = d;
      p.attenuation_db = x;
      // Attenuation scales the transmitted amplitude against a fixed noise
      // floor, so the per-RE SNR drops dB for dB.
      p.snr_db = snr_at_max - x;
      p.amplitude = static_cast<int>(std::lround(amplitude * std::pow(10.0, -x / 20.0)));
      if (p.amplitude < 1) {
        throw Error(Errc::kScenario, "attenuation " + format_double(x) +
                                         " dB leaves no signal amplitude");
      }
      p.seed = seeds.next_u64();
      const auto name = folder_name(d, kMaxTxGainDb - x);
      if (!names.insert(name).second) {
        throw Error(Errc::kScenario, "grid point " + name + " appears twice");
      }
      p.folder = opt.output / name;
      summary.points.push_back(p);
    }
  }

  // Simulate everything before touching the output tree so a bad grid point
  // leaves nothing half written.
  std::vector<DatasetRecord> records(summary.points.size());
  parallel_for(records.size(), opt.jobs, [&](std::size_t i) {
    const auto& p = summary.points[i];
    RttScenario sc = base;
    sc.distance_m = p.distance_m;
    sc.snr_db = p.snr_db;
    sc.seed = p.seed;
    sc.amp = Amplitude(p.amplitude);
    const auto snaps = simulate_rtt_exchange(sc);
    records[i] = to_dataset_record(sc, snaps, kMaxTxGainDb - p.attenuation_db);
    records[i].meta["attenuation_db"] = format_double(p.attenuation_db, 17);
  });

  std::error_code ec;
  fs::create_directories(opt.output, ec);
  if (ec) throw Error(Errc::kIo, "cannot create " + opt.output.string() + ": " + ec.message());
  for (const auto& rec : records) write_record(rec, opt.output);
  return summary;
}

// estimate -------------------------------------------------------------------

RecordLayout record_layout(const DatasetRecord& rec) {
  KeyValueConfig meta(rec.meta, "meta.txt");
  RecordLayout layout;
  layout.numerology = read_numerology(meta);
  layout.start_re = meta.get_int("srs_start_re", layout.start_re);
  layout.comb_size = meta.get_int("srs_comb_size", layout.comb_size);
  layout.num_subcarriers = meta.get_int("srs_num_subcarriers", layout.num_subcarriers);
  if (layout.comb_size < 1 || layout.num_subcarriers < 1) {
    throw Error(Errc::kConfig, "meta.txt: bad SRS layout");
  }
  return layout;
}

ChannelEstimate record_estimate(const DatasetRecord& rec, const RecordLayout& layout,
                                ImpulseSource source, int* snapshots) {
  const auto per_snapshot = static_cast<std::size_t>(layout.num_subcarriers);
  const auto comb = split_snapshots(rec.srs_chF, per_snapshot);
  const auto m = comb.size();
  if (snapshots) *snapshots = static_cast<int>(m);

  PowerReport noise;
  if (!rec.noise.empty() && rec.noise.size() % m == 0) {
    noise = power_per_re(combine_coherent(split_snapshots(rec.noise, rec.noise.size() / m)));
  } else {
    // Noise not stored per snapshot: averaging M independent blocks divides
    // the per-RE power by M.
    noise = power_per_re(rec.noise);
    noise.p_linear /= static_cast<double>(m);
  }
  const CombLayout comb_layout{layout.start_re, layout.comb_size,
                               layout.numerology.fft_size};
  return build_channel_estimate(combine_coherent(comb), noise, comb_layout, source);
}

EstimateSummary cmd_estimate(const EstimateOptions& opt, const Console& io) {
  EstimateSummary summary;
  const auto folders = record_folders(opt.root, summary.warnings);

  struct Slot {
    std::optional<EstimateRow> row;
    std::vector<std::string> warnings;
  };
  std::vector<Slot> slots(folders.size());
  parallel_for(folders.size(), opt.jobs, [&](std::size_t i) {
    const auto name = relative_name(folders[i], opt.root);
    auto& slot = slots[i];
    try {
      auto rec = read_record(folders[i], 0);
      for (const auto& w : rec.warnings) slot.warnings.push_back(name + ": " + w);
      const auto layout = record_layout(rec);
      EstimateRow row;
      row.file = name;
      const auto est = record_estimate(rec, layout, opt.source, &row.snapshots);
      ToaOptions toa;
      toa.refinement = opt.refinement;
      toa.mode = opt.mode;
      toa.threshold_db = opt.threshold_db;
      const auto range = estimate_range(est, layout.numerology, toa, opt.bias_samples);
      row.toa = range.toa;
      row.range_m = range.range_m;
      slot.row = row;
    } catch (const Error& e) {
      slot.warnings.push_back("skipping " + name + ": " + e.what());
    }
  });

  for (auto& slot : slots) {
    summary.warnings.insert(summary.warnings.end(), slot.warnings.begin(),
                            slot.warnings.end());
    if (slot.row) {
      summary.rows.push_back(std::move(*slot.row));
    } else {
      ++summary.failed;
    }
  }

  std::ostringstream csv;
  csv << "# nrpos estimate seed=" << opt.seed << " impulse="
      << (opt.source == ImpulseSource::kComb ? "comb" : "interp")
      << " refine=" << refinement_name(opt.refinement)
      << " bias_samples=" << format_double(opt.bias_samples) << "\n";
  csv << "file,peak_index,frac_offset,toa_ns,range_m,peak_to_noise_db,reliable\n";
  for (const auto& r : summary.rows) {
    csv << r.file << ',' << r.toa.peak_index << ',' << format_double(r.toa.frac_offset)
        << ',' << format_double(r.toa.toa_seconds * 1e9) << ','
        << format_double(r.range_m) << ',' << format_double(r.toa.peak_to_noise_db)
        << ',' << (r.toa.reliable ? "true" : "false") << '\n';
  }
  emit_csv(csv.str(), opt.output, io);
  return summary;
}

// metrics --------------------------------------------------------------------

MetricsSummary cmd_metrics(const MetricsOptions& opt, const Console& io) {
  if (opt.root.empty() == opt.txdataF.empty()) {
    throw UsageError("metrics needs exactly one of --root or --txdataF");
  }
  const auto dev = device_profile(opt);
  MetricsSummary summary;

  if (!opt.txdataF.empty()) {
    if (!fs::exists(opt.txdataF)) {
      throw Error(Errc::kMissingFile, opt.txdataF.string() + " not found");
    }
    const auto grid = deserialize_txdataF(read_file_bytes(opt.txdataF), opt.fft_size);
    IqBufferQ15 mapped;
    for (const auto& v : grid.cells()) {
      if (v != SampleQ15{}) mapped.push_back(v);
    }
    if (mapped.empty()) throw Error(Errc::kDomain, opt.txdataF.string() + " maps no REs");
    const auto p = power_per_re(mapped);
    summary.rows.push_back({opt.txdataF.filename().string(), p.n_res, p.p_linear,
                            tx_power_dbm(p, dev), std::nullopt});
  } else {
    for (const auto& folder : record_folders(opt.root, summary.warnings)) {
      const auto name = relative_name(folder, opt.root);
      try {
        const auto rec = read_record(folder, 0);
        for (const auto& w : rec.warnings) summary.warnings.push_back(name + ": " + w);
        const auto p_r = power_per_re(rec.srs_chF);
        MetricsRow row{name, p_r.n_res, p_r.p_linear, rx_power_dbm(p_r, dev), std::nullopt};
        if (!rec.noise.empty()) {
          try {
            row.snr = estimate_snr(p_r, power_per_re(rec.noise));
          } catch (const Error& e) {
            summary.warnings.push_back(name + ": no SNR: " + e.what());
          }
        }
        summary.rows.push_back(row);
      } catch (const Error& e) {
        summary.warnings.push_back("skipping " + name + ": " + e.what());
        ++summary.failed;
      }
    }
  }

  std::ostringstream csv;
  csv << "# nrpos metrics seed=" << opt.seed << " device=" << dev.name
      << " g_t=" << format_double(dev.g_t) << " g_r=" << format_double(dev.g_r)
      << " g_t_cal=" << format_double(dev.g_t_cal)
      << " g_r_cal=" << format_double(dev.g_r_cal) << "\n";
  csv << "file,re_count,p_linear,p_dbm,snr_db\n";
  for (const auto& r : summary.rows) {
    csv << r.file << ',' << r.re_count << ',' << format_double(r.p_linear) << ','
        << format_double(r.p_dbm) << ',';
    if (r.snr) csv << format_double(r.snr->db);
    csv << '\n';
  }
  emit_csv(csv.str(), opt.output, io);
  return summary;
}

// trace ----------------------------------------------------------------------

namespace {

std::vector<TraceMessageDef> load_defs(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(Errc::kMissingFile, "definition file " + path.string() + " not found");
  }
  const auto bytes = read_file_bytes(path);
  try {
    return parse_message_defs(std::string_view(
        reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.what());
  }
}

}  // namespace

TraceRecordSummary cmd_trace_record(const TraceRecordOptions& opt) {
  const auto defs = load_defs(opt.defs);
  const auto* def = find_message(defs, opt.id);
  if (def == nullptr) throw Error(Errc::kLookup, "unknown trace ID " + opt.id);
  std::size_t target = def->fields.size();
  for (std::size_t i = 0; i < def->fields.size(); ++i) {
    if (def->fields[i].name == opt.field) target = i;
  }
  if (target == def->fields.size()) {
    throw Error(Errc::kLookup, "message " + opt.id + " has no field " + opt.field);
  }
  if (def->fields[target].kind != FieldKind::kBuffer) {
    throw Error(Errc::kConfig, "field " + opt.field + " is not a buffer");
  }

  // A record folder replays its comb estimates one SRS snapshot per event.
  fs::path source = opt.from;
  std::size_t chunk = opt.chunk_bytes;
  if (fs::is_directory(source)) {
    if (chunk == 0) {
      const auto meta = source / kMetaFile;
      int res = 624;
      if (fs::exists(meta)) {
        const auto bytes = read_file_bytes(meta);
        KeyValueConfig kv(parse_key_values(std::string(bytes.begin(), bytes.end())),
                          meta.string());
        res = kv.get_int("srs_num_subcarriers", res);
      }
      chunk = static_cast<std::size_t>(res) * 4;
    }
    source /= kChFFile;
  }
  if (chunk == 0) chunk = 624 * 4;
  if (!fs::exists(source)) throw Error(Errc::kMissingFile, source.string() + " not found");
  const auto data = read_file_bytes(source);

  TraceRecordSummary summary;
  summary.events = (data.size() + chunk - 1) / chunk;

  std::ofstream out(opt.output, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot write " + opt.output.string());
  TraceWriter writer(out, defs);
  {
    const auto capacity =
        opt.queue_capacity ? opt.queue_capacity : std::max<std::size_t>(summary.events, 1);
    TraceRecorder recorder(capacity, [&writer](const TraceEvent& ev) { writer.write(ev); });
    for (std::size_t e = 0; e < summary.events; ++e) {
      TraceEvent ev;
      ev.numeric_id = def->numeric_id;
      for (std::size_t f = 0; f < def->fields.size(); ++f) {
        if (f == target) {
          const auto begin = data.begin() + static_cast<std::ptrdiff_t>(e * chunk);
          const auto end = data.begin() +
                           static_cast<std::ptrdiff_t>(std::min(data.size(), (e + 1) * chunk));
          ev.payload.emplace_back(TraceBytes(begin, end));
        } else if (def->fields[f].kind == FieldKind::kInt) {
          ev.payload.emplace_back(static_cast<std::int64_t>(e));
        } else {
          ev.payload.emplace_back(TraceBytes{});
        }
      }
      recorder.emit(std::move(ev));
    }
    recorder.stop();
    summary.dropped = recorder.dropped();
  }
  out.flush();
  if (!out) throw Error(Errc::kIo, "short write to " + opt.output.string());
  summary.written = writer.written();
  summary.rejected = writer.rejected();
  return summary;
}

TraceExtractSummary cmd_trace_extract(const TraceExtractOptions& opt) {
  const auto defs = load_defs(opt.defs);
  if (!fs::exists(opt.trace)) {
    throw Error(Errc::kMissingFile, "trace " + opt.trace.string() + " not found");
  }
  const auto bytes = read_file_bytes(opt.trace);
  TraceExtractSummary summary;
  ExtractResult res;
  if (bytes.empty()) {
    // A tracer that never started leaves a zero-length file; treat it as an
    // empty trace once the lookup itself is known to be valid.
    std::vector<std::uint8_t> header(kTraceMagic, kTraceMagic + 4);
    header.push_back(static_cast<std::uint8_t>(kTraceVersion & 0xFF));
    header.push_back(static_cast<std::uint8_t>(kTraceVersion >> 8));
    res = extract(header, opt.id, opt.field, defs);
  } else {
    res = extract(bytes, opt.id, opt.field, defs);
  }
  write_file_bytes(opt.output, res.data);
  summary.bytes = res.data.size();
  summary.matched = res.matched;
  summary.truncated = res.truncated;
  summary.truncated_at = res.truncated_at;
  return summary;
}

// dataset scan ---------------------------------------------------------------

ScanResult cmd_dataset_scan(const ScanOptions& opt, const Console& io) {
  if (!fs::exists(opt.root)) {
    throw Error(Errc::kMissingFile, "dataset root " + opt.root.string() + " not found");
  }
  auto result = scan_dataset(opt.root);
  std::ostringstream csv;
  csv << "# nrpos dataset-scan seed=" << opt.seed << "\n";
  csv << "path,distance_m,attenuation_db,tx_gain_db\n";
  for (const auto& e : result.entries) {
    csv << relative_name(e.path, opt.root) << ',' << format_double(e.info.distance_m)
        << ',' << format_double(e.info.attenuation_db) << ','
        << format_double(e.info.tx_gain_db) << '\n';
  }
  emit_csv(csv.str(), opt.output, io);
  return result;
}

}  // namespace nrpos::cli
