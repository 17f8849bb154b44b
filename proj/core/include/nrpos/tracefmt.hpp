// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

// Lightweight instrumentation traces.
//
// Message definitions are plain text:
//
//   # comment
//   ID = GNB_PHY_UL_FREQ_CHANNEL_ESTIMATE
//       DESC = gNB channel estimates in the frequency domain
//       GROUP = ALL:PHY:GNB
//       FORMAT = int,frame : int,slot : buffer,chest_f
//
// Field kinds are `int` and `buffer`. Messages get numeric ids in file order.
//
// Trace files are little-endian:
//
//   "NRPT" u16 version
//   repeated: u32 numeric_id, u64 timestamp_ns, then per field in definition
//             order either i64 (int) or u32 length + bytes (buffer)
//
// The layout is this library's own; it does not read OAI T tracer files.

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

namespace nrpos {

enum class FieldKind { kInt, kBuffer };

struct TraceFieldDef {
  std::string name;
  FieldKind kind = FieldKind::kInt;
};

struct TraceMessageDef {
  std::string id;
  std::string group;
  std::string description;
  std::vector<TraceFieldDef> fields;
  std::uint32_t numeric_id = 0;
  std::size_t line = 0;  // line of the ID entry
};

// Throws ParseError (with line number) on malformed input, unknown keys or
// kinds, duplicate IDs or duplicate field names.
std::vector<TraceMessageDef> parse_message_defs(std::string_view text);

const TraceMessageDef* find_message(std::span<const TraceMessageDef> defs,
                                    std::string_view id) noexcept;

using TraceBytes = std::vector<std::uint8_t>;
using FieldValue = std::variant<std::int64_t, TraceBytes>;

struct TraceEvent {
  std::uint32_t numeric_id = 0;
  std::uint64_t timestamp_ns = 0;
  std::vector<FieldValue> payload;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

bool conforms(const TraceEvent& event, std::span<const TraceMessageDef> defs);

inline constexpr char kTraceMagic[4] = {'N', 'R', 'P', 'T'};
inline constexpr std::uint16_t kTraceVersion = 1;
inline constexpr std::size_t kTraceHeaderSize = 6;

// Writes the file header on construction and one frame per accepted event.
class TraceWriter {
 public:
  TraceWriter(std::ostream& out, std::vector<TraceMessageDef> defs);

  // Returns false (and counts a rejection) for nonconforming events.
  bool write(const TraceEvent& event);

  std::size_t written() const noexcept { return written_; }
  std::size_t rejected() const noexcept { return rejected_; }

 private:
  std::ostream& out_;
  std::vector<TraceMessageDef> defs_;
  std::size_t written_ = 0;
  std::size_t rejected_ = 0;
};

struct RecordStats {
  std::size_t written = 0;
  std::size_t rejected = 0;
};

RecordStats record(std::span<const TraceEvent> events,
                   std::span<const TraceMessageDef> defs, std::ostream& out);

struct DecodedTrace {
  std::vector<TraceEvent> events;
  bool truncated = false;
  std::uint64_t truncated_at = 0;  // byte offset of the incomplete frame
};

// Throws Errc::kParse for a missing or foreign header.
DecodedTrace read_trace(std::span<const std::uint8_t> trace,
                        std::span<const TraceMessageDef> defs);

struct ExtractResult {
  TraceBytes data;
  std::size_t matched = 0;
  bool truncated = false;
  std::uint64_t truncated_at = 0;
};

// Concatenates one field of every event with the given id: buffer bytes as
// stored, ints as little-endian i64. Throws Errc::kLookup for an unknown id
// or field.
ExtractResult extract(std::span<const std::uint8_t> trace, std::string_view id,
                      std::string_view field,
                      std::span<const TraceMessageDef> defs);

// Decouples a real-time producer from trace output through a bounded
// single-producer/single-consumer ring. emit() never blocks: when the ring is
// full the event is dropped and counted. A background thread drains the ring
// into the sink.
class TraceRecorder {
 public:
  using Sink = std::function<void(const TraceEvent&)>;

  TraceRecorder(std::size_t capacity, Sink sink);
  ~TraceRecorder();

  TraceRecorder(const TraceRecorder&) = delete;
  TraceRecorder& operator=(const TraceRecorder&) = delete;

  // Producer side; call from one thread only. Stamps the event with the
  // monotonic clock. Returns false if the event was dropped.
  bool emit(TraceEvent event);

  // Drains what is queued and joins the consumer. Idempotent.
  void stop();

  std::uint64_t dropped() const noexcept { return dropped_.load(); }
  std::uint64_t delivered() const noexcept { return delivered_.load(); }
  std::size_t capacity() const noexcept { return slots_.size(); }

 private:
  void drain_loop(std::stop_token stop);

  std::vector<TraceEvent> slots_;
  std::size_t mask_;
  Sink sink_;
  alignas(64) std::atomic<std::size_t> head_{0};  // next slot to consume
  alignas(64) std::atomic<std::size_t> tail_{0};  // next slot to fill
  std::atomic<std::uint64_t> dropped_{0};
  std::atomic<std::uint64_t> delivered_{0};
  std::jthread consumer_;
};

}  // namespace nrpos
