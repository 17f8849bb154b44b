// Copyright 2026 The nrpos Authors
// SPDX-License-Identifier: Apache-2.0

#include "nrpos/tracefmt.hpp"

#include <bit>
#include <chrono>
#include <cstring>
#include <map>
#include <ostream>

#include "nrpos/error.hpp"

namespace nrpos {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  };
  if (!alpha(s.front())) return false;
  for (char c : s) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

std::vector<TraceFieldDef> parse_format(std::string_view value,
                                        std::size_t line) {
  std::vector<TraceFieldDef> fields;
  if (trim(value).empty()) return fields;
  std::size_t start = 0;
  while (true) {
    const auto colon = value.find(':', start);
    const auto item = trim(value.substr(
        start, colon == std::string_view::npos ? std::string_view::npos
                                               : colon - start));
    const auto comma = item.find(',');
    if (comma == std::string_view::npos) {
      throw ParseError(line, "FORMAT entry '" + std::string(item) +
                                 "' is not <kind>,<name>");
    }
    const auto kind = trim(item.substr(0, comma));
    const auto name = trim(item.substr(comma + 1));
    TraceFieldDef field;
    if (kind == "int") {
      field.kind = FieldKind::kInt;
    } else if (kind == "buffer") {
      field.kind = FieldKind::kBuffer;
    } else {
      throw ParseError(line, "unknown field kind '" + std::string(kind) + "'");
    }
    if (!is_identifier(name)) {
      throw ParseError(line, "invalid field name '" + std::string(name) + "'");
    }
    for (const auto& f : fields) {
      if (f.name == name) {
        throw ParseError(line, "duplicate field '" + std::string(name) + "'");
      }
    }
    field.name = std::string(name);
    fields.push_back(std::move(field));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  return fields;
}

void put_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void append_u64(TraceBytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// Bounds-checked little-endian reader over a trace buffer.
class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

  bool read(std::uint64_t& v, int bytes) {
    if (remaining() < static_cast<std::size_t>(bytes)) return false;
    v = 0;
    for (int i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    }
    pos_ += bytes;
    return true;
  }

  bool take(std::size_t n, std::span<const std::uint8_t>& out) {
    if (remaining() < n) return false;
    out = data_.subspan(pos_, n);
    pos_ += n;
    return true;
  }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

void check_header(Cursor& cur) {
  std::span<const std::uint8_t> magic;
  std::uint64_t version = 0;
  if (!cur.take(4, magic) || std::memcmp(magic.data(), kTraceMagic, 4) != 0 ||
      !cur.read(version, 2)) {
    throw Error(Errc::kParse, "not an NRPT trace (bad or missing header)");
  }
  if (version != kTraceVersion) {
    throw Error(Errc::kParse,
                "unsupported trace version " + std::to_string(version));
  }
}

// Walks every frame, handing each decoded event to visit. Returns false with
// the frame's start offset when the trace ends mid-frame or names an unknown
// message.
template <typename Visit>
bool walk(std::span<const std::uint8_t> trace,
          std::span<const TraceMessageDef> defs, std::uint64_t& stop_offset,
          Visit&& visit) {
  Cursor cur(trace);
  check_header(cur);
  while (cur.remaining() > 0) {
    const std::size_t frame_start = cur.offset();
    std::uint64_t id = 0;
    std::uint64_t ts = 0;
    if (!cur.read(id, 4) || !cur.read(ts, 8) || id >= defs.size()) {
      stop_offset = frame_start;
      return false;
    }
    TraceEvent ev;
    ev.numeric_id = static_cast<std::uint32_t>(id);
    ev.timestamp_ns = ts;
    for (const auto& field : defs[id].fields) {
      if (field.kind == FieldKind::kInt) {
        std::uint64_t v = 0;
        if (!cur.read(v, 8)) {
          stop_offset = frame_start;
          return false;
        }
        ev.payload.emplace_back(static_cast<std::int64_t>(v));
      } else {
        std::uint64_t len = 0;
        std::span<const std::uint8_t> bytes;
        if (!cur.read(len, 4) || !cur.take(len, bytes)) {
          stop_offset = frame_start;
          return false;
        }
        ev.payload.emplace_back(TraceBytes(bytes.begin(), bytes.end()));
      }
    }
    visit(std::move(ev));
  }
  return true;
}

}  // namespace

std::vector<TraceMessageDef> parse_message_defs(std::string_view text) {
  std::vector<TraceMessageDef> defs;
  std::map<std::string, std::size_t, std::less<>> id_lines;
  bool have_format = false;
  bool have_group = false;
  bool have_desc = false;

  auto finish = [&]() {
    if (!defs.empty() && !have_format) {
      throw ParseError(defs.back().line,
                       "ID " + defs.back().id + " has no FORMAT entry");
    }
  };

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, "expected KEY = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    if (key == "ID") {
      finish();
      if (!is_identifier(value)) {
        throw ParseError(line_no, "invalid ID '" + std::string(value) + "'");
      }
      if (auto it = id_lines.find(value); it != id_lines.end()) {
        throw ParseError(line_no, "duplicate ID " + std::string(value) +
                                      " (first defined on line " +
                                      std::to_string(it->second) + ")");
      }
      id_lines.emplace(std::string(value), line_no);
      TraceMessageDef def;
      def.id = std::string(value);
      def.numeric_id = static_cast<std::uint32_t>(defs.size());
      def.line = line_no;
      defs.push_back(std::move(def));
      have_format = have_group = have_desc = false;
      continue;
    }
    if (defs.empty()) {
      throw ParseError(line_no, std::string(key) + " before any ID");
    }
    auto& def = defs.back();
    auto once = [&](bool& seen) {
      if (seen) throw ParseError(line_no, "repeated " + std::string(key));
      seen = true;
    };
    if (key == "GROUP") {
      once(have_group);
      def.group = std::string(value);
    } else if (key == "DESC") {
      once(have_desc);
      def.description = std::string(value);
    } else if (key == "FORMAT") {
      once(have_format);
      def.fields = parse_format(value, line_no);
    } else {
      throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  finish();
  return defs;
}

const TraceMessageDef* find_message(std::span<const TraceMessageDef> defs,
                                    std::string_view id) noexcept {
  for (const auto& d : defs) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

bool conforms(const TraceEvent& event, std::span<const TraceMessageDef> defs) {
  if (event.numeric_id >= defs.size()) return false;
  const auto& def = defs[event.numeric_id];
  if (event.payload.size() != def.fields.size()) return false;
  for (std::size_t i = 0; i < def.fields.size(); ++i) {
    const bool is_int = std::holds_alternative<std::int64_t>(event.payload[i]);
    if (is_int != (def.fields[i].kind == FieldKind::kInt)) return false;
    if (!is_int &&
        std::get<TraceBytes>(event.payload[i]).size() > UINT32_MAX) {
      return false;
    }
  }
  return true;
}

TraceWriter::TraceWriter(std::ostream& out, std::vector<TraceMessageDef> defs)
    : out_(out), defs_(std::move(defs)) {
  out_.write(kTraceMagic, 4);
  put_u16(out_, kTraceVersion);
}

bool TraceWriter::write(const TraceEvent& event) {
  if (!conforms(event, defs_)) {
    ++rejected_;
    return false;
  }
  put_u32(out_, event.numeric_id);
  put_u64(out_, event.timestamp_ns);
  for (const auto& value : event.payload) {
    if (const auto* v = std::get_if<std::int64_t>(&value)) {
      put_u64(out_, static_cast<std::uint64_t>(*v));
    } else {
      const auto& bytes = std::get<TraceBytes>(value);
      put_u32(out_, static_cast<std::uint32_t>(bytes.size()));
      out_.write(reinterpret_cast<const char*>(bytes.data()),
                 static_cast<std::streamsize>(bytes.size()));
    }
  }
  if (!out_) throw Error(Errc::kIo, "trace write failed");
  ++written_;
  return true;
}

RecordStats record(std::span<const TraceEvent> events,
                   std::span<const TraceMessageDef> defs, std::ostream& out) {
  TraceWriter writer(out, {defs.begin(), defs.end()});
  for (const auto& ev : events) writer.write(ev);
  return {writer.written(), writer.rejected()};
}

DecodedTrace read_trace(std::span<const std::uint8_t> trace,
                        std::span<const TraceMessageDef> defs) {
  DecodedTrace out;
  out.truncated = !walk(trace, defs, out.truncated_at, [&](TraceEvent&& ev) {
    out.events.push_back(std::move(ev));
  });
  return out;
}

ExtractResult extract(std::span<const std::uint8_t> trace, std::string_view id,
                      std::string_view field,
                      std::span<const TraceMessageDef> defs) {
  const auto* def = find_message(defs, id);
  if (def == nullptr) {
    throw Error(Errc::kLookup, "unknown trace ID " + std::string(id));
  }
  std::size_t index = def->fields.size();
  for (std::size_t i = 0; i < def->fields.size(); ++i) {
    if (def->fields[i].name == field) index = i;
  }
  if (index == def->fields.size()) {
    throw Error(Errc::kLookup, "ID " + std::string(id) + " has no field " +
                                   std::string(field));
  }

  ExtractResult out;
  out.truncated = !walk(trace, defs, out.truncated_at, [&](TraceEvent&& ev) {
    if (ev.numeric_id != def->numeric_id) return;
    ++out.matched;
    const auto& value = ev.payload[index];
    if (const auto* v = std::get_if<std::int64_t>(&value)) {
      append_u64(out.data, static_cast<std::uint64_t>(*v));
    } else {
      const auto& bytes = std::get<TraceBytes>(value);
      out.data.insert(out.data.end(), bytes.begin(), bytes.end());
    }
  });
  return out;
}

TraceRecorder::TraceRecorder(std::size_t capacity, Sink sink)
    : slots_(std::bit_ceil(std::max<std::size_t>(capacity, 2))),
      mask_(slots_.size() - 1),
      sink_(std::move(sink)),
      consumer_([this](std::stop_token st) { drain_loop(st); }) {}

TraceRecorder::~TraceRecorder() { stop(); }

bool TraceRecorder::emit(TraceEvent event) {
  const auto tail = tail_.load(std::memory_order_relaxed);
  const auto head = head_.load(std::memory_order_acquire);
  if (tail - head >= slots_.size()) {
    dropped_.fetch_add(1, std::memory_order_relaxed);
    return false;
  }
  event.timestamp_ns = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
  slots_[tail & mask_] = std::move(event);
  tail_.store(tail + 1, std::memory_order_release);
  return true;
}

void TraceRecorder::stop() {
  if (consumer_.joinable()) {
    consumer_.request_stop();
    consumer_.join();
  }
}

void TraceRecorder::drain_loop(std::stop_token stop) {
  while (true) {
    const auto head = head_.load(std::memory_order_relaxed);
    const auto tail = tail_.load(std::memory_order_acquire);
    if (head == tail) {
      // Re-read the tail once stop is seen: an emit that raced the check
      // above must still be delivered.
      if (stop.stop_requested()) {
        if (tail_.load(std::memory_order_acquire) == head) return;
        continue;
      }
      std::this_thread::sleep_for(std::chrono::microseconds(50));
      continue;
    }
    TraceEvent ev = std::move(slots_[head & mask_]);
    head_.store(head + 1, std::memory_order_release);
    try {
      sink_(ev);
      delivered_.fetch_add(1, std::memory_order_relaxed);
    } catch (...) {
      dropped_.fetch_add(1, std::memory_order_relaxed);
    }
  }
}

}  // namespace nrpos
