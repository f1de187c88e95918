#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synesthete/chroma.hpp"

namespace synesthete {

inline constexpr std::uint8_t kLampSyncByte = 0x7E;
inline constexpr std::size_t kLampFrameSize = 5;

// Wire frame for the RGB LED controller: [0x7E, R, G, B, CK] with
// CK = (R + G + B) mod 256.
struct LampFrame {
  std::array<std::uint8_t, kLampFrameSize> bytes{};
};

LampFrame encode_frame(const RgbColor& color);

// Inverse of encode_frame. Throws BadFrameSize, BadSync, or BadChecksum.
RgbColor decode_frame(std::span<const std::uint8_t> bytes);

// Incremental decoder over a raw byte stream: drops bytes until a sync
// octet, validates checksums, and emits colors. Mirrors what controller
// firmware would run on the receiving end.
class StreamDecoder {
 public:
  // Feeds bytes; returns colors completed by this chunk, in order.
  std::vector<RgbColor> feed(std::span<const std::uint8_t> bytes);

  std::size_t sync_errors() const noexcept { return sync_errors_; }
  std::size_t checksum_errors() const noexcept { return checksum_errors_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t sync_errors_ = 0;
  std::size_t checksum_errors_ = 0;
};

struct SinkInfo {
  std::string name;
  bool lossy = false;  // lossy sinks get drop-oldest backpressure
};

// Ordered consumer of pipeline output colors. Implementations report
// delivery failures by throwing.
class ColorSink {
 public:
  virtual ~ColorSink() = default;

  virtual const SinkInfo& info() const = 0;
  virtual void submit(const RgbColor& color) = 0;
};

// In-process lamp stand-in. Each submitted color goes through the real
// wire encoding and the StreamDecoder before it is recorded, so the log
// only ever contains colors that survived framing. Thread-safe.
class SimulatorSink : public ColorSink {
 public:
  explicit SimulatorSink(std::size_t log_capacity);

  const SinkInfo& info() const override { return info_; }
  void submit(const RgbColor& color) override;

  // Test surface: raw wire input, as if read off the serial line.
  void feed_bytes(std::span<const std::uint8_t> bytes);

  std::optional<RgbColor> last() const;
  std::size_t frames_delivered() const;
  std::size_t checksum_errors() const;
  std::size_t sync_errors() const;
  std::vector<RgbColor> log() const;

  // Text dump mode: one "R G B" line per delivered frame.
  void set_dump_stream(std::ostream* out);

 private:
  void record(const std::vector<RgbColor>& colors);

  SinkInfo info_{"sim", false};
  std::size_t capacity_;
  mutable std::mutex mutex_;
  StreamDecoder decoder_;
  std::deque<RgbColor> log_;
  std::size_t delivered_ = 0;
  std::ostream* dump_ = nullptr;
};

// Writes lamp frames to a serial character device, 8N1. When the path is
// not a tty (a plain file or a pipe), termios setup is skipped and bytes
// are written as-is, which is also the golden-test hook.
class SerialSink : public ColorSink {
 public:
  explicit SerialSink(const std::string& port_path, int baud = 115200);
  ~SerialSink() override;

  SerialSink(const SerialSink&) = delete;
  SerialSink& operator=(const SerialSink&) = delete;

  const SinkInfo& info() const override { return info_; }
  void submit(const RgbColor& color) override;

 private:
  SinkInfo info_{"serial", true};
  int fd_ = -1;
};

// Builds a sink from its CLI spelling: "sim" or "serial:<path>[@baud]".
std::unique_ptr<ColorSink> make_sink(const std::string& spec,
                                     std::size_t sim_capacity = 256);

}  // namespace synesthete
