#include "synesthete/device.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>
#include <ostream>

#include <fcntl.h>
#include <poll.h>
#include <termios.h>
#include <unistd.h>

#include "synesthete/errors.hpp"
#include "synesthete/logging.hpp"

namespace synesthete {

LampFrame encode_frame(const RgbColor& color) {
  LampFrame frame;
  frame.bytes[0] = kLampSyncByte;
  frame.bytes[1] = color.r;
  frame.bytes[2] = color.g;
  frame.bytes[3] = color.b;
  frame.bytes[4] = static_cast<std::uint8_t>(
      (static_cast<unsigned>(color.r) + color.g + color.b) & 0xFF);
  return frame;
}

RgbColor decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kLampFrameSize) {
    throw BadFrameSize("lamp frame must be exactly 5 octets, got " +
                       std::to_string(bytes.size()));
  }
  if (bytes[0] != kLampSyncByte) {
    throw BadSync("bad sync octet");
  }
  const std::uint8_t expected = static_cast<std::uint8_t>(
      (static_cast<unsigned>(bytes[1]) + bytes[2] + bytes[3]) & 0xFF);
  if (bytes[4] != expected) {
    throw BadChecksum("checksum " + std::to_string(bytes[4]) +
                      ", expected " + std::to_string(expected));
  }
  return {bytes[1], bytes[2], bytes[3]};
}

std::vector<RgbColor> StreamDecoder::feed(
    std::span<const std::uint8_t> bytes) {
  std::vector<RgbColor> out;
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());

  std::size_t pos = 0;
  while (true) {
    // Resync: skip to the next sync octet.
    while (pos < buffer_.size() && buffer_[pos] != kLampSyncByte) {
      ++pos;
      ++sync_errors_;
    }
    if (buffer_.size() - pos < kLampFrameSize) break;

    try {
      out.push_back(
          decode_frame(std::span(buffer_).subspan(pos, kLampFrameSize)));
      pos += kLampFrameSize;
    } catch (const BadChecksum&) {
      ++checksum_errors_;
      // Drop the sync byte and rescan: the frame may have been corrupted
      // mid-stream.
      ++pos;
    }
  }
  buffer_.erase(buffer_.begin(),
                buffer_.begin() + static_cast<std::ptrdiff_t>(pos));
  return out;
}

SimulatorSink::SimulatorSink(std::size_t log_capacity)
    : capacity_(log_capacity == 0 ? 1 : log_capacity) {}

void SimulatorSink::submit(const RgbColor& color) {
  const LampFrame frame = encode_frame(color);
  feed_bytes(frame.bytes);
}

void SimulatorSink::feed_bytes(std::span<const std::uint8_t> bytes) {
  std::lock_guard<std::mutex> lock(mutex_);
  record(decoder_.feed(bytes));
}

void SimulatorSink::record(const std::vector<RgbColor>& colors) {
  for (const RgbColor& c : colors) {
    log_.push_back(c);
    while (log_.size() > capacity_) log_.pop_front();
    ++delivered_;
    if (dump_ != nullptr) {
      *dump_ << static_cast<int>(c.r) << " " << static_cast<int>(c.g) << " "
             << static_cast<int>(c.b) << "\n";
    }
  }
}

std::optional<RgbColor> SimulatorSink::last() const {
  std::lock_guard<std::mutex> lock(mutex_);
  if (log_.empty()) return std::nullopt;
  return log_.back();
}

std::size_t SimulatorSink::frames_delivered() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return delivered_;
}

std::size_t SimulatorSink::checksum_errors() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return decoder_.checksum_errors();
}

std::size_t SimulatorSink::sync_errors() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return decoder_.sync_errors();
}

std::vector<RgbColor> SimulatorSink::log() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return {log_.begin(), log_.end()};
}

void SimulatorSink::set_dump_stream(std::ostream* out) {
  std::lock_guard<std::mutex> lock(mutex_);
  dump_ = out;
}

namespace {

speed_t baud_constant(int baud) {
  switch (baud) {
    case 9600: return B9600;
    case 19200: return B19200;
    case 38400: return B38400;
    case 57600: return B57600;
    case 115200: return B115200;
    case 230400: return B230400;
    default:
      throw InvalidInput("unsupported baud rate: " + std::to_string(baud));
  }
}

}  // namespace

SerialSink::SerialSink(const std::string& port_path, int baud) {
  const speed_t speed = baud_constant(baud);
  fd_ = ::open(port_path.c_str(), O_WRONLY | O_CREAT | O_NOCTTY, 0644);
  if (fd_ < 0) {
    throw PortUnavailable("cannot open " + port_path + ": " +
                          std::strerror(errno));
  }
  if (::isatty(fd_) == 1) {
    termios tio{};
    if (::tcgetattr(fd_, &tio) != 0) {
      ::close(fd_);
      fd_ = -1;
      throw PortUnavailable("tcgetattr failed for " + port_path);
    }
    ::cfmakeraw(&tio);
    tio.c_cflag &= ~static_cast<tcflag_t>(CSTOPB | PARENB);  // 8N1
    tio.c_cflag |= CS8 | CLOCAL;
    ::cfsetispeed(&tio, speed);
    ::cfsetospeed(&tio, speed);
    if (::tcsetattr(fd_, TCSANOW, &tio) != 0) {
      ::close(fd_);
      fd_ = -1;
      throw PortUnavailable("tcsetattr failed for " + port_path);
    }
  }
  info_.name = "serial:" + port_path;
}

SerialSink::~SerialSink() {
  if (fd_ >= 0) ::close(fd_);
}

void SerialSink::submit(const RgbColor& color) {
  const LampFrame frame = encode_frame(color);
  std::size_t written = 0;
  while (written < frame.bytes.size()) {
    const ssize_t n = ::write(fd_, frame.bytes.data() + written,
                              frame.bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK || errno == ETIMEDOUT) {
        throw WriteTimeout("serial write stalled");
      }
      throw PortUnavailable(std::string("serial write failed: ") +
                            std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
}

std::unique_ptr<ColorSink> make_sink(const std::string& spec,
                                     std::size_t sim_capacity) {
  if (spec == "sim") {
    return std::make_unique<SimulatorSink>(sim_capacity);
  }
  if (spec.rfind("serial:", 0) == 0) {
    std::string rest = spec.substr(7);
    int baud = 115200;
    if (const auto at = rest.rfind('@'); at != std::string::npos) {
      const std::string baud_str = rest.substr(at + 1);
      const auto [ptr, ec] = std::from_chars(
          baud_str.data(), baud_str.data() + baud_str.size(), baud);
      if (ec != std::errc{} || ptr != baud_str.data() + baud_str.size()) {
        throw InvalidInput("bad baud in sink spec: " + spec);
      }
      rest = rest.substr(0, at);
    }
    if (rest.empty()) throw InvalidInput("serial sink needs a port path");
    return std::make_unique<SerialSink>(rest, baud);
  }
  throw InvalidInput("unknown sink spec: '" + spec +
                     "' (expected sim or serial:<path>[@baud])");
}

}  // namespace synesthete
