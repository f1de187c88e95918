#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>

#include "synesthete/affect.hpp"
#include "synesthete/chroma.hpp"
#include "synesthete/device.hpp"
#include "synesthete/expression.hpp"

namespace synesthete {

struct TranscoderConfig {
  std::filesystem::path affect_model_path;
  std::filesystem::path color_model_path;
  std::filesystem::path anchor_table_path;    // optional, provenance only
  std::filesystem::path plutchik_table_path;  // optional, provenance only
  double smoothing_alpha = 0.3;
  bool clamp = true;
  bool stochastic = false;
  std::uint64_t rng_seed = 0;
  ColorInterpretation color_interpretation = ColorInterpretation::hsv;

  void validate() const;
};

TranscoderConfig config_from_json(const std::string& text);
std::string config_to_json(const TranscoderConfig& cfg);
TranscoderConfig load_config(const std::filesystem::path& path);

// One transcoded frame; pad and hsl are the diagnostic intermediates.
struct ColorFrame {
  std::int64_t frame_id = 0;
  RgbColor rgb;
  PadPoint pad;
  HslColor hsl;
};

// Exponential smoothing memory over PAD. Empty before the first frame;
// the first frame passes through unsmoothed.
struct SmoothingState {
  std::optional<PadPoint> pad;
  std::int64_t frames_seen = 0;
};

// Loaded models plus runtime knobs; immutable during a run, shareable
// across streams.
struct TranscodeParams {
  LinearModel affect;
  LinearModel color;
  double smoothing_alpha = 0.3;
  bool clamp = true;
  bool stochastic = false;
  std::uint64_t rng_seed = 0;
  ColorInterpretation color_interpretation = ColorInterpretation::hsv;

  static TranscodeParams from_config(const TranscoderConfig& cfg);
};

// landmarks -> expression -> PAD -> smoothed PAD -> HSL -> RGB.
// Smoothing runs in PAD space: pad_t = alpha * raw + (1 - alpha) * pad_{t-1}.
std::pair<ColorFrame, SmoothingState> transcode_frame(
    const TranscodeParams& params, const LandmarkSet& lm,
    SmoothingState state);

// Bounded handoff between the transcoding loop and the sink delivery
// worker. Lossless mode blocks the producer when full; realtime mode drops
// the oldest queued frame so the lamp always shows the present.
class FrameQueue {
 public:
  enum class Overflow { block, drop_oldest };

  FrameQueue(std::size_t capacity, Overflow policy);

  void push(ColorFrame frame);
  std::optional<ColorFrame> pop();  // blocks; nullopt once closed and drained
  void close();
  std::size_t dropped() const;

 private:
  std::size_t capacity_;
  Overflow policy_;
  mutable std::mutex mutex_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
  std::deque<ColorFrame> queue_;
  bool closed_ = false;
  std::size_t dropped_ = 0;
};

struct StreamSummary {
  std::size_t frames = 0;
  std::size_t errors = 0;   // parse + frame-level + delivery errors
  std::size_t dropped = 0;  // realtime backpressure drops
  PadPoint mean_pad;
};

struct RunOptions {
  bool lenient = false;
  std::size_t queue_capacity = 256;
  std::ostream* diagnostics = nullptr;  // JSONL, one record per frame
};

// Drives a landmark stream through the transcoder and a delivery worker
// feeding the sink. Frames are processed strictly in input order. In
// lenient mode a bad frame is recorded in the diagnostics and the lamp
// holds its previous color.
StreamSummary run_stream(const TranscodeParams& params, LandmarkReader& input,
                         ColorSink& sink, const RunOptions& options = {});

// Diagnostic record formatting, shared by run_stream and the golden tests.
std::string diagnostic_line(const ColorFrame& frame);
std::string diagnostic_error_line(std::int64_t frame_id,
                                  const std::string& message);

}  // namespace synesthete
