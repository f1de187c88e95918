#include "synesthete/pipeline.hpp"

#include <cmath>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "synesthete/errors.hpp"
#include "synesthete/io_util.hpp"
#include "synesthete/logging.hpp"

namespace synesthete {

void TranscoderConfig::validate() const {
  if (!(smoothing_alpha >= 0.0 && smoothing_alpha <= 1.0)) {
    throw InvalidInput("smoothing_alpha must lie in [0, 1]");
  }
  for (const auto* path : {&affect_model_path, &color_model_path}) {
    if (path->empty()) throw InvalidInput("model paths must be set");
    if (!std::filesystem::exists(*path)) {
      throw Error("model file not found: " + path->string());
    }
  }
  for (const auto* path : {&anchor_table_path, &plutchik_table_path}) {
    if (!path->empty() && !std::filesystem::exists(*path)) {
      throw Error("table file not found: " + path->string());
    }
  }
}

TranscoderConfig config_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("invalid config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");

  TranscoderConfig cfg;
  if (doc.contains("affect_model_path"))
    cfg.affect_model_path = doc["affect_model_path"].get<std::string>();
  if (doc.contains("color_model_path"))
    cfg.color_model_path = doc["color_model_path"].get<std::string>();
  if (doc.contains("anchor_table_path"))
    cfg.anchor_table_path = doc["anchor_table_path"].get<std::string>();
  if (doc.contains("plutchik_table_path"))
    cfg.plutchik_table_path = doc["plutchik_table_path"].get<std::string>();
  if (doc.contains("smoothing_alpha"))
    cfg.smoothing_alpha = doc["smoothing_alpha"].get<double>();
  if (doc.contains("clamp")) cfg.clamp = doc["clamp"].get<bool>();
  if (doc.contains("stochastic"))
    cfg.stochastic = doc["stochastic"].get<bool>();
  if (doc.contains("rng_seed"))
    cfg.rng_seed = doc["rng_seed"].get<std::uint64_t>();
  if (doc.contains("color_interpretation")) {
    cfg.color_interpretation = color_interpretation_from_string(
        doc["color_interpretation"].get<std::string>());
  }
  return cfg;
}

std::string config_to_json(const TranscoderConfig& cfg) {
  nlohmann::json doc;
  doc["affect_model_path"] = cfg.affect_model_path.string();
  doc["color_model_path"] = cfg.color_model_path.string();
  doc["anchor_table_path"] = cfg.anchor_table_path.string();
  doc["plutchik_table_path"] = cfg.plutchik_table_path.string();
  doc["smoothing_alpha"] = cfg.smoothing_alpha;
  doc["clamp"] = cfg.clamp;
  doc["stochastic"] = cfg.stochastic;
  doc["rng_seed"] = cfg.rng_seed;
  doc["color_interpretation"] = to_string(cfg.color_interpretation);
  return doc.dump(2) + "\n";
}

TranscoderConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_text_file(path));
}

TranscodeParams TranscodeParams::from_config(const TranscoderConfig& cfg) {
  cfg.validate();
  TranscodeParams params;
  params.affect = load_model(cfg.affect_model_path);
  params.color = load_model(cfg.color_model_path);
  if (params.affect.kind != ModelKind::affect) {
    throw InvalidInput("affect_model_path does not hold an affect model");
  }
  if (params.color.kind != ModelKind::color) {
    throw InvalidInput("color_model_path does not hold a color model");
  }
  if (!cfg.anchor_table_path.empty()) load_anchor_table(cfg.anchor_table_path);
  if (!cfg.plutchik_table_path.empty())
    load_plutchik_table(cfg.plutchik_table_path);
  params.smoothing_alpha = cfg.smoothing_alpha;
  params.clamp = cfg.clamp;
  params.stochastic = cfg.stochastic;
  params.rng_seed = cfg.rng_seed;
  params.color_interpretation = cfg.color_interpretation;
  return params;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent per-frame, per-stage sampling seeds.
std::uint64_t stage_seed(std::uint64_t base, std::int64_t frames_seen,
                         unsigned stage) {
  return splitmix64(base ^ splitmix64(
                               static_cast<std::uint64_t>(frames_seen) * 2 +
                               stage));
}

}  // namespace

std::pair<ColorFrame, SmoothingState> transcode_frame(
    const TranscodeParams& params, const LandmarkSet& lm,
    SmoothingState state) {
  const ExpressionVector v = extract_expression(lm);

  const PadPoint raw =
      params.stochastic
          ? to_pad_sampled(params.affect, v, params.clamp,
                           stage_seed(params.rng_seed, state.frames_seen, 0))
          : to_pad(params.affect, v, params.clamp);

  PadPoint smoothed = raw;
  if (state.pad.has_value()) {
    const double a = params.smoothing_alpha;
    smoothed.p = a * raw.p + (1.0 - a) * state.pad->p;
    smoothed.a = a * raw.a + (1.0 - a) * state.pad->a;
    smoothed.d = a * raw.d + (1.0 - a) * state.pad->d;
  }

  const HslColor hsl =
      params.stochastic
          ? to_color_sampled(params.color, smoothed,
                             stage_seed(params.rng_seed, state.frames_seen, 1))
          : to_color(params.color, smoothed);

  ColorFrame frame;
  frame.frame_id = lm.frame_id;
  frame.pad = smoothed;
  frame.hsl = hsl;
  frame.rgb = hsl_to_rgb(hsl, params.color_interpretation);

  state.pad = smoothed;
  ++state.frames_seen;
  return {frame, state};
}

FrameQueue::FrameQueue(std::size_t capacity, Overflow policy)
    : capacity_(capacity == 0 ? 1 : capacity), policy_(policy) {}

void FrameQueue::push(ColorFrame frame) {
  std::unique_lock<std::mutex> lock(mutex_);
  if (policy_ == Overflow::block) {
    not_full_.wait(lock,
                   [this] { return queue_.size() < capacity_ || closed_; });
    if (closed_) return;
  } else if (queue_.size() >= capacity_) {
    queue_.pop_front();
    ++dropped_;
  }
  queue_.push_back(std::move(frame));
  not_empty_.notify_one();
}

std::optional<ColorFrame> FrameQueue::pop() {
  std::unique_lock<std::mutex> lock(mutex_);
  not_empty_.wait(lock, [this] { return !queue_.empty() || closed_; });
  if (queue_.empty()) return std::nullopt;
  ColorFrame frame = std::move(queue_.front());
  queue_.pop_front();
  not_full_.notify_one();
  return frame;
}

void FrameQueue::close() {
  std::lock_guard<std::mutex> lock(mutex_);
  closed_ = true;
  not_empty_.notify_all();
  not_full_.notify_all();
}

std::size_t FrameQueue::dropped() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return dropped_;
}

std::string diagnostic_line(const ColorFrame& frame) {
  nlohmann::json doc;
  doc["frame"] = frame.frame_id;
  doc["pad"] = {frame.pad.p, frame.pad.a, frame.pad.d};
  doc["hsl"] = {frame.hsl.h, frame.hsl.s, frame.hsl.l};
  doc["rgb"] = {frame.rgb.r, frame.rgb.g, frame.rgb.b};
  return doc.dump();
}

std::string diagnostic_error_line(std::int64_t frame_id,
                                  const std::string& message) {
  nlohmann::json doc;
  doc["frame"] = frame_id;
  doc["error"] = message;
  return doc.dump();
}

StreamSummary run_stream(const TranscodeParams& params, LandmarkReader& input,
                         ColorSink& sink, const RunOptions& options) {
  const auto policy = sink.info().lossy ? FrameQueue::Overflow::drop_oldest
                                        : FrameQueue::Overflow::block;
  FrameQueue queue(options.queue_capacity, policy);

  std::size_t delivery_errors = 0;
  std::thread delivery([&] {
    while (auto frame = queue.pop()) {
      try {
        sink.submit(frame->rgb);
      } catch (const Error& e) {
        ++delivery_errors;
        logging::warn("sink '", sink.info().name, "' delivery failed: ",
                      e.what());
      }
    }
  });

  StreamSummary summary;
  SmoothingState state;
  double sum_p = 0.0, sum_a = 0.0, sum_d = 0.0;

  try {
    while (true) {
      std::optional<LandmarkSet> lm;
      lm = input.next();  // throws ParseError in strict mode
      if (!lm.has_value()) break;
      try {
        auto [frame, next_state] = transcode_frame(params, *lm, state);
        state = next_state;
        if (options.diagnostics != nullptr) {
          *options.diagnostics << diagnostic_line(frame) << "\n";
        }
        sum_p += frame.pad.p;
        sum_a += frame.pad.a;
        sum_d += frame.pad.d;
        ++summary.frames;
        queue.push(std::move(frame));
      } catch (const Error& e) {
        if (!options.lenient) throw;
        // Hold the last color: nothing new reaches the sink.
        ++summary.errors;
        logging::warn("frame ", lm->frame_id, " failed: ", e.what());
        if (options.diagnostics != nullptr) {
          *options.diagnostics
              << diagnostic_error_line(lm->frame_id, e.what()) << "\n";
        }
      }
    }
  } catch (...) {
    queue.close();
    delivery.join();
    throw;
  }

  queue.close();
  delivery.join();

  summary.errors += input.stats().skipped + delivery_errors;
  summary.dropped = queue.dropped();
  if (summary.frames > 0) {
    const double n = static_cast<double>(summary.frames);
    summary.mean_pad = {sum_p / n, sum_a / n, sum_d / n};
  }
  return summary;
}

}  // namespace synesthete
