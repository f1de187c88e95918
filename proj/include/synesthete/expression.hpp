#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace synesthete {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr std::size_t kLandmarkCount = 40;

// One frame of tracked facial landmarks, in image coordinates: x grows to
// the right, y grows downward. Indices are opaque positions; only the nine
// consumed by the displacement formulas carry meaning here.
struct LandmarkSet {
  std::array<Vec2, kLandmarkCount> points{};
  std::int64_t frame_id = 0;
  std::optional<std::int64_t> timestamp_ms;
};

// The seven displacement features, pixel units:
//   v[0] eyes height          (l0.y - l1.y) * 2
//   v[1] eyes / brows space   l0.y - l13.y + (l16.y - l12.y) / 4
//   v[2] inner brow height    l12.y + v[1] - l0.y
//   v[3] outer brow height    l16.y + v[1] - l0.y
//   v[4] mouth width          l28.x - l22.x
//   v[5] mouth openness       l31.y - l25.y
//   v[6] mouth twist          (l28.y - l25.y) / 2 - l22.y
struct ExpressionVector {
  std::array<double, 7> v{};
  std::int64_t frame_id = 0;
};

// Landmark indices consumed by the displacement formulas.
inline constexpr std::array<std::size_t, 9> kRequiredLandmarks = {
    0, 1, 12, 13, 16, 22, 25, 28, 31};

// Throws InvalidLandmarks when a required point is non-finite; in strict
// mode any non-finite point is rejected.
void validate_landmarks(const LandmarkSet& lm, bool strict = false);

// Computes the seven displacement features. Deterministic: equal inputs
// give bitwise-identical outputs.
ExpressionVector extract_expression(const LandmarkSet& lm);

// Multiplies every coordinate by `factor`. Optional pre-scaling hook for
// training hygiene; nothing in the pipeline applies it by default.
LandmarkSet scaled(const LandmarkSet& lm, double factor);

enum class StreamFormat { jsonl, csv };

struct ParseStats {
  std::size_t records = 0;  // well-formed records yielded
  std::size_t skipped = 0;  // malformed records skipped (lenient mode only)
};

// Pull-based reader over landmark streams.
//
// JSONL: one object per line, {"frame": int?, "t_ms": int?,
// "pts": [[x, y] x 40]}. CSV: 80 comma-separated reals per line,
// x0,y0,...,x39,y39; lines starting with '#' are skipped.
//
// frame_id is taken from the record when present, otherwise assigned
// sequentially from 0. In strict mode (default) a malformed record throws
// ParseError; in lenient mode it is logged, counted and skipped.
class LandmarkReader {
 public:
  LandmarkReader(std::istream& in, StreamFormat format, bool lenient = false);

  std::optional<LandmarkSet> next();

  const ParseStats& stats() const noexcept { return stats_; }

 private:
  std::istream& in_;
  StreamFormat format_;
  bool lenient_;
  std::size_t line_no_ = 0;
  std::int64_t next_sequential_id_ = 0;
  ParseStats stats_;
};

// Eager counterpart of LandmarkReader.
std::vector<LandmarkSet> parse_landmark_stream(std::istream& in,
                                               StreamFormat format,
                                               bool lenient = false);

}  // namespace synesthete
