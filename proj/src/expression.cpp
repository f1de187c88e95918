#include "synesthete/expression.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "synesthete/errors.hpp"
#include "synesthete/logging.hpp"

namespace synesthete {

void validate_landmarks(const LandmarkSet& lm, bool strict) {
  if (strict) {
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      const Vec2& p = lm.points[i];
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw InvalidLandmarks("non-finite landmark at index " +
                               std::to_string(i));
      }
    }
    return;
  }
  for (std::size_t i : kRequiredLandmarks) {
    const Vec2& p = lm.points[i];
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidLandmarks("non-finite required landmark at index " +
                             std::to_string(i));
    }
  }
}

ExpressionVector extract_expression(const LandmarkSet& lm) {
  validate_landmarks(lm);
  const auto& l = lm.points;

  const double eyes_brows = l[0].y - l[13].y + (l[16].y - l[12].y) / 4.0;

  ExpressionVector out;
  out.frame_id = lm.frame_id;
  out.v = {
      (l[0].y - l[1].y) * 2.0,
      eyes_brows,
      l[12].y + eyes_brows - l[0].y,
      l[16].y + eyes_brows - l[0].y,
      l[28].x - l[22].x,
      l[31].y - l[25].y,
      (l[28].y - l[25].y) / 2.0 - l[22].y,
  };
  return out;
}

LandmarkSet scaled(const LandmarkSet& lm, double factor) {
  if (!std::isfinite(factor) || factor <= 0.0) {
    throw InvalidInput("scale factor must be finite and positive");
  }
  LandmarkSet out = lm;
  for (Vec2& p : out.points) {
    p.x *= factor;
    p.y *= factor;
  }
  return out;
}

namespace {

double parse_double_field(std::string_view field, std::size_t line_no) {
  // Tolerate surrounding spaces, as produced by hand-edited CSV.
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
    field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' ||
                            field.back() == '\r'))
    field.remove_suffix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(line_no,
                     "not a number: '" + std::string(field) + "'");
  }
  return value;
}

LandmarkSet parse_csv_record(const std::string& line, std::size_t line_no,
                             std::int64_t frame_id) {
  LandmarkSet lm;
  lm.frame_id = frame_id;

  std::size_t field_count = 0;
  std::size_t start = 0;
  std::string_view view(line);
  while (true) {
    const std::size_t comma = view.find(',', start);
    const std::string_view field =
        view.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                           : comma - start);
    if (field_count >= 2 * kLandmarkCount) {
      throw ParseError(line_no, "expected 80 fields, found more");
    }
    const double value = parse_double_field(field, line_no);
    if (field_count % 2 == 0) {
      lm.points[field_count / 2].x = value;
    } else {
      lm.points[field_count / 2].y = value;
    }
    ++field_count;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (field_count != 2 * kLandmarkCount) {
    throw ParseError(line_no, "expected 80 fields, found " +
                                  std::to_string(field_count));
  }
  return lm;
}

LandmarkSet parse_jsonl_record(const std::string& line, std::size_t line_no,
                               std::int64_t fallback_frame_id) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError(line_no, "record is not an object");
  if (!doc.contains("pts")) throw ParseError(line_no, "missing 'pts'");

  const auto& pts = doc["pts"];
  if (!pts.is_array() || pts.size() != kLandmarkCount) {
    throw ParseError(line_no,
                     "expected 40 points, found " +
                         std::to_string(pts.is_array() ? pts.size() : 0));
  }

  LandmarkSet lm;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const auto& pt = pts[i];
    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() ||
        !pt[1].is_number()) {
      throw ParseError(line_no,
                       "point " + std::to_string(i) + " is not [x, y]");
    }
    lm.points[i].x = pt[0].get<double>();
    lm.points[i].y = pt[1].get<double>();
  }

  if (doc.contains("frame")) {
    if (!doc["frame"].is_number_integer()) {
      throw ParseError(line_no, "'frame' is not an integer");
    }
    lm.frame_id = doc["frame"].get<std::int64_t>();
  } else {
    lm.frame_id = fallback_frame_id;
  }
  if (doc.contains("t_ms")) {
    if (!doc["t_ms"].is_number_integer()) {
      throw ParseError(line_no, "'t_ms' is not an integer");
    }
    lm.timestamp_ms = doc["t_ms"].get<std::int64_t>();
  }
  return lm;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

LandmarkReader::LandmarkReader(std::istream& in, StreamFormat format,
                               bool lenient)
    : in_(in), format_(format), lenient_(lenient) {}

std::optional<LandmarkSet> LandmarkReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (is_blank(line)) continue;
    if (format_ == StreamFormat::csv && line.front() == '#') continue;
    try {
      LandmarkSet lm =
          format_ == StreamFormat::jsonl
              ? parse_jsonl_record(line, line_no_, next_sequential_id_)
              : parse_csv_record(line, line_no_, next_sequential_id_);
      ++next_sequential_id_;
      ++stats_.records;
      return lm;
    } catch (const ParseError& e) {
      if (!lenient_) throw;
      ++stats_.skipped;
      logging::warn("skipping malformed landmark record: ", e.what());
    }
  }
  return std::nullopt;
}

std::vector<LandmarkSet> parse_landmark_stream(std::istream& in,
                                               StreamFormat format,
                                               bool lenient) {
  LandmarkReader reader(in, format, lenient);
  std::vector<LandmarkSet> out;
  while (auto lm = reader.next()) out.push_back(*lm);
  return out;
}

}  // namespace synesthete
