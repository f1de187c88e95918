#include "synesthete/chroma.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "synesthete/errors.hpp"
#include "synesthete/io_util.hpp"

namespace synesthete {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_degrees(double h) {
  double out = std::fmod(h, 360.0);
  if (out < 0.0) out += 360.0;
  // fmod can return 360.0 - eps rounding back up; keep the invariant tight.
  if (out >= 360.0) out = 0.0;
  return out;
}

}  // namespace

HslColor make_hsl_clamped(double h, double s, double l) {
  if (!std::isfinite(h) || !std::isfinite(s) || !std::isfinite(l)) {
    throw InvalidInput("non-finite color component");
  }
  return {wrap_degrees(h), std::clamp(s, 0.0, 100.0),
          std::clamp(l, 0.0, 100.0)};
}

HslColor make_hsl_strict(double h, double s, double l) {
  if (!std::isfinite(h) || !std::isfinite(s) || !std::isfinite(l)) {
    throw InvalidInput("non-finite color component");
  }
  if (h < 0.0 || h >= 360.0 || s < 0.0 || s > 100.0 || l < 0.0 || l > 100.0) {
    throw InvalidInput("color component out of range");
  }
  return {h, s, l};
}

bool hsl_in_range(const HslColor& c) {
  return c.h >= 0.0 && c.h < 360.0 && c.s >= 0.0 && c.s <= 100.0 &&
         c.l >= 0.0 && c.l <= 100.0;
}

MehrabianMatrix::MehrabianMatrix() {
  w_ << 0.69, 0.22,  //
      -0.31, 0.60,   //
      -0.76, 0.32;
  const Eigen::Matrix2d gram = w_.transpose() * w_;
  pinv_ = gram.inverse() * w_.transpose();

  const Eigen::Matrix2d identity = pinv_ * w_;
  if ((identity - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() >
      1e-12) {
    throw Error("Mehrabian pseudoinverse failed its identity check");
  }
}

const MehrabianMatrix& MehrabianMatrix::instance() {
  static const MehrabianMatrix m;
  return m;
}

std::pair<double, double> pad_to_sl(const PadPoint& e) {
  if (!std::isfinite(e.p) || !std::isfinite(e.a) || !std::isfinite(e.d)) {
    throw InvalidInput("non-finite PAD point");
  }
  const Eigen::Vector2d ls = MehrabianMatrix::instance().pinv() * to_vector(e);
  return {ls(0), ls(1)};  // (l_raw, s_raw)
}

double sl_raw_to_percent(double raw) {
  return std::clamp(raw, 0.0, 1.0) * 100.0;
}

void PlutchikTable::validate() const {
  if (rows.empty()) throw EmptyTable("Plutchik table is empty");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    if (!std::isfinite(r.h) || !std::isfinite(r.s) || !std::isfinite(r.l) ||
        !std::isfinite(r.p) || !std::isfinite(r.a) || !std::isfinite(r.d)) {
      throw InvalidInput("table row '" + r.label + "' has non-finite values");
    }
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      if (r.label == rows[j].label) {
        throw InvalidInput("duplicate table label '" + r.label + "'");
      }
    }
  }
}

PlutchikTable default_plutchik_table() {
  PlutchikTable t;
  t.rows = {
      {"joy", 60, 67, 100, 0.81, 0.51, 0.46},
      {"ecstasy", 60, 67, 100, 0.62, 0.75, 0.38},
      {"fear", 120, 100, 59, -0.64, 0.60, -0.43},
      {"terror", 120, 100, 50, -0.62, 0.82, -0.43},
      {"amazement", 203, 100, 88, 0.16, 0.88, -0.15},
      {"sadness", 240, 68, 100, -0.63, -0.27, -0.33},
      {"boredom", 300, 22, 100, -0.65, -0.62, -0.33},
      {"annoyance", 0, 45, 100, -0.58, 0.40, 0.01},
      {"anger", 0, 100, 100, -0.51, 0.59, 0.25},
      {"interest", 29, 45, 100, 0.64, 0.51, 0.17},
      {"vigilance", 29, 100, 100, 0.49, 0.57, 0.45},
  };
  return t;
}

PlutchikTable plutchik_table_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("invalid table JSON: ") + e.what());
  }
  if (!doc.is_array()) throw InvalidInput("table JSON must be a list");

  PlutchikTable table;
  for (const auto& item : doc) {
    for (const char* key : {"label", "h", "s", "l", "p", "a", "d"}) {
      if (!item.contains(key)) {
        throw InvalidInput(std::string("table rows need field '") + key +
                           "'");
      }
    }
    table.rows.push_back({item["label"].get<std::string>(),
                          item["h"].get<double>(), item["s"].get<double>(),
                          item["l"].get<double>(), item["p"].get<double>(),
                          item["a"].get<double>(), item["d"].get<double>()});
  }
  table.validate();
  return table;
}

std::string plutchik_table_to_json(const PlutchikTable& table) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : table.rows) {
    doc.push_back({{"label", r.label},
                   {"h", r.h},
                   {"s", r.s},
                   {"l", r.l},
                   {"p", r.p},
                   {"a", r.a},
                   {"d", r.d}});
  }
  return doc.dump(2) + "\n";
}

PlutchikTable load_plutchik_table(const std::filesystem::path& path) {
  return plutchik_table_from_json(read_text_file(path));
}

std::pair<double, std::string> nearest_hue(const PadPoint& e,
                                           const PlutchikTable& table) {
  if (table.rows.empty()) throw EmptyTable("Plutchik table is empty");
  const Eigen::Vector3d target = to_vector(e);
  const PlutchikTable::Row* best = nullptr;
  double best_dist = 0.0;
  for (const auto& row : table.rows) {
    const double dist =
        (Eigen::Vector3d(row.p, row.a, row.d) - target).squaredNorm();
    if (best == nullptr || dist < best_dist) {
      best = &row;
      best_dist = dist;
    }
  }
  return {best->h, best->label};
}

std::vector<std::pair<PadPoint, HslColor>> build_color_training_set(
    const PlutchikTable& table, ColorTrainingMode mode) {
  table.validate();
  std::vector<std::pair<PadPoint, HslColor>> pairs;
  pairs.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    const PadPoint pad{row.p, row.a, row.d};
    if (mode == ColorTrainingMode::table) {
      pairs.emplace_back(pad, make_hsl_clamped(row.h, row.s, row.l));
    } else {
      const auto [l_raw, s_raw] = pad_to_sl(pad);
      pairs.emplace_back(pad,
                         make_hsl_clamped(row.h, sl_raw_to_percent(s_raw),
                                          sl_raw_to_percent(l_raw)));
    }
  }
  return pairs;
}

LinearModel train_color(
    const std::vector<std::pair<PadPoint, HslColor>>& pairs, double lambda) {
  if (pairs.empty()) throw InvalidInput("color training set is empty");
  const Eigen::Index n = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::MatrixXd Y(n, 4);  // cos h, sin h, s, l
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [pad, hsl] = pairs[static_cast<std::size_t>(i)];
    X.row(i) = to_vector(pad).transpose();
    const double radians = hsl.h * kPi / 180.0;
    Y(i, 0) = std::cos(radians);
    Y(i, 1) = std::sin(radians);
    Y(i, 2) = hsl.s;
    Y(i, 3) = hsl.l;
  }
  LinearModel model = fit_ridge(X, Y, lambda);
  model.kind = ModelKind::color;
  return model;
}

namespace {

void check_color_model(const LinearModel& model) {
  if (model.kind != ModelKind::color || model.d_in() != 3 ||
      model.d_out() != 4) {
    throw DimensionMismatch("model is not a 3 -> (cos,sin,s,l) color model");
  }
}

HslColor decode_color(const Eigen::VectorXd& y) {
  const double h = std::atan2(y(1), y(0)) * 180.0 / kPi;
  return make_hsl_clamped(h, y(2), y(3));
}

}  // namespace

HslColor to_color(const LinearModel& model, const PadPoint& e) {
  check_color_model(model);
  return decode_color(predict(model, to_vector(e)));
}

HslColor to_color_sampled(const LinearModel& model, const PadPoint& e,
                          std::uint64_t rng_seed) {
  check_color_model(model);
  return decode_color(sample(model, to_vector(e), rng_seed));
}

std::string to_string(ColorInterpretation interp) {
  return interp == ColorInterpretation::hsl ? "hsl" : "hsv";
}

ColorInterpretation color_interpretation_from_string(const std::string& s) {
  if (s == "hsl") return ColorInterpretation::hsl;
  if (s == "hsv") return ColorInterpretation::hsv;
  throw InvalidInput("unknown color interpretation: '" + s + "'");
}

RgbColor hsl_to_rgb(const HslColor& c, ColorInterpretation interp) {
  if (!hsl_in_range(c)) throw InvalidInput("color out of range");
  const double h = c.h;
  const double s = c.s / 100.0;
  const double third = c.l / 100.0;

  double chroma = 0.0;
  double base = 0.0;
  if (interp == ColorInterpretation::hsl) {
    chroma = (1.0 - std::abs(2.0 * third - 1.0)) * s;
    base = third - chroma / 2.0;
  } else {
    chroma = third * s;
    base = third - chroma;
  }

  const double hp = h / 60.0;
  const double x = chroma * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));

  double r1 = 0.0, g1 = 0.0, b1 = 0.0;
  switch (static_cast<int>(hp)) {
    case 0: r1 = chroma; g1 = x; break;
    case 1: r1 = x; g1 = chroma; break;
    case 2: g1 = chroma; b1 = x; break;
    case 3: g1 = x; b1 = chroma; break;
    case 4: r1 = x; b1 = chroma; break;
    default: r1 = chroma; b1 = x; break;  // [300, 360)
  }

  const auto channel = [base](double v) {
    const long rounded = std::lround((v + base) * 255.0);
    return static_cast<std::uint8_t>(std::clamp(rounded, 0L, 255L));
  };
  return {channel(r1), channel(g1), channel(b1)};
}

}  // namespace synesthete
