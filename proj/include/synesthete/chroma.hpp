#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "synesthete/affect.hpp"
#include "synesthete/regression.hpp"

namespace synesthete {

/// Color in cylindrical coordinates: hue in [0, 360) degrees, saturation
/// and third channel in [0, 100] percent. The third channel is lightness
/// under the hsl interpretation and value/brightness under hsv; see
/// hsl_to_rgb.
struct HslColor {
  double h = 0.0;
  double s = 0.0;
  double l = 0.0;
};

/// Wraps hue into [0, 360) and clamps s, l into [0, 100].
HslColor make_hsl_clamped(double h, double s, double l);

/// Throws InvalidInput on any out-of-range or non-finite component.
HslColor make_hsl_strict(double h, double s, double l);

bool hsl_in_range(const HslColor& c);

struct RgbColor {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const RgbColor&) const = default;
};

/// The fixed 3x2 coefficient matrix tying normalized (L, S) to (P, A, D):
///
///   P = 0.69 L + 0.22 S
///   A = -0.31 L + 0.60 S
///   D = -0.76 L + 0.32 S
///
/// plus its cached left pseudoinverse. The constructor verifies
/// pinv * w == I2 to 1e-12.
class MehrabianMatrix {
 public:
  MehrabianMatrix();

  const Eigen::Matrix<double, 3, 2>& w() const { return w_; }
  const Eigen::Matrix<double, 2, 3>& pinv() const { return pinv_; }

  static const MehrabianMatrix& instance();

 private:
  Eigen::Matrix<double, 3, 2> w_;
  Eigen::Matrix<double, 2, 3> pinv_;
};

/// Least-squares inversion of the partial color mapping: the (l, s) pair,
/// in PAD-normalized scale, minimizing |w * [l s]^T - [p a d]^T|.
/// Raw outputs may fall outside [0, 1]; see sl_raw_to_percent.
std::pair<double, double> pad_to_sl(const PadPoint& e);

/// Clamp-and-rescale step from PAD-normalized scale to percent.
double sl_raw_to_percent(double raw);

/// Emotion rows pairing a Plutchik hue with tabulated saturation,
/// lightness, and Mehrabian PAD scores.
struct PlutchikTable {
  struct Row {
    std::string label;
    double h, s, l;  // color columns
    double p, a, d;  // affect columns
  };

  std::vector<Row> rows;

  void validate() const;
};

/// The bundled 11-emotion default table.
PlutchikTable default_plutchik_table();

PlutchikTable plutchik_table_from_json(const std::string& text);
std::string plutchik_table_to_json(const PlutchikTable& table);
PlutchikTable load_plutchik_table(const std::filesystem::path& path);

/// Hue of the table row nearest to e in PAD space (Euclidean); ties go to
/// the earlier row. Throws EmptyTable.
std::pair<double, std::string> nearest_hue(const PadPoint& e,
                                           const PlutchikTable& table);

enum class ColorTrainingMode {
  table,   // tabulated HSL verbatim
  hybrid,  // tabulated H, S/L replaced by rescaled pad_to_sl outputs
};

std::vector<std::pair<PadPoint, HslColor>> build_color_training_set(
    const PlutchikTable& table, ColorTrainingMode mode);

/// Ridge fit of the PAD -> color map. Hue is an angle, so the model
/// regresses (cos h, sin h, s, l) internally and to_color decodes with
/// atan2; model files carry kind=color plus hue_encoding=cos_sin.
LinearModel train_color(
    const std::vector<std::pair<PadPoint, HslColor>>& pairs, double lambda);

/// Mean color prediction; output always satisfies HslColor invariants.
HslColor to_color(const LinearModel& model, const PadPoint& e);

/// Stochastic variant sampling the model's residual noise in encoded space.
HslColor to_color_sampled(const LinearModel& model, const PadPoint& e,
                          std::uint64_t rng_seed);

enum class ColorInterpretation { hsl, hsv };

std::string to_string(ColorInterpretation interp);
ColorInterpretation color_interpretation_from_string(const std::string& s);

/// Standard cylindrical-to-RGB conversion. Under hsl the third channel is
/// lightness (100 = white); under hsv it is brightness (100 = full-intensity
/// hue). Channels round to the nearest 8-bit value.
RgbColor hsl_to_rgb(const HslColor& c,
                    ColorInterpretation interp = ColorInterpretation::hsl);

}  // namespace synesthete
