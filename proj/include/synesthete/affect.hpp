#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "synesthete/expression.hpp"
#include "synesthete/regression.hpp"

namespace synesthete {

// A point in Pleasure/Arousal/Dominance space, each axis nominally [-1, 1].
struct PadPoint {
  double p = 0.0;
  double a = 0.0;
  double d = 0.0;
};

PadPoint clamped(const PadPoint& e);
bool pad_in_range(const PadPoint& e);

Eigen::Vector3d to_vector(const PadPoint& e);
PadPoint pad_from_vector(const Eigen::Vector3d& v);

// Emotion label -> PAD anchor lookup. Labels are unique case-insensitively
// and at least two entries are required.
struct PadAnchorTable {
  struct Entry {
    std::string label;
    PadPoint pad;
  };

  std::vector<Entry> entries;

  const Entry* find(std::string_view label) const;
  void validate() const;
};

// Anchors from the bundled emotion/color table's PAD columns.
PadAnchorTable default_anchor_table();

PadAnchorTable anchor_table_from_json(const std::string& text);
std::string anchor_table_to_json(const PadAnchorTable& table);
PadAnchorTable load_anchor_table(const std::filesystem::path& path);

struct AffectTrainingSet {
  std::vector<std::pair<ExpressionVector, PadPoint>> rows;
};

// Pairs each labeled expression with its anchor PAD, order preserved.
// Throws UnknownLabel naming the first offending row.
AffectTrainingSet build_affect_training_set(
    const std::vector<std::pair<ExpressionVector, std::string>>& labeled,
    const PadAnchorTable& anchors);

LinearModel train_affect(const AffectTrainingSet& ts, double lambda);

// Mean PAD prediction, optionally clamped componentwise into [-1, 1].
PadPoint to_pad(const LinearModel& model, const ExpressionVector& v,
                bool clamp);

// Stochastic variant: mean plus the model's Gaussian residual noise.
PadPoint to_pad_sampled(const LinearModel& model, const ExpressionVector& v,
                        bool clamp, std::uint64_t rng_seed);

// Labeled-expression training data: CSV rows of 7 feature columns then an
// emotion label; '#' lines and an optional non-numeric header are skipped.
std::vector<std::pair<ExpressionVector, std::string>>
load_labeled_expressions_csv(std::istream& in);
std::vector<std::pair<ExpressionVector, std::string>>
load_labeled_expressions_csv(const std::filesystem::path& path);

}  // namespace synesthete
