#include "synesthete/affect.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "synesthete/errors.hpp"
#include "synesthete/io_util.hpp"

namespace synesthete {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

PadPoint clamped(const PadPoint& e) {
  return {std::clamp(e.p, -1.0, 1.0), std::clamp(e.a, -1.0, 1.0),
          std::clamp(e.d, -1.0, 1.0)};
}

bool pad_in_range(const PadPoint& e) {
  return e.p >= -1.0 && e.p <= 1.0 && e.a >= -1.0 && e.a <= 1.0 &&
         e.d >= -1.0 && e.d <= 1.0;
}

Eigen::Vector3d to_vector(const PadPoint& e) { return {e.p, e.a, e.d}; }

PadPoint pad_from_vector(const Eigen::Vector3d& v) {
  return {v(0), v(1), v(2)};
}

const PadAnchorTable::Entry* PadAnchorTable::find(
    std::string_view label) const {
  const std::string needle = lowercase(label);
  for (const Entry& e : entries) {
    if (lowercase(e.label) == needle) return &e;
  }
  return nullptr;
}

void PadAnchorTable::validate() const {
  if (entries.size() < 2) {
    throw InvalidInput("anchor table needs at least 2 entries");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!std::isfinite(e.pad.p) || !std::isfinite(e.pad.a) ||
        !std::isfinite(e.pad.d)) {
      throw InvalidInput("anchor '" + e.label + "' has non-finite PAD");
    }
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      if (lowercase(e.label) == lowercase(entries[j].label)) {
        throw InvalidInput("duplicate anchor label '" + e.label + "'");
      }
    }
  }
}

PadAnchorTable default_anchor_table() {
  PadAnchorTable t;
  t.entries = {
      {"joy", {0.81, 0.51, 0.46}},
      {"ecstasy", {0.62, 0.75, 0.38}},
      {"fear", {-0.64, 0.60, -0.43}},
      {"terror", {-0.62, 0.82, -0.43}},
      {"amazement", {0.16, 0.88, -0.15}},
      {"sadness", {-0.63, -0.27, -0.33}},
      {"boredom", {-0.65, -0.62, -0.33}},
      {"annoyance", {-0.58, 0.40, 0.01}},
      {"anger", {-0.51, 0.59, 0.25}},
      {"interest", {0.64, 0.51, 0.17}},
      {"vigilance", {0.49, 0.57, 0.45}},
  };
  return t;
}

PadAnchorTable anchor_table_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("invalid anchor JSON: ") + e.what());
  }
  if (!doc.is_array()) throw InvalidInput("anchor JSON must be a list");

  PadAnchorTable table;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("label") || !item.contains("p") ||
        !item.contains("a") || !item.contains("d")) {
      throw InvalidInput("anchor entries need label, p, a, d");
    }
    table.entries.push_back({item["label"].get<std::string>(),
                             {item["p"].get<double>(), item["a"].get<double>(),
                              item["d"].get<double>()}});
  }
  table.validate();
  return table;
}

std::string anchor_table_to_json(const PadAnchorTable& table) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& e : table.entries) {
    doc.push_back({{"label", e.label},
                   {"p", e.pad.p},
                   {"a", e.pad.a},
                   {"d", e.pad.d}});
  }
  return doc.dump(2) + "\n";
}

PadAnchorTable load_anchor_table(const std::filesystem::path& path) {
  return anchor_table_from_json(read_text_file(path));
}

AffectTrainingSet build_affect_training_set(
    const std::vector<std::pair<ExpressionVector, std::string>>& labeled,
    const PadAnchorTable& anchors) {
  anchors.validate();
  AffectTrainingSet ts;
  ts.rows.reserve(labeled.size());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const auto* entry = anchors.find(labeled[i].second);
    if (entry == nullptr) throw UnknownLabel(labeled[i].second, i);
    ts.rows.emplace_back(labeled[i].first, entry->pad);
  }
  return ts;
}

LinearModel train_affect(const AffectTrainingSet& ts, double lambda) {
  if (ts.rows.empty()) {
    throw InvalidInput("affect training set is empty");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(ts.rows.size());
  Eigen::MatrixXd X(n, 7);
  Eigen::MatrixXd Y(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [v, pad] = ts.rows[static_cast<std::size_t>(i)];
    for (int j = 0; j < 7; ++j) X(i, j) = v.v[static_cast<std::size_t>(j)];
    Y.row(i) = to_vector(pad).transpose();
  }
  LinearModel model = fit_ridge(X, Y, lambda);
  model.kind = ModelKind::affect;
  return model;
}

namespace {

Eigen::VectorXd expression_as_vector(const ExpressionVector& v) {
  Eigen::VectorXd x(7);
  for (int j = 0; j < 7; ++j) x(j) = v.v[static_cast<std::size_t>(j)];
  return x;
}

void check_affect_model(const LinearModel& model) {
  if (model.kind != ModelKind::affect || model.d_in() != 7 ||
      model.d_out() != 3) {
    throw DimensionMismatch("model is not a 7 -> 3 affect model");
  }
}

}  // namespace

PadPoint to_pad(const LinearModel& model, const ExpressionVector& v,
                bool clamp) {
  check_affect_model(model);
  const Eigen::VectorXd y = predict(model, expression_as_vector(v));
  const PadPoint e{y(0), y(1), y(2)};
  return clamp ? clamped(e) : e;
}

PadPoint to_pad_sampled(const LinearModel& model, const ExpressionVector& v,
                        bool clamp, std::uint64_t rng_seed) {
  check_affect_model(model);
  const Eigen::VectorXd y = sample(model, expression_as_vector(v), rng_seed);
  const PadPoint e{y(0), y(1), y(2)};
  return clamp ? clamped(e) : e;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string field = line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    // trim
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string()
                                            : field.substr(b, e - b + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::vector<std::pair<ExpressionVector, std::string>>
load_labeled_expressions_csv(std::istream& in) {
  std::vector<std::pair<ExpressionVector, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  bool first_data_line = true;
  std::int64_t next_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.front() == '#') continue;

    const auto fields = split_csv(line);
    if (fields.size() != 8) {
      throw ParseError(line_no, "expected 7 features and a label, found " +
                                    std::to_string(fields.size()) +
                                    " fields");
    }
    double probe = 0.0;
    if (first_data_line && !parse_double(fields[0], probe)) {
      first_data_line = false;  // header row
      continue;
    }
    first_data_line = false;

    ExpressionVector v;
    v.frame_id = next_id++;
    for (std::size_t j = 0; j < 7; ++j) {
      if (!parse_double(fields[j], v.v[j])) {
        throw ParseError(line_no, "not a number: '" + fields[j] + "'");
      }
    }
    if (fields[7].empty()) throw ParseError(line_no, "empty label");
    out.emplace_back(v, fields[7]);
  }
  return out;
}

std::vector<std::pair<ExpressionVector, std::string>>
load_labeled_expressions_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  return load_labeled_expressions_csv(in);
}

}  // namespace synesthete
