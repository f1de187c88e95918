#include "synesthete/regression.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

#include "synesthete/errors.hpp"
#include "synesthete/io_util.hpp"

namespace synesthete {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::affect ? "affect" : "color";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "affect") return ModelKind::affect;
  if (s == "color") return ModelKind::color;
  throw InvalidInput("unknown model kind: '" + s + "'");
}

LinearModel fit_ridge(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                      double lambda) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d_in = X.cols();
  const Eigen::Index d_out = Y.cols();

  if (n < 1 || d_in < 1 || d_out < 1) {
    throw DimensionMismatch("fit_ridge needs n >= 1, d_in >= 1, d_out >= 1");
  }
  if (Y.rows() != n) {
    throw DimensionMismatch("X has " + std::to_string(n) + " rows, Y has " +
                            std::to_string(Y.rows()));
  }
  if (!X.allFinite() || !Y.allFinite()) {
    throw InvalidInput("fit_ridge: non-finite training data");
  }
  if (!(lambda >= 0.0)) {
    throw InvalidInput("fit_ridge: lambda must be >= 0");
  }

  LinearModel model;
  model.lambda = lambda;
  model.input_mean = X.colwise().mean();

  const Eigen::MatrixXd centered = X.rowwise() - model.input_mean.transpose();
  const Eigen::VectorXd variance =
      centered.array().square().colwise().mean();
  model.input_scale = variance.array().sqrt().max(0.0).matrix();
  for (Eigen::Index j = 0; j < d_in; ++j) {
    if (model.input_scale(j) <= 0.0) model.input_scale(j) = 1.0;
  }

  // Design matrix on standardized inputs, bias column last. Columns of Z
  // have zero mean, so the bias decouples from the penalized block.
  Eigen::MatrixXd design(n, d_in + 1);
  design.leftCols(d_in) =
      centered.array().rowwise() / model.input_scale.transpose().array();
  design.col(d_in).setOnes();

  if (lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < d_in + 1) {
      throw SingularSystem("unregularized Gram matrix is rank-deficient (n=" +
                           std::to_string(n) + ", d_in=" +
                           std::to_string(d_in) + ")");
    }
  }

  Eigen::MatrixXd gram = design.transpose() * design;
  for (Eigen::Index j = 0; j < d_in; ++j) gram(j, j) += lambda;

  const Eigen::MatrixXd coeffs =
      gram.ldlt().solve(design.transpose() * Y);  // (d_in + 1) x d_out

  model.weights = coeffs.topRows(d_in).transpose();
  model.bias = coeffs.row(d_in).transpose();

  const Eigen::MatrixXd residuals = Y - design * coeffs;
  model.noise_cov_diag =
      residuals.array().square().colwise().mean().cwiseMax(0.0);
  return model;
}

namespace {

void check_input(const LinearModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.d_in()) {
    throw DimensionMismatch("input has " + std::to_string(x.size()) +
                            " components, model expects " +
                            std::to_string(model.d_in()));
  }
  if (!x.allFinite()) throw InvalidInput("non-finite prediction input");
}

}  // namespace

Eigen::VectorXd predict(const LinearModel& model, const Eigen::VectorXd& x) {
  check_input(model, x);
  const Eigen::VectorXd z =
      (x - model.input_mean).cwiseQuotient(model.input_scale);
  return model.weights * z + model.bias;
}

Eigen::VectorXd sample(const LinearModel& model, const Eigen::VectorXd& x,
                       std::uint64_t rng_seed) {
  Eigen::VectorXd y = predict(model, x);
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y(i) += std::sqrt(model.noise_cov_diag(i)) * gauss(rng);
  }
  return y;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index rows,
                                 Eigen::Index cols, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw InvalidInput(std::string("model field '") + name +
                       "' has wrong row count");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidInput(std::string("model field '") + name +
                         "' has wrong column count");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, Eigen::Index size,
                                 const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
    throw InvalidInput(std::string("model field '") + name +
                       "' has wrong length");
  }
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    v(i) = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

}  // namespace

std::string model_to_json(const LinearModel& model) {
  nlohmann::json doc;
  doc["kind"] = to_string(model.kind);
  doc["d_in"] = model.d_in();
  doc["d_out"] = model.d_out();
  doc["lambda"] = model.lambda;
  doc["weights"] = matrix_to_json(model.weights);
  doc["bias"] = vector_to_json(model.bias);
  doc["input_mean"] = vector_to_json(model.input_mean);
  doc["input_scale"] = vector_to_json(model.input_scale);
  doc["noise_cov_diag"] = vector_to_json(model.noise_cov_diag);
  if (model.kind == ModelKind::color) doc["hue_encoding"] = "cos_sin";
  return doc.dump(2) + "\n";
}

LinearModel model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("invalid model JSON: ") + e.what());
  }

  for (const char* key : {"kind", "d_in", "d_out", "lambda", "weights",
                          "bias", "input_mean", "input_scale",
                          "noise_cov_diag"}) {
    if (!doc.contains(key)) {
      throw InvalidInput(std::string("model JSON missing field '") + key +
                         "'");
    }
  }

  const auto d_in = doc["d_in"].get<Eigen::Index>();
  const auto d_out = doc["d_out"].get<Eigen::Index>();
  if (d_in < 1 || d_out < 1) throw InvalidInput("model dimensions invalid");

  LinearModel model;
  model.kind = model_kind_from_string(doc["kind"].get<std::string>());
  model.lambda = doc["lambda"].get<double>();
  model.weights = matrix_from_json(doc["weights"], d_out, d_in, "weights");
  model.bias = vector_from_json(doc["bias"], d_out, "bias");
  model.input_mean = vector_from_json(doc["input_mean"], d_in, "input_mean");
  model.input_scale =
      vector_from_json(doc["input_scale"], d_in, "input_scale");
  model.noise_cov_diag =
      vector_from_json(doc["noise_cov_diag"], d_out, "noise_cov_diag");

  if (model.kind == ModelKind::color) {
    if (doc.value("hue_encoding", std::string("cos_sin")) != "cos_sin") {
      throw InvalidInput("unsupported hue encoding: " +
                         doc["hue_encoding"].get<std::string>());
    }
  }

  if (!model.weights.allFinite() || !model.bias.allFinite() ||
      !model.input_mean.allFinite() || !model.input_scale.allFinite() ||
      !model.noise_cov_diag.allFinite()) {
    throw InvalidInput("model JSON contains non-finite values");
  }
  if ((model.input_scale.array() <= 0.0).any()) {
    throw InvalidInput("model input_scale must be strictly positive");
  }
  if (model.lambda < 0.0 || (model.noise_cov_diag.array() < 0.0).any()) {
    throw InvalidInput("model lambda and noise variances must be >= 0");
  }
  return model;
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  write_text_atomic(path, model_to_json(model));
}

LinearModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_text_file(path));
}

}  // namespace synesthete
