#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>

namespace synesthete {

enum class ModelKind { affect, color };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

/// Multivariate ridge model with per-column input standardization baked in.
///
/// Prediction is `weights * ((x - input_mean) / input_scale) + bias`.
/// `noise_cov_diag` holds the per-output mean squared training residual and
/// drives the stochastic `sample` variant; mean prediction ignores it.
struct LinearModel {
  Eigen::MatrixXd weights;         // d_out x d_in, on standardized inputs
  Eigen::VectorXd bias;            // d_out
  Eigen::VectorXd input_mean;      // d_in
  Eigen::VectorXd input_scale;     // d_in, strictly positive
  Eigen::VectorXd noise_cov_diag;  // d_out, >= 0
  double lambda = 0.0;
  ModelKind kind = ModelKind::affect;

  Eigen::Index d_in() const { return weights.cols(); }
  Eigen::Index d_out() const { return weights.rows(); }
};

/// Closed-form ridge fit of Y (n x d_out) on X (n x d_in).
///
/// Inputs are standardized per column (zero-variance columns keep scale 1),
/// a bias column is appended and left unpenalized, and the regularized
/// normal equations are solved by an SPD factorization. With lambda == 0 a
/// rank-deficient system throws SingularSystem instead of pseudo-inverting.
LinearModel fit_ridge(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                      double lambda);

/// Mean prediction; the residual noise term is exposed only through sample().
Eigen::VectorXd predict(const LinearModel& model, const Eigen::VectorXd& x);

/// predict() plus zero-mean Gaussian noise with variances noise_cov_diag.
/// Reproducible for a fixed seed (bitwise, within one platform/stdlib).
Eigen::VectorXd sample(const LinearModel& model, const Eigen::VectorXd& x,
                       std::uint64_t rng_seed);

// Model file round trips are value-exact: doubles are serialized with
// shortest round-trip decimal representations.
std::string model_to_json(const LinearModel& model);
LinearModel model_from_json(const std::string& text);

void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace synesthete
