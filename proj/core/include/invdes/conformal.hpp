#pragma once

#include <Eigen/Dense>
#include <vector>

#include <json.hpp>

#include "invdes/dataset.hpp"
#include "invdes/regressor.hpp"
#include "invdes/rng.hpp"

namespace invdes {

// Partition of {0..n-1} into K folds whose sizes differ by at most one.
struct FoldAssignment {
  int num_folds = 0;
  std::vector<int> membership;  // sample index -> fold in [0, K)

  static FoldAssignment make(Eigen::Index n, int num_folds, RngSeed seed);
};

// Cross-validation conformal state: K fold models (each fitted with its fold
// held out), the n x t nonnegative holdout residuals, and the miscoverage
// level. Residuals are computed once and reused for every query point.
struct ConformalCalibration {
  FoldAssignment folds;
  std::vector<FittedRegressor> fold_models;  // size K
  Eigen::MatrixXd residuals;                 // n x t, |y_ij - mu_{-fold(i)}(x_i)_j|
  double alpha = 0.1;

  Eigen::Index n() const { return residuals.rows(); }
  Eigen::Index t() const { return residuals.cols(); }
  Eigen::Index p() const;

  // Same folds, models and residuals at a different miscoverage level.
  ConformalCalibration with_alpha(double new_alpha) const;

  nlohmann::json to_json() const;
  static ConformalCalibration from_json(const nlohmann::json& j);
};

ConformalCalibration calibrate(const RegressorSpec& spec, const Dataset& ds, int num_folds,
                               double alpha, RngSeed seed);

enum class QuantileSide { kLower, kUpper };

// Finite-sample-corrected empirical quantile: upper side takes the
// ceil((1-alpha)(n+1))-th smallest value (clamped to the maximum), lower the
// floor(alpha(n+1))-th smallest (clamped to the minimum).
double conformal_quantile(std::vector<double> values, double alpha, QuantileSide side);

// CV+ interval at x: per output j, quantiles of the n fold-model predictions
// shifted down/up by the holdout residuals.
PredictionInterval interval(const ConformalCalibration& cal, const Eigen::VectorXd& x);

bool contains(const PredictionInterval& iv, const TargetSpec& target);

}  // namespace invdes
