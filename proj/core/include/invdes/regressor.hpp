#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include <json.hpp>

#include "invdes/dataset.hpp"

namespace invdes {

enum class RegressorKind { kKnn, kPolynomial };

// Hyperparameter choice: neighbor count for kNN, total degree for the
// multivariate polynomial.
struct RegressorSpec {
  RegressorKind kind;
  int hyperparameter;

  static RegressorSpec knn(int k) { return {RegressorKind::kKnn, k}; }
  static RegressorSpec polynomial(int degree) { return {RegressorKind::kPolynomial, degree}; }

  bool operator==(const RegressorSpec&) const = default;
};

// Fitted point-prediction surrogate. Immutable after fit(); predict is pure
// and safe to call concurrently.
class FittedRegressor {
 public:
  struct KnnModel {
    int k;
    Eigen::MatrixXd train_inputs;   // n x p
    Eigen::MatrixXd train_outputs;  // n x t
  };

  struct PolyModel {
    int degree;
    std::vector<std::vector<int>> exponents;  // monomial exponent tuples, length p each
    Eigen::MatrixXd coefficients;             // monomials x t
    Eigen::VectorXd feature_mean;             // per-monomial standardization
    Eigen::VectorXd feature_scale;
    Eigen::Index input_dim;
  };

  const RegressorSpec& spec() const { return spec_; }
  Eigen::Index input_dim() const;
  Eigen::Index output_dim() const;

  Eigen::VectorXd predict(const Eigen::VectorXd& x) const;
  // One row per query point; same result as row-wise predict.
  Eigen::MatrixXd predict_batch(const Eigen::MatrixXd& xs) const;

  nlohmann::json to_json() const;
  static FittedRegressor from_json(const nlohmann::json& j);

  const KnnModel* knn() const { return std::get_if<KnnModel>(&impl_); }
  const PolyModel* poly() const { return std::get_if<PolyModel>(&impl_); }

  friend FittedRegressor fit(const RegressorSpec& spec, const Dataset& ds);

 private:
  RegressorSpec spec_{RegressorKind::kKnn, 1};
  std::variant<KnnModel, PolyModel> impl_;
};

// Empirical risk minimization with quadratic loss. kNN stores the training
// data verbatim; the polynomial solves a rank-revealing least-squares problem
// on standardized monomial features (minimum-norm on rank deficiency).
FittedRegressor fit(const RegressorSpec& spec, const Dataset& ds);

// Per-output coefficient of determination 1 - SS_res/SS_tot. When SS_tot is
// zero the convention is 1 for a perfect fit and 0 otherwise.
Eigen::VectorXd r2_score(const FittedRegressor& model, const Dataset& ds);

// All exponent tuples (e_1..e_p) with sum <= degree, constant tuple first.
std::vector<std::vector<int>> monomial_exponents(Eigen::Index p, int degree);

}  // namespace invdes
