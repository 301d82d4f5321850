#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "invdes/rng.hpp"

namespace invdes {

// n labeled samples with p-dimensional inputs and t-dimensional outputs.
// Immutable by convention once constructed; validate() enforces the shape
// and finiteness invariants.
struct Dataset {
  Eigen::MatrixXd inputs;   // n x p
  Eigen::MatrixXd outputs;  // n x t
  std::vector<std::string> feature_names;  // optional, size p when present
  std::vector<std::string> output_names;   // optional, size t when present

  Eigen::Index n() const { return inputs.rows(); }
  Eigen::Index p() const { return inputs.cols(); }
  Eigen::Index t() const { return outputs.cols(); }

  // Throws std::invalid_argument on shape mismatch or non-finite entries.
  void validate() const;
};

// Desired output vector of the inverse problem.
struct TargetSpec {
  Eigen::VectorXd target;
};

// Per-output closed interval [lower[j], upper[j]].
struct PredictionInterval {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

// Disjoint row partition by seeded shuffle: (train, test) with test holding
// exactly n_test rows. Every original row appears in exactly one part.
std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, Eigen::Index n_test,
                                             RngSeed seed);

}  // namespace invdes
