#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "invdes/conformal.hpp"
#include "invdes/forward_models.hpp"
#include "invdes/regressor.hpp"

namespace invdes {

// Spec of either a fixed regressor or a grid to search over.
struct ModelChoice {
  RegressorKind kind;
  std::vector<int> grid;  // singleton means fixed hyperparameter

  static ModelChoice from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Multi-trial protocol: each trial draws a fresh dataset, refits the
// learner and evaluator, and samples a fresh search space per fixed value;
// single-stage and two-stage solves run per target, with ground truth
// through the noiseless forward model. Set refit_per_trial = false to fit
// one dataset and one pair of models for the whole experiment and randomize
// only the search space.
struct ExperimentConfig {
  nlohmann::json forward_model;  // passed to make_forward_model
  double sigma = 0.25;
  Eigen::Index n_train = 2000;
  Eigen::Index n_test = 1000;
  int fixed_dim_index = 0;
  std::vector<double> fixed_dim_values;
  Eigen::Index search_size = 10000;
  Eigen::Index top_b = 10;
  std::vector<double> alphas;
  int folds = 20;
  ModelChoice learner{RegressorKind::kKnn, {6}};
  ModelChoice evaluator{RegressorKind::kPolynomial, {6}};
  int grid_search_folds = 5;
  std::vector<Eigen::VectorXd> targets;
  int trials = 20;
  bool refit_per_trial = true;
  RngSeed seed;

  // Strict parse: unknown fields are an error naming the field.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct TrialStatRow {
  std::string method;      // "single" or "two_stage"
  double alpha;            // NaN for single-stage
  double fixed_value;
  int target_index;        // output coordinate
  double target_value;
  double mean;             // over trials with a chosen solution; NaN if none
  double stddev;           // population std over those trials
  int n_solved;
  int n_trials;
};

struct TrialStats {
  std::vector<TrialStatRow> rows;
};

TrialStats run_experiment(const ExperimentConfig& cfg);

// Columns: method,alpha,x1,target_index,target_value,mean,std,n_solved,n_trials
void write_trial_stats_csv(const std::filesystem::path& path, const TrialStats& stats);

struct CoverageResult {
  Eigen::VectorXd coverage;    // per output: fraction of rows inside the interval
  Eigen::VectorXd mean_width;  // per output
};

CoverageResult coverage_audit(const ConformalCalibration& cal, const Dataset& test);

}  // namespace invdes
