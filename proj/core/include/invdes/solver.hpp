#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include <json.hpp>

#include "invdes/conformal.hpp"
#include "invdes/search_space.hpp"

namespace invdes {

enum class Verdict { kAccepted, kRejectedByInterval, kNotEvaluated };

const char* verdict_name(Verdict v);

struct Candidate {
  Eigen::Index row = 0;  // index into the search space, also the tie-break key
  Eigen::VectorXd x;
  double score = 0.0;          // squared misfit to the target
  Eigen::VectorXd predicted;   // learner prediction
  std::optional<PredictionInterval> interval;
  Verdict verdict = Verdict::kNotEvaluated;
};

struct SolveReport {
  std::vector<Candidate> candidates;      // ascending by (score, row)
  std::optional<std::size_t> chosen;      // first accepted candidate, if any
  Eigen::Index top_b = 0;
  double alpha = 0.0;
  int folds = 0;

  nlohmann::json to_json() const;
};

// Exhaustive single-stage baseline: minimizes ||f(x) - target||^2 + gamma * ||x||^2
// over all candidates, ties broken by row index. gamma = 0 disables the
// Tikhonov term.
Candidate solve_single_stage(const FittedRegressor& learner, const SearchSpace& omega,
                             const TargetSpec& target, double gamma);

// The B candidates with the smallest squared misfit, ascending, no
// regularization term. Overload with precomputed learner predictions (one
// row per candidate) for callers that score several targets on one space.
std::vector<Candidate> screen_top_b(const FittedRegressor& learner, const SearchSpace& omega,
                                    const TargetSpec& target, Eigen::Index top_b);
std::vector<Candidate> screen_top_b(const Eigen::MatrixXd& predictions,
                                    const SearchSpace& omega, const TargetSpec& target,
                                    Eigen::Index top_b);

// Two-stage solve: screen, then walk candidates in score order computing
// conformal intervals until one contains every target coordinate. Candidates
// past the first acceptance stay NotEvaluated.
SolveReport solve_two_stage(const FittedRegressor& learner, const ConformalCalibration& cal,
                            const SearchSpace& omega, const TargetSpec& target,
                            Eigen::Index top_b);
SolveReport solve_two_stage(const Eigen::MatrixXd& predictions,
                            const ConformalCalibration& cal, const SearchSpace& omega,
                            const TargetSpec& target, Eigen::Index top_b);

}  // namespace invdes
