#include "invdes/solver.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace invdes {
namespace {

void check_dims(Eigen::Index learner_p, Eigen::Index learner_t, const SearchSpace& omega,
                const TargetSpec& target) {
  if (omega.m() < 1) throw std::invalid_argument("solve: empty search space");
  if (omega.p() != learner_p) {
    throw std::invalid_argument("solve: search space dimension does not match learner");
  }
  if (target.target.size() != learner_t) {
    throw std::invalid_argument("solve: target dimension does not match learner outputs");
  }
}

// Rows of `predictions` scored against the target; returns indices of the B
// smallest in ascending (score, row) order plus the score vector.
std::vector<Eigen::Index> select_top(const Eigen::VectorXd& scores, Eigen::Index top_b) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(scores.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const auto cmp = [&scores](Eigen::Index a, Eigen::Index b) {
    if (scores(a) != scores(b)) return scores(a) < scores(b);
    return a < b;
  };
  if (top_b < scores.size()) {
    std::nth_element(idx.begin(), idx.begin() + (top_b - 1), idx.end(), cmp);
    idx.resize(static_cast<std::size_t>(top_b));
  }
  std::sort(idx.begin(), idx.end(), cmp);
  return idx;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kAccepted: return "accepted";
    case Verdict::kRejectedByInterval: return "rejected_by_interval";
    case Verdict::kNotEvaluated: return "not_evaluated";
  }
  return "unknown";
}

Candidate solve_single_stage(const FittedRegressor& learner, const SearchSpace& omega,
                             const TargetSpec& target, double gamma) {
  check_dims(learner.input_dim(), learner.output_dim(), omega, target);
  if (gamma < 0.0) throw std::invalid_argument("solve_single_stage: gamma must be >= 0");

  Candidate best;
  double best_objective = 0.0;
  bool first = true;
  for (Eigen::Index i = 0; i < omega.m(); ++i) {
    const Eigen::VectorXd x = omega.candidates.row(i).transpose();
    const Eigen::VectorXd pred = learner.predict(x);
    const double misfit = (pred - target.target).squaredNorm();
    const double objective = misfit + gamma * x.squaredNorm();
    if (first || objective < best_objective) {
      best_objective = objective;
      best = Candidate{i, x, misfit, pred, std::nullopt, Verdict::kNotEvaluated};
      first = false;
    }
  }
  return best;
}

std::vector<Candidate> screen_top_b(const Eigen::MatrixXd& predictions,
                                    const SearchSpace& omega, const TargetSpec& target,
                                    Eigen::Index top_b) {
  if (predictions.rows() != omega.m()) {
    throw std::invalid_argument("screen_top_b: prediction row count mismatch");
  }
  if (predictions.cols() != target.target.size()) {
    throw std::invalid_argument("screen_top_b: target dimension mismatch");
  }
  if (top_b < 1 || top_b > omega.m()) {
    throw std::invalid_argument("screen_top_b: B must satisfy 1 <= B <= m");
  }
  const Eigen::VectorXd scores =
      (predictions.rowwise() - target.target.transpose()).rowwise().squaredNorm();
  const auto picked = select_top(scores, top_b);
  std::vector<Candidate> out;
  out.reserve(picked.size());
  for (Eigen::Index i : picked) {
    out.push_back(Candidate{i, omega.candidates.row(i).transpose(), scores(i),
                            predictions.row(i).transpose(), std::nullopt,
                            Verdict::kNotEvaluated});
  }
  return out;
}

std::vector<Candidate> screen_top_b(const FittedRegressor& learner, const SearchSpace& omega,
                                    const TargetSpec& target, Eigen::Index top_b) {
  check_dims(learner.input_dim(), learner.output_dim(), omega, target);
  return screen_top_b(learner.predict_batch(omega.candidates), omega, target, top_b);
}

SolveReport solve_two_stage(const Eigen::MatrixXd& predictions,
                            const ConformalCalibration& cal, const SearchSpace& omega,
                            const TargetSpec& target, Eigen::Index top_b) {
  if (cal.t() != target.target.size()) {
    throw std::invalid_argument("solve_two_stage: calibration output dimension mismatch");
  }
  if (cal.p() != omega.p()) {
    throw std::invalid_argument("solve_two_stage: calibration input dimension mismatch");
  }
  SolveReport report;
  report.candidates = screen_top_b(predictions, omega, target, top_b);
  report.top_b = top_b;
  report.alpha = cal.alpha;
  report.folds = cal.folds.num_folds;

  // Early-exit walk in score order; candidates past the first acceptance
  // keep verdict NotEvaluated.
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    Candidate& c = report.candidates[i];
    c.interval = interval(cal, c.x);
    if (contains(*c.interval, target)) {
      c.verdict = Verdict::kAccepted;
      report.chosen = i;
      break;
    }
    c.verdict = Verdict::kRejectedByInterval;
  }
  return report;
}

SolveReport solve_two_stage(const FittedRegressor& learner, const ConformalCalibration& cal,
                            const SearchSpace& omega, const TargetSpec& target,
                            Eigen::Index top_b) {
  check_dims(learner.input_dim(), learner.output_dim(), omega, target);
  return solve_two_stage(learner.predict_batch(omega.candidates), cal, omega, target, top_b);
}

nlohmann::json SolveReport::to_json() const {
  nlohmann::json j;
  j["version"] = "1";
  j["top_b"] = top_b;
  j["alpha"] = alpha;
  j["folds"] = folds;
  j["chosen"] = chosen ? nlohmann::json(*chosen) : nlohmann::json(nullptr);
  j["candidates"] = nlohmann::json::array();
  for (const auto& c : candidates) {
    nlohmann::json cj;
    cj["row"] = c.row;
    cj["x"] = std::vector<double>(c.x.begin(), c.x.end());
    cj["score"] = c.score;
    cj["predicted"] = std::vector<double>(c.predicted.begin(), c.predicted.end());
    cj["verdict"] = verdict_name(c.verdict);
    if (c.interval) {
      cj["interval_lower"] = std::vector<double>(c.interval->lower.begin(), c.interval->lower.end());
      cj["interval_upper"] = std::vector<double>(c.interval->upper.begin(), c.interval->upper.end());
    }
    j["candidates"].push_back(cj);
  }
  return j;
}

}  // namespace invdes
