#include "invdes/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace invdes {

FoldAssignment FoldAssignment::make(Eigen::Index n, int num_folds, RngSeed seed) {
  if (num_folds < 2 || num_folds > n) {
    throw std::invalid_argument("folds: K must satisfy 2 <= K <= n");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto gen = make_stream(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(uniform01(gen) * static_cast<double>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  // Contiguous blocks over the shuffled order; the first n % K folds get one
  // extra sample, so sizes differ by at most one.
  FoldAssignment fa;
  fa.num_folds = num_folds;
  fa.membership.assign(static_cast<std::size_t>(n), 0);
  const Eigen::Index base = n / num_folds;
  const Eigen::Index extra = n % num_folds;
  Eigen::Index pos = 0;
  for (int k = 0; k < num_folds; ++k) {
    const Eigen::Index size = base + (k < extra ? 1 : 0);
    for (Eigen::Index s = 0; s < size; ++s) {
      fa.membership[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])] = k;
    }
  }
  return fa;
}

Eigen::Index ConformalCalibration::p() const {
  return fold_models.empty() ? 0 : fold_models.front().input_dim();
}

ConformalCalibration ConformalCalibration::with_alpha(double new_alpha) const {
  if (!(new_alpha > 0.0 && new_alpha < 1.0)) {
    throw std::invalid_argument("with_alpha: alpha must be in (0, 1)");
  }
  ConformalCalibration copy = *this;
  copy.alpha = new_alpha;
  return copy;
}

ConformalCalibration calibrate(const RegressorSpec& spec, const Dataset& ds, int num_folds,
                               double alpha, RngSeed seed) {
  ds.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("calibrate: alpha must be in (0, 1)");
  }
  ConformalCalibration cal;
  cal.alpha = alpha;
  cal.folds = FoldAssignment::make(ds.n(), num_folds, seed);
  cal.residuals.resize(ds.n(), ds.t());
  cal.fold_models.reserve(static_cast<std::size_t>(num_folds));

  for (int k = 0; k < num_folds; ++k) {
    Eigen::Index n_in = 0;
    for (int f : cal.folds.membership) n_in += (f != k);
    Dataset train;
    train.inputs.resize(n_in, ds.p());
    train.outputs.resize(n_in, ds.t());
    Eigen::Index ti = 0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
      if (cal.folds.membership[static_cast<std::size_t>(i)] != k) {
        train.inputs.row(ti) = ds.inputs.row(i);
        train.outputs.row(ti++) = ds.outputs.row(i);
      }
    }
    cal.fold_models.push_back(fit(spec, train));
  }

  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    const int k = cal.folds.membership[static_cast<std::size_t>(i)];
    const Eigen::VectorXd pred =
        cal.fold_models[static_cast<std::size_t>(k)].predict(ds.inputs.row(i).transpose());
    cal.residuals.row(i) = (ds.outputs.row(i).transpose() - pred).cwiseAbs().transpose();
  }
  return cal;
}

double conformal_quantile(std::vector<double> values, double alpha, QuantileSide side) {
  if (values.empty()) throw std::invalid_argument("conformal_quantile: empty input");
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  std::ptrdiff_t rank;  // 1-based rank of the order statistic to return
  if (side == QuantileSide::kUpper) {
    rank = static_cast<std::ptrdiff_t>(
        std::ceil((1.0 - alpha) * static_cast<double>(n + 1)));
    if (rank > n) rank = n;  // clamped to the maximum
    if (rank < 1) rank = 1;
  } else {
    rank = static_cast<std::ptrdiff_t>(
        std::floor(alpha * static_cast<double>(n + 1)));
    if (rank < 1) rank = 1;  // clamped to the minimum
    if (rank > n) rank = n;
  }
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[static_cast<std::size_t>(rank - 1)];
}

PredictionInterval interval(const ConformalCalibration& cal, const Eigen::VectorXd& x) {
  if (cal.fold_models.empty() || cal.n() == 0) {
    throw std::invalid_argument("interval: empty calibration");
  }
  if (x.size() != cal.p()) throw std::invalid_argument("interval: input dimension mismatch");

  // One prediction per fold model, then fan out over the n samples.
  Eigen::MatrixXd fold_pred(static_cast<Eigen::Index>(cal.fold_models.size()), cal.t());
  for (std::size_t k = 0; k < cal.fold_models.size(); ++k) {
    fold_pred.row(static_cast<Eigen::Index>(k)) = cal.fold_models[k].predict(x).transpose();
  }

  PredictionInterval iv;
  iv.lower.resize(cal.t());
  iv.upper.resize(cal.t());
  std::vector<double> lo(static_cast<std::size_t>(cal.n()));
  std::vector<double> hi(static_cast<std::size_t>(cal.n()));
  for (Eigen::Index j = 0; j < cal.t(); ++j) {
    for (Eigen::Index i = 0; i < cal.n(); ++i) {
      const double mu = fold_pred(cal.folds.membership[static_cast<std::size_t>(i)], j);
      lo[static_cast<std::size_t>(i)] = mu - cal.residuals(i, j);
      hi[static_cast<std::size_t>(i)] = mu + cal.residuals(i, j);
    }
    iv.lower(j) = conformal_quantile(lo, cal.alpha, QuantileSide::kLower);
    iv.upper(j) = conformal_quantile(hi, cal.alpha, QuantileSide::kUpper);
  }
  return iv;
}

bool contains(const PredictionInterval& iv, const TargetSpec& target) {
  if (iv.lower.size() != target.target.size()) {
    throw std::invalid_argument("contains: dimension mismatch");
  }
  for (Eigen::Index j = 0; j < target.target.size(); ++j) {
    if (target.target(j) < iv.lower(j) || target.target(j) > iv.upper(j)) return false;
  }
  return true;
}

nlohmann::json ConformalCalibration::to_json() const {
  nlohmann::json j;
  j["version"] = "1";
  j["alpha"] = alpha;
  j["num_folds"] = folds.num_folds;
  j["membership"] = folds.membership;
  j["fold_models"] = nlohmann::json::array();
  for (const auto& m : fold_models) j["fold_models"].push_back(m.to_json());
  std::vector<std::vector<double>> res;
  for (Eigen::Index i = 0; i < residuals.rows(); ++i) {
    std::vector<double> row(residuals.cols());
    for (Eigen::Index c = 0; c < residuals.cols(); ++c) row[c] = residuals(i, c);
    res.push_back(row);
  }
  j["residuals"] = res;
  return j;
}

ConformalCalibration ConformalCalibration::from_json(const nlohmann::json& j) {
  if (j.at("version").get<std::string>() != "1") {
    throw std::runtime_error("calibration: unsupported version");
  }
  ConformalCalibration cal;
  cal.alpha = j.at("alpha").get<double>();
  cal.folds.num_folds = j.at("num_folds").get<int>();
  cal.folds.membership = j.at("membership").get<std::vector<int>>();
  for (const auto& m : j.at("fold_models")) {
    cal.fold_models.push_back(FittedRegressor::from_json(m));
  }
  const auto res = j.at("residuals").get<std::vector<std::vector<double>>>();
  if (res.empty()) throw std::runtime_error("calibration: empty residuals");
  cal.residuals.resize(static_cast<Eigen::Index>(res.size()),
                       static_cast<Eigen::Index>(res[0].size()));
  for (std::size_t i = 0; i < res.size(); ++i) {
    for (std::size_t c = 0; c < res[i].size(); ++c) {
      cal.residuals(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = res[i][c];
    }
  }
  return cal;
}

}  // namespace invdes
