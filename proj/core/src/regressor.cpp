#include "invdes/regressor.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace invdes {
namespace {

constexpr double kScaleFloor = 1e-12;

Eigen::VectorXd monomial_features(const std::vector<std::vector<int>>& exponents,
                                  const Eigen::VectorXd& x) {
  Eigen::VectorXd phi(static_cast<Eigen::Index>(exponents.size()));
  for (std::size_t m = 0; m < exponents.size(); ++m) {
    double v = 1.0;
    for (std::size_t d = 0; d < exponents[m].size(); ++d) {
      for (int e = 0; e < exponents[m][d]; ++e) v *= x(static_cast<Eigen::Index>(d));
    }
    phi(static_cast<Eigen::Index>(m)) = v;
  }
  return phi;
}

}  // namespace

std::vector<std::vector<int>> monomial_exponents(Eigen::Index p, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(p), 0);
  // Recursive enumeration: dim-by-dim, exponent 0 first, so the constant
  // monomial is always index 0.
  auto rec = [&](auto&& self, std::size_t dim, int remaining) -> void {
    if (dim == cur.size()) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      cur[dim] = e;
      self(self, dim + 1, remaining - e);
    }
    cur[dim] = 0;
  };
  rec(rec, 0, degree);
  return out;
}

Eigen::Index FittedRegressor::input_dim() const {
  if (const auto* m = knn()) return m->train_inputs.cols();
  return poly()->input_dim;
}

Eigen::Index FittedRegressor::output_dim() const {
  if (const auto* m = knn()) return m->train_outputs.cols();
  return poly()->coefficients.cols();
}

FittedRegressor fit(const RegressorSpec& spec, const Dataset& ds) {
  ds.validate();
  if (spec.hyperparameter < 1) throw std::invalid_argument("fit: hyperparameter must be >= 1");

  FittedRegressor model;
  model.spec_ = spec;
  if (spec.kind == RegressorKind::kKnn) {
    if (spec.hyperparameter > ds.n()) {
      throw std::invalid_argument("fit: k = " + std::to_string(spec.hyperparameter) +
                                  " exceeds n = " + std::to_string(ds.n()));
    }
    model.impl_ = FittedRegressor::KnnModel{spec.hyperparameter, ds.inputs, ds.outputs};
    return model;
  }

  const int degree = spec.hyperparameter;
  auto exponents = monomial_exponents(ds.p(), degree);
  const auto num_monomials = static_cast<Eigen::Index>(exponents.size());
  if (num_monomials > ds.n()) {
    std::cerr << "warning: polynomial degree " << degree << " has " << num_monomials
              << " monomials but only " << ds.n() << " samples\n";
  }

  Eigen::MatrixXd design(ds.n(), num_monomials);
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    design.row(i) = monomial_features(exponents, ds.inputs.row(i).transpose()).transpose();
  }

  // Standardize every non-constant monomial column; degree-6 features on
  // [-pi, pi]^3 span several orders of magnitude otherwise.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(num_monomials);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(num_monomials);
  for (Eigen::Index c = 1; c < num_monomials; ++c) {
    mean(c) = design.col(c).mean();
    const double var =
        (design.col(c).array() - mean(c)).square().sum() / static_cast<double>(ds.n());
    const double sd = std::sqrt(var);
    scale(c) = sd > kScaleFloor ? sd : 1.0;
  }
  Eigen::MatrixXd standardized = (design.rowwise() - mean.transpose()).array().rowwise() /
                                 scale.transpose().array();

  // Rank-revealing orthogonal factorization; yields the minimum-norm
  // solution when the design is rank deficient.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(standardized);
  Eigen::MatrixXd coefficients = cod.solve(ds.outputs);
  if (!coefficients.allFinite()) throw std::runtime_error("fit: non-finite coefficients");

  model.impl_ = FittedRegressor::PolyModel{degree, std::move(exponents), std::move(coefficients),
                                           std::move(mean), std::move(scale), ds.p()};
  return model;
}

Eigen::VectorXd FittedRegressor::predict(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim()) {
    throw std::invalid_argument("predict: expected " + std::to_string(input_dim()) +
                                "-dimensional input, got " + std::to_string(x.size()));
  }
  if (!x.allFinite()) throw std::invalid_argument("predict: non-finite input");

  if (const auto* m = knn()) {
    const Eigen::Index n = m->train_inputs.rows();
    Eigen::VectorXd d2 = (m->train_inputs.rowwise() - x.transpose()).rowwise().squaredNorm();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    // Total order (distance, row index) makes the neighbor set unique.
    const auto cmp = [&d2](Eigen::Index a, Eigen::Index b) {
      if (d2(a) != d2(b)) return d2(a) < d2(b);
      return a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + (m->k - 1), idx.end(), cmp);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(m->train_outputs.cols());
    std::sort(idx.begin(), idx.begin() + m->k, cmp);
    for (int j = 0; j < m->k; ++j) {
      mean += m->train_outputs.row(idx[static_cast<std::size_t>(j)]).transpose();
    }
    return mean / static_cast<double>(m->k);
  }

  const auto* pm = poly();
  Eigen::VectorXd phi = monomial_features(pm->exponents, x);
  phi = (phi - pm->feature_mean).array() / pm->feature_scale.array();
  return pm->coefficients.transpose() * phi;
}

Eigen::MatrixXd FittedRegressor::predict_batch(const Eigen::MatrixXd& xs) const {
  Eigen::MatrixXd out(xs.rows(), output_dim());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    out.row(i) = predict(xs.row(i).transpose()).transpose();
  }
  return out;
}

Eigen::VectorXd r2_score(const FittedRegressor& model, const Dataset& ds) {
  ds.validate();
  if (ds.p() != model.input_dim() || ds.t() != model.output_dim()) {
    throw std::invalid_argument("r2_score: dataset dimensions do not match model");
  }
  const Eigen::MatrixXd pred = model.predict_batch(ds.inputs);
  Eigen::VectorXd r2(ds.t());
  for (Eigen::Index j = 0; j < ds.t(); ++j) {
    const double mean = ds.outputs.col(j).mean();
    const double ss_tot = (ds.outputs.col(j).array() - mean).square().sum();
    const double ss_res = (ds.outputs.col(j) - pred.col(j)).squaredNorm();
    if (ss_tot == 0.0) {
      r2(j) = ss_res == 0.0 ? 1.0 : 0.0;
    } else {
      r2(j) = 1.0 - ss_res / ss_tot;
    }
  }
  return r2;
}

nlohmann::json FittedRegressor::to_json() const {
  nlohmann::json j;
  j["version"] = "1";
  if (const auto* m = knn()) {
    j["kind"] = "knn";
    j["k"] = m->k;
    j["train_inputs"] = std::vector<std::vector<double>>();
    j["train_outputs"] = std::vector<std::vector<double>>();
    for (Eigen::Index i = 0; i < m->train_inputs.rows(); ++i) {
      std::vector<double> xi(m->train_inputs.cols()), yi(m->train_outputs.cols());
      for (Eigen::Index c = 0; c < m->train_inputs.cols(); ++c) xi[c] = m->train_inputs(i, c);
      for (Eigen::Index c = 0; c < m->train_outputs.cols(); ++c) yi[c] = m->train_outputs(i, c);
      j["train_inputs"].push_back(xi);
      j["train_outputs"].push_back(yi);
    }
    return j;
  }
  const auto* pm = poly();
  j["kind"] = "polynomial";
  j["degree"] = pm->degree;
  j["input_dim"] = pm->input_dim;
  j["exponents"] = pm->exponents;
  std::vector<std::vector<double>> coeffs;
  for (Eigen::Index r = 0; r < pm->coefficients.rows(); ++r) {
    std::vector<double> row(pm->coefficients.cols());
    for (Eigen::Index c = 0; c < pm->coefficients.cols(); ++c) row[c] = pm->coefficients(r, c);
    coeffs.push_back(row);
  }
  j["coefficients"] = coeffs;
  j["feature_mean"] = std::vector<double>(pm->feature_mean.begin(), pm->feature_mean.end());
  j["feature_scale"] = std::vector<double>(pm->feature_scale.begin(), pm->feature_scale.end());
  return j;
}

FittedRegressor FittedRegressor::from_json(const nlohmann::json& j) {
  if (j.at("version").get<std::string>() != "1") {
    throw std::runtime_error("model: unsupported version");
  }
  FittedRegressor model;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "knn") {
    KnnModel m;
    m.k = j.at("k").get<int>();
    const auto xs = j.at("train_inputs").get<std::vector<std::vector<double>>>();
    const auto ys = j.at("train_outputs").get<std::vector<std::vector<double>>>();
    if (xs.empty() || xs.size() != ys.size()) throw std::runtime_error("model: bad training data");
    m.train_inputs.resize(static_cast<Eigen::Index>(xs.size()),
                          static_cast<Eigen::Index>(xs[0].size()));
    m.train_outputs.resize(static_cast<Eigen::Index>(ys.size()),
                           static_cast<Eigen::Index>(ys[0].size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t c = 0; c < xs[i].size(); ++c) {
        m.train_inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = xs[i][c];
      }
      for (std::size_t c = 0; c < ys[i].size(); ++c) {
        m.train_outputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = ys[i][c];
      }
    }
    model.spec_ = RegressorSpec::knn(m.k);
    model.impl_ = std::move(m);
    return model;
  }
  if (kind != "polynomial") throw std::runtime_error("model: unknown kind \"" + kind + "\"");
  PolyModel pm;
  pm.degree = j.at("degree").get<int>();
  pm.input_dim = j.at("input_dim").get<Eigen::Index>();
  pm.exponents = j.at("exponents").get<std::vector<std::vector<int>>>();
  const auto coeffs = j.at("coefficients").get<std::vector<std::vector<double>>>();
  if (coeffs.empty()) throw std::runtime_error("model: empty coefficients");
  pm.coefficients.resize(static_cast<Eigen::Index>(coeffs.size()),
                         static_cast<Eigen::Index>(coeffs[0].size()));
  for (std::size_t r = 0; r < coeffs.size(); ++r) {
    for (std::size_t c = 0; c < coeffs[r].size(); ++c) {
      pm.coefficients(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = coeffs[r][c];
    }
  }
  const auto mean = j.at("feature_mean").get<std::vector<double>>();
  const auto scale = j.at("feature_scale").get<std::vector<double>>();
  pm.feature_mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                                      static_cast<Eigen::Index>(mean.size()));
  pm.feature_scale = Eigen::Map<const Eigen::VectorXd>(scale.data(),
                                                       static_cast<Eigen::Index>(scale.size()));
  model.spec_ = RegressorSpec::polynomial(pm.degree);
  model.impl_ = std::move(pm);
  return model;
}

}  // namespace invdes
