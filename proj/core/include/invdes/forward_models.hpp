#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "invdes/dataset.hpp"
#include "invdes/rng.hpp"

namespace invdes {

// Pure deterministic map from a p-vector of design variables to a t-vector
// of quantities of interest, with a declared input box.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;
  virtual Eigen::Index input_dim() const = 0;
  virtual Eigen::Index output_dim() const = 0;
  virtual std::vector<std::pair<double, double>> input_box() const = 0;
  virtual Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd evaluate_batch(const Eigen::MatrixXd& xs) const;
};

// sin(x1) + a*sin(x2)^2 + b*x3^4*sin(x1)
double ishigami1(const Eigen::VectorXd& x, double a, double b);

// Two-output variant: [f1, 0.1*(sin(x1) + 7 sin(x2)^2 + 0.05 x3^4 sin(x1))].
Eigen::Vector2d ishigami2(const Eigen::VectorXd& x);

// x^3 - 0.5 x^2
double cubic(double x);

class Ishigami1Model final : public ForwardModel {
 public:
  explicit Ishigami1Model(double a = 7.0, double b = 0.1) : a_(a), b_(b) {}
  Eigen::Index input_dim() const override { return 3; }
  Eigen::Index output_dim() const override { return 1; }
  std::vector<std::pair<double, double>> input_box() const override;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const override;
  double a() const { return a_; }
  double b() const { return b_; }

 private:
  double a_;
  double b_;
};

class Ishigami2Model final : public ForwardModel {
 public:
  Eigen::Index input_dim() const override { return 3; }
  Eigen::Index output_dim() const override { return 2; }
  std::vector<std::pair<double, double>> input_box() const override;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const override;
};

class CubicModel final : public ForwardModel {
 public:
  Eigen::Index input_dim() const override { return 1; }
  Eigen::Index output_dim() const override { return 1; }
  std::vector<std::pair<double, double>> input_box() const override;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const override;
};

// File-based adapter for external generators. Each batch evaluation writes
// the inputs as "<stem>.csv" under the work directory, invokes the command
// with that path appended as its final argument, and reads the sibling
// "<stem>.out.csv" back. A nonzero exit status is an error.
class ExternalCommandModel final : public ForwardModel {
 public:
  ExternalCommandModel(std::string command, Eigen::Index p, Eigen::Index t,
                       std::vector<std::pair<double, double>> box,
                       std::filesystem::path work_dir);
  Eigen::Index input_dim() const override { return p_; }
  Eigen::Index output_dim() const override { return t_; }
  std::vector<std::pair<double, double>> input_box() const override { return box_; }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd evaluate_batch(const Eigen::MatrixXd& xs) const override;

 private:
  std::string command_;
  Eigen::Index p_;
  Eigen::Index t_;
  std::vector<std::pair<double, double>> box_;
  std::filesystem::path work_dir_;
};

// Accepts either a bare id string ("ishigami1", "ishigami2", "cubic") or an
// object form with parameters; "external" requires command/p/t/box/work_dir.
std::unique_ptr<ForwardModel> make_forward_model(const nlohmann::json& spec);

// Inputs uniform over the model's box; outputs f(x) plus i.i.d. zero-mean
// Gaussian noise of standard deviation sigma per coordinate.
Dataset generate_dataset(const ForwardModel& fm, Eigen::Index n, double sigma, RngSeed seed);

}  // namespace invdes
