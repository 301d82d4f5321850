#include "invdes/forward_models.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "invdes/csv.hpp"

namespace invdes {

Eigen::MatrixXd ForwardModel::evaluate_batch(const Eigen::MatrixXd& xs) const {
  Eigen::MatrixXd out(xs.rows(), output_dim());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    out.row(i) = evaluate(xs.row(i).transpose()).transpose();
  }
  return out;
}

double ishigami1(const Eigen::VectorXd& x, double a, double b) {
  if (x.size() != 3 || !x.allFinite()) throw std::invalid_argument("ishigami1: need finite 3-vector");
  const double s1 = std::sin(x(0));
  const double s2 = std::sin(x(1));
  const double x3sq = x(2) * x(2);
  return s1 + a * s2 * s2 + b * x3sq * x3sq * s1;
}

Eigen::Vector2d ishigami2(const Eigen::VectorXd& x) {
  if (x.size() != 3 || !x.allFinite()) throw std::invalid_argument("ishigami2: need finite 3-vector");
  const double s1 = std::sin(x(0));
  const double s2 = std::sin(x(1));
  const double x3sq = x(2) * x(2);
  Eigen::Vector2d y;
  // First coordinate is the scalar Ishigami function bit-for-bit.
  y(0) = ishigami1(x, 7.0, 0.1);
  y(1) = 0.1 * (s1 + 7.0 * s2 * s2 + 0.05 * x3sq * x3sq * s1);
  return y;
}

double cubic(double x) { return x * x * x - 0.5 * x * x; }

std::vector<std::pair<double, double>> Ishigami1Model::input_box() const {
  return {{-M_PI, M_PI}, {-M_PI, M_PI}, {-M_PI, M_PI}};
}

Eigen::VectorXd Ishigami1Model::evaluate(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(1);
  y(0) = ishigami1(x, a_, b_);
  return y;
}

std::vector<std::pair<double, double>> Ishigami2Model::input_box() const {
  return {{-M_PI, M_PI}, {-M_PI, M_PI}, {-M_PI, M_PI}};
}

Eigen::VectorXd Ishigami2Model::evaluate(const Eigen::VectorXd& x) const {
  return ishigami2(x);
}

std::vector<std::pair<double, double>> CubicModel::input_box() const {
  return {{-1.0, 1.5}};
}

Eigen::VectorXd CubicModel::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != 1 || !x.allFinite()) throw std::invalid_argument("cubic: need finite scalar");
  Eigen::VectorXd y(1);
  y(0) = cubic(x(0));
  return y;
}

ExternalCommandModel::ExternalCommandModel(std::string command, Eigen::Index p, Eigen::Index t,
                                           std::vector<std::pair<double, double>> box,
                                           std::filesystem::path work_dir)
    : command_(std::move(command)), p_(p), t_(t), box_(std::move(box)),
      work_dir_(std::move(work_dir)) {
  if (p_ < 1 || t_ < 1) throw std::invalid_argument("external model: need p >= 1 and t >= 1");
  if (static_cast<Eigen::Index>(box_.size()) != p_) {
    throw std::invalid_argument("external model: box size must equal p");
  }
  std::filesystem::create_directories(work_dir_);
}

Eigen::VectorXd ExternalCommandModel::evaluate(const Eigen::VectorXd& x) const {
  return evaluate_batch(x.transpose()).row(0).transpose();
}

Eigen::MatrixXd ExternalCommandModel::evaluate_batch(const Eigen::MatrixXd& xs) const {
  if (xs.cols() != p_) throw std::invalid_argument("external model: input dimension mismatch");
  const auto input_path = work_dir_ / "candidates.csv";
  const auto output_path = work_dir_ / "candidates.out.csv";
  std::filesystem::remove(output_path);
  write_matrix_csv(input_path, xs, "x");

  const std::string invocation = command_ + " \"" + input_path.string() + "\"";
  const int status = std::system(invocation.c_str());
  if (status != 0) {
    throw std::runtime_error("external model: command exited with status " +
                             std::to_string(status) + ": " + invocation);
  }
  Eigen::MatrixXd out = load_matrix_csv(output_path, t_);
  if (out.rows() != xs.rows()) {
    throw std::runtime_error("external model: expected " + std::to_string(xs.rows()) +
                             " output rows, got " + std::to_string(out.rows()));
  }
  return out;
}

std::unique_ptr<ForwardModel> make_forward_model(const nlohmann::json& spec) {
  std::string id;
  nlohmann::json obj = nlohmann::json::object();
  if (spec.is_string()) {
    id = spec.get<std::string>();
  } else if (spec.is_object()) {
    id = spec.at("id").get<std::string>();
    obj = spec;
  } else {
    throw std::invalid_argument("forward_model: expected string id or object");
  }

  if (id == "ishigami1") {
    const double a = obj.value("a", 7.0);
    const double b = obj.value("b", 0.1);
    return std::make_unique<Ishigami1Model>(a, b);
  }
  if (id == "ishigami2") return std::make_unique<Ishigami2Model>();
  if (id == "cubic") return std::make_unique<CubicModel>();
  if (id == "external") {
    const auto box_json = obj.at("box").get<std::vector<std::vector<double>>>();
    std::vector<std::pair<double, double>> box;
    for (const auto& b : box_json) {
      if (b.size() != 2) throw std::invalid_argument("forward_model: box entries are [lo, hi]");
      box.emplace_back(b[0], b[1]);
    }
    return std::make_unique<ExternalCommandModel>(
        obj.at("command").get<std::string>(), obj.at("p").get<Eigen::Index>(),
        obj.at("t").get<Eigen::Index>(), std::move(box),
        obj.value("work_dir", std::string("external_model_work")));
  }
  throw std::invalid_argument("forward_model: unknown id \"" + id + "\"");
}

Dataset generate_dataset(const ForwardModel& fm, Eigen::Index n, double sigma, RngSeed seed) {
  if (n < 1) throw std::invalid_argument("generate_dataset: n must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("generate_dataset: sigma must be >= 0");

  const auto box = fm.input_box();
  Dataset ds;
  ds.inputs.resize(n, fm.input_dim());
  auto gen = make_stream(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index d = 0; d < fm.input_dim(); ++d) {
      const auto& [lo, hi] = box[static_cast<std::size_t>(d)];
      ds.inputs(i, d) = uniform_in(gen, lo, hi);
    }
  }
  ds.outputs = fm.evaluate_batch(ds.inputs);
  if (sigma > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < ds.outputs.cols(); ++j) {
        ds.outputs(i, j) += sigma * standard_normal(gen);
      }
    }
  }
  ds.validate();
  return ds;
}

}  // namespace invdes
