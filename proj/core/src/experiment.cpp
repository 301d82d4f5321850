#include "invdes/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "invdes/grid_search.hpp"
#include "invdes/search_space.hpp"
#include "invdes/solver.hpp"

namespace invdes {
namespace {

void reject_unknown_fields(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                           const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(context + ": unknown field \"" + key + "\"");
    }
  }
}

std::string shortest(double v) {
  char buf[40];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

ModelChoice ModelChoice::from_json(const nlohmann::json& j) {
  reject_unknown_fields(j, {"kind", "k", "degree", "grid"}, "model spec");
  ModelChoice mc;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "knn") {
    mc.kind = RegressorKind::kKnn;
  } else if (kind == "polynomial") {
    mc.kind = RegressorKind::kPolynomial;
  } else {
    throw std::invalid_argument("model spec: unknown kind \"" + kind + "\"");
  }
  if (j.contains("grid")) {
    mc.grid = j.at("grid").get<std::vector<int>>();
  } else if (j.contains("k")) {
    mc.grid = {j.at("k").get<int>()};
  } else if (j.contains("degree")) {
    mc.grid = {j.at("degree").get<int>()};
  } else {
    throw std::invalid_argument("model spec: need one of k, degree, grid");
  }
  if (mc.grid.empty()) throw std::invalid_argument("model spec: empty grid");
  return mc;
}

nlohmann::json ModelChoice::to_json() const {
  nlohmann::json j;
  j["kind"] = kind == RegressorKind::kKnn ? "knn" : "polynomial";
  j["grid"] = grid;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  reject_unknown_fields(j,
                        {"forward_model", "sigma", "n_train", "n_test", "fixed_dim_index",
                         "fixed_dim_values", "search_size", "top_b", "alphas", "folds",
                         "learner", "evaluator", "grid_search_folds", "targets", "trials",
                         "refit_per_trial", "seed"},
                        "experiment config");
  ExperimentConfig cfg;
  cfg.forward_model = j.at("forward_model");
  cfg.sigma = j.value("sigma", 0.25);
  cfg.n_train = j.at("n_train").get<Eigen::Index>();
  cfg.n_test = j.value("n_test", Eigen::Index{1000});
  cfg.fixed_dim_index = j.value("fixed_dim_index", 0);
  cfg.fixed_dim_values = j.at("fixed_dim_values").get<std::vector<double>>();
  cfg.search_size = j.at("search_size").get<Eigen::Index>();
  cfg.top_b = j.at("top_b").get<Eigen::Index>();
  cfg.alphas = j.at("alphas").get<std::vector<double>>();
  cfg.folds = j.value("folds", 20);
  cfg.learner = ModelChoice::from_json(j.at("learner"));
  cfg.evaluator = ModelChoice::from_json(j.at("evaluator"));
  cfg.grid_search_folds = j.value("grid_search_folds", 5);
  for (const auto& t : j.at("targets")) {
    std::vector<double> v;
    if (t.is_number()) {
      v.push_back(t.get<double>());
    } else {
      v = t.get<std::vector<double>>();
    }
    cfg.targets.push_back(
        Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  cfg.trials = j.at("trials").get<int>();
  cfg.refit_per_trial = j.value("refit_per_trial", true);
  cfg.seed = RngSeed{j.at("seed").get<std::uint64_t>()};

  if (cfg.n_train < 1 || cfg.n_test < 1 || cfg.search_size < 1 || cfg.trials < 1 ||
      cfg.top_b < 1 || cfg.top_b > cfg.search_size) {
    throw std::invalid_argument("experiment config: counts must be positive and B <= m");
  }
  if (!(cfg.sigma >= 0.0) || !std::isfinite(cfg.sigma)) {
    throw std::invalid_argument("experiment config: sigma must be finite and >= 0");
  }
  for (double a : cfg.alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      throw std::invalid_argument("experiment config: alpha values must lie in (0, 1)");
    }
  }
  if (cfg.fixed_dim_values.empty()) {
    throw std::invalid_argument("experiment config: fixed_dim_values must be nonempty");
  }
  if (cfg.targets.empty()) {
    throw std::invalid_argument("experiment config: targets must be nonempty");
  }
  return cfg;
}

TrialStats run_experiment(const ExperimentConfig& cfg) {
  const auto fm = make_forward_model(cfg.forward_model);
  if (cfg.fixed_dim_index < 0 || cfg.fixed_dim_index >= fm->input_dim()) {
    throw std::invalid_argument("run_experiment: fixed_dim_index out of range");
  }
  for (const auto& target : cfg.targets) {
    if (target.size() != fm->output_dim()) {
      throw std::invalid_argument("run_experiment: target dimension does not match model");
    }
  }

  const auto box = fm->input_box();
  const Eigen::Index t_dim = fm->output_dim();
  const std::size_t num_methods = 1 + cfg.alphas.size();  // single + per-alpha two-stage

  // ground_truth[method][x1][target] -> list of noiseless outputs of chosen
  // solutions, one per solved trial, in trial order.
  const std::size_t num_cells =
      num_methods * cfg.fixed_dim_values.size() * cfg.targets.size();
  std::vector<std::vector<Eigen::VectorXd>> cells(num_cells);
  const auto cell_index = [&](std::size_t method, std::size_t x1, std::size_t target) {
    return (method * cfg.fixed_dim_values.size() + x1) * cfg.targets.size() + target;
  };

  // With refit_per_trial, every trial draws its own dataset and refits both
  // models; otherwise trial 0's models serve the whole experiment and only
  // the search space varies across trials.
  const auto make_models = [&](std::uint64_t r) {
    const Dataset full = generate_dataset(*fm, cfg.n_train + cfg.n_test, cfg.sigma,
                                          derive(cfg.seed, {0, r}));
    auto [train, test] = train_test_split(full, cfg.n_test, derive(cfg.seed, {1, r}));
    const RegressorSpec learner_spec =
        cfg.learner.grid.size() == 1
            ? RegressorSpec{cfg.learner.kind, cfg.learner.grid.front()}
            : grid_search(cfg.learner.kind, cfg.learner.grid, train, cfg.grid_search_folds,
                          derive(cfg.seed, {2, r}));
    const RegressorSpec evaluator_spec =
        cfg.evaluator.grid.size() == 1
            ? RegressorSpec{cfg.evaluator.kind, cfg.evaluator.grid.front()}
            : grid_search(cfg.evaluator.kind, cfg.evaluator.grid, train,
                          cfg.grid_search_folds, derive(cfg.seed, {3, r}));
    FittedRegressor learner = fit(learner_spec, train);
    const ConformalCalibration base_cal =
        calibrate(evaluator_spec, train, cfg.folds,
                  cfg.alphas.empty() ? 0.1 : cfg.alphas.front(), derive(cfg.seed, {4, r}));
    std::vector<ConformalCalibration> cals;
    cals.reserve(cfg.alphas.size());
    for (double a : cfg.alphas) cals.push_back(base_cal.with_alpha(a));
    return std::pair{std::move(learner), std::move(cals)};
  };

  std::optional<std::pair<FittedRegressor, std::vector<ConformalCalibration>>> shared;
  if (!cfg.refit_per_trial) shared.emplace(make_models(0));

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const auto& [learner, cals] =
        cfg.refit_per_trial
            ? (shared.emplace(make_models(static_cast<std::uint64_t>(trial))), *shared)
            : *shared;

    for (std::size_t xi = 0; xi < cfg.fixed_dim_values.size(); ++xi) {
      std::vector<DimensionSpec> dims;
      for (Eigen::Index d = 0; d < fm->input_dim(); ++d) {
        if (d == cfg.fixed_dim_index) {
          dims.emplace_back(FixedDim{cfg.fixed_dim_values[xi]});
        } else {
          dims.emplace_back(RangeDim{box[static_cast<std::size_t>(d)].first,
                                     box[static_cast<std::size_t>(d)].second});
        }
      }
      const SearchSpace omega = sample_search_space(
          dims, cfg.search_size,
          derive(cfg.seed, {5, static_cast<std::uint64_t>(xi),
                            static_cast<std::uint64_t>(trial)}));
      const Eigen::MatrixXd predictions = learner.predict_batch(omega.candidates);

      for (std::size_t ti = 0; ti < cfg.targets.size(); ++ti) {
        const TargetSpec target{cfg.targets[ti]};
        const Candidate single = screen_top_b(predictions, omega, target, 1).front();
        cells[cell_index(0, xi, ti)].push_back(fm->evaluate(single.x));

        for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai) {
          const SolveReport report =
              solve_two_stage(predictions, cals[ai], omega, target, cfg.top_b);
          if (report.chosen) {
            cells[cell_index(1 + ai, xi, ti)].push_back(
                fm->evaluate(report.candidates[*report.chosen].x));
          }
        }
      }
    }
  }

  TrialStats stats;
  for (std::size_t method = 0; method < num_methods; ++method) {
    for (std::size_t xi = 0; xi < cfg.fixed_dim_values.size(); ++xi) {
      for (std::size_t ti = 0; ti < cfg.targets.size(); ++ti) {
        const auto& values = cells[cell_index(method, xi, ti)];
        for (Eigen::Index j = 0; j < t_dim; ++j) {
          TrialStatRow row;
          row.method = method == 0 ? "single" : "two_stage";
          row.alpha = method == 0 ? std::numeric_limits<double>::quiet_NaN()
                                  : cfg.alphas[method - 1];
          row.fixed_value = cfg.fixed_dim_values[xi];
          row.target_index = static_cast<int>(j);
          row.target_value = cfg.targets[ti](j);
          row.n_solved = static_cast<int>(values.size());
          row.n_trials = cfg.trials;
          if (values.empty()) {
            row.mean = std::numeric_limits<double>::quiet_NaN();
            row.stddev = std::numeric_limits<double>::quiet_NaN();
          } else {
            double sum = 0.0;
            for (const auto& v : values) sum += v(j);
            row.mean = sum / static_cast<double>(values.size());
            double sq = 0.0;
            for (const auto& v : values) sq += (v(j) - row.mean) * (v(j) - row.mean);
            row.stddev = std::sqrt(sq / static_cast<double>(values.size()));
          }
          stats.rows.push_back(std::move(row));
        }
      }
    }
  }
  return stats;
}

void write_trial_stats_csv(const std::filesystem::path& path, const TrialStats& stats) {
  std::string out = "method,alpha,x1,target_index,target_value,mean,std,n_solved,n_trials\n";
  for (const auto& r : stats.rows) {
    out += r.method;
    out += ',';
    if (!std::isnan(r.alpha)) out += shortest(r.alpha);
    out += ',';
    out += shortest(r.fixed_value);
    out += ',';
    out += std::to_string(r.target_index);
    out += ',';
    out += shortest(r.target_value);
    out += ',';
    if (!std::isnan(r.mean)) out += shortest(r.mean);
    out += ',';
    if (!std::isnan(r.stddev)) out += shortest(r.stddev);
    out += ',';
    out += std::to_string(r.n_solved);
    out += ',';
    out += std::to_string(r.n_trials);
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("stats: cannot write " + path.string());
  f << out;
}

CoverageResult coverage_audit(const ConformalCalibration& cal, const Dataset& test) {
  test.validate();
  if (test.p() != cal.p() || test.t() != cal.t()) {
    throw std::invalid_argument("coverage_audit: dataset dimensions do not match calibration");
  }
  CoverageResult result;
  result.coverage = Eigen::VectorXd::Zero(cal.t());
  result.mean_width = Eigen::VectorXd::Zero(cal.t());
  for (Eigen::Index i = 0; i < test.n(); ++i) {
    const PredictionInterval iv = interval(cal, test.inputs.row(i).transpose());
    for (Eigen::Index j = 0; j < cal.t(); ++j) {
      const double y = test.outputs(i, j);
      if (y >= iv.lower(j) && y <= iv.upper(j)) result.coverage(j) += 1.0;
      result.mean_width(j) += iv.upper(j) - iv.lower(j);
    }
  }
  result.coverage /= static_cast<double>(test.n());
  result.mean_width /= static_cast<double>(test.n());
  return result;
}

}  // namespace invdes
