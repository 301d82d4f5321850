// Command-line front end: dataset generation, model fitting, inverse solving,
// experiment execution, and coverage audits. Every subcommand is driven by a
// JSON config and is deterministic under a fixed config + seed.
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime error,
// 3 no viable solution (two-stage filter rejected every candidate).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "invdes/conformal.hpp"
#include "invdes/csv.hpp"
#include "invdes/experiment.hpp"
#include "invdes/forward_models.hpp"
#include "invdes/grid_search.hpp"
#include "invdes/solver.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitNoSolution = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file")->required();
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--seed", args.seed_override, "Override the config's master seed");
  cmd->add_flag("--verbose", args.verbose, "Chatty progress output");
}

json load_config(const CommonArgs& args) {
  std::ifstream in(args.config_path);
  if (!in) throw std::invalid_argument("cannot open config " + args.config_path);
  json j = json::parse(in);
  if (args.seed_override) j["seed"] = *args.seed_override;
  return j;
}

void reject_unknown_fields(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) throw std::invalid_argument(context + ": unknown field \"" + key + "\"");
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

invdes::RegressorSpec spec_or_search(const invdes::ModelChoice& choice,
                                     const invdes::Dataset& ds, int folds,
                                     invdes::RngSeed seed) {
  if (choice.grid.size() == 1) return {choice.kind, choice.grid.front()};
  return invdes::grid_search(choice.kind, choice.grid, ds, folds, seed);
}

int cmd_gen(const CommonArgs& args) {
  const json cfg = load_config(args);
  reject_unknown_fields(cfg, {"forward_model", "n", "sigma", "seed"}, "gen config");
  const auto n = cfg.at("n").get<Eigen::Index>();
  const double sigma = cfg.value("sigma", 0.0);
  const invdes::RngSeed seed{cfg.at("seed").get<std::uint64_t>()};
  if (n < 1) throw std::invalid_argument("gen config: n must be >= 1");

  const auto fm = invdes::make_forward_model(cfg.at("forward_model"));
  const invdes::Dataset ds = invdes::generate_dataset(*fm, n, sigma, seed);

  const std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  invdes::write_dataset_csv(out / "dataset.csv", ds);
  write_json(out / "gen_config.json", cfg);
  if (args.verbose) {
    std::cout << "wrote " << (out / "dataset.csv").string() << " (" << ds.n() << " rows)\n";
  }
  return kExitOk;
}

int cmd_fit(const CommonArgs& args) {
  const json cfg = load_config(args);
  reject_unknown_fields(cfg, {"dataset", "model", "folds", "n_test", "seed"}, "fit config");
  const auto choice = invdes::ModelChoice::from_json(cfg.at("model"));
  const int folds = cfg.value("folds", 5);
  const invdes::RngSeed seed{cfg.at("seed").get<std::uint64_t>()};

  invdes::Dataset ds = invdes::load_dataset_csv(cfg.at("dataset").get<std::string>());
  std::optional<invdes::Dataset> test;
  if (cfg.contains("n_test")) {
    auto [tr, te] = invdes::train_test_split(ds, cfg.at("n_test").get<Eigen::Index>(),
                                             invdes::derive(seed, {0}));
    ds = std::move(tr);
    test = std::move(te);
  }

  const invdes::RegressorSpec spec =
      spec_or_search(choice, ds, folds, invdes::derive(seed, {1}));
  const invdes::FittedRegressor model = invdes::fit(spec, ds);

  json metrics;
  metrics["kind"] = choice.kind == invdes::RegressorKind::kKnn ? "knn" : "polynomial";
  metrics["hyperparameter"] = spec.hyperparameter;
  const Eigen::VectorXd train_r2 = invdes::r2_score(model, ds);
  metrics["train_r2"] = std::vector<double>(train_r2.begin(), train_r2.end());
  if (test) {
    const Eigen::VectorXd test_r2 = invdes::r2_score(model, *test);
    metrics["test_r2"] = std::vector<double>(test_r2.begin(), test_r2.end());
  }

  const std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  write_json(out / "model.json", model.to_json());
  write_json(out / "metrics.json", metrics);
  if (args.verbose) std::cout << "selected hyperparameter " << spec.hyperparameter << "\n";
  return kExitOk;
}

std::vector<invdes::DimensionSpec> parse_dims(const json& dims_json) {
  std::vector<invdes::DimensionSpec> dims;
  for (const auto& d : dims_json) {
    if (d.contains("fixed")) {
      reject_unknown_fields(d, {"fixed"}, "search_space dim");
      dims.emplace_back(invdes::FixedDim{d.at("fixed").get<double>()});
    } else {
      reject_unknown_fields(d, {"min", "max"}, "search_space dim");
      dims.emplace_back(invdes::RangeDim{d.at("min").get<double>(), d.at("max").get<double>()});
    }
  }
  return dims;
}

int cmd_solve(const CommonArgs& args) {
  const json cfg = load_config(args);
  reject_unknown_fields(cfg,
                        {"learner", "dataset", "evaluator", "calibration", "folds", "alpha",
                         "search_space", "target", "mode", "gamma", "top_b", "seed",
                         "show_rejected"},
                        "solve config");
  const std::string mode = cfg.value("mode", "two_stage");
  if (mode != "single" && mode != "two_stage") {
    throw std::invalid_argument("solve config: mode must be \"single\" or \"two_stage\"");
  }
  const invdes::RngSeed seed{cfg.at("seed").get<std::uint64_t>()};

  std::ifstream learner_file(cfg.at("learner").get<std::string>());
  if (!learner_file) throw std::invalid_argument("solve config: cannot open learner model");
  const invdes::FittedRegressor learner =
      invdes::FittedRegressor::from_json(json::parse(learner_file));

  const json& ss = cfg.at("search_space");
  reject_unknown_fields(ss, {"dims", "m", "seed"}, "search_space");
  const invdes::SearchSpace omega = invdes::sample_search_space(
      parse_dims(ss.at("dims")), ss.at("m").get<Eigen::Index>(),
      ss.contains("seed") ? invdes::RngSeed{ss.at("seed").get<std::uint64_t>()}
                          : invdes::derive(seed, {10}));

  invdes::TargetSpec target;
  if (cfg.at("target").is_number()) {
    target.target.resize(1);
    target.target(0) = cfg.at("target").get<double>();
  } else {
    const auto v = cfg.at("target").get<std::vector<double>>();
    target.target =
        Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  const std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);

  if (mode == "single") {
    const double gamma = cfg.value("gamma", 0.0);
    const invdes::Candidate best =
        invdes::solve_single_stage(learner, omega, target, gamma);
    invdes::SolveReport report;
    report.candidates = {best};
    report.chosen = 0;
    report.top_b = 1;
    json rj = report.to_json();
    rj["mode"] = "single";
    rj["gamma"] = gamma;
    write_json(out / "report.json", rj);
    return kExitOk;
  }

  invdes::ConformalCalibration cal = [&] {
    if (cfg.contains("calibration")) {
      std::ifstream f(cfg.at("calibration").get<std::string>());
      if (!f) throw std::invalid_argument("solve config: cannot open calibration");
      invdes::ConformalCalibration loaded = invdes::ConformalCalibration::from_json(json::parse(f));
      return cfg.contains("alpha") ? loaded.with_alpha(cfg.at("alpha").get<double>())
                                   : loaded;
    }
    const invdes::Dataset ds = invdes::load_dataset_csv(cfg.at("dataset").get<std::string>());
    const auto choice = invdes::ModelChoice::from_json(cfg.at("evaluator"));
    const invdes::RegressorSpec spec =
        spec_or_search(choice, ds, cfg.value("folds", 20), invdes::derive(seed, {11}));
    return invdes::calibrate(spec, ds, cfg.value("folds", 20), cfg.at("alpha").get<double>(),
                             invdes::derive(seed, {12}));
  }();

  const auto top_b = cfg.value("top_b", Eigen::Index{10});
  const invdes::SolveReport report =
      invdes::solve_two_stage(learner, cal, omega, target, top_b);
  json rj = report.to_json();
  rj["mode"] = "two_stage";
  write_json(out / "report.json", rj);

  if (!report.chosen) {
    if (cfg.value("show_rejected", false) && !report.candidates.empty()) {
      const auto& best = report.candidates.front();
      std::cout << "no viable solution; best rejected candidate (row " << best.row
                << ", score " << best.score << ")\n";
    }
    return kExitNoSolution;
  }
  if (args.verbose) {
    std::cout << "chosen candidate index " << *report.chosen << "\n";
  }
  return kExitOk;
}

int cmd_experiment(const CommonArgs& args) {
  const json cfg = load_config(args);
  const invdes::ExperimentConfig ec = invdes::ExperimentConfig::from_json(cfg);
  const invdes::TrialStats stats = invdes::run_experiment(ec);
  const std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  invdes::write_trial_stats_csv(out / "stats.csv", stats);
  write_json(out / "experiment_config.json", cfg);
  if (args.verbose) std::cout << "wrote " << (out / "stats.csv").string() << "\n";
  return kExitOk;
}

int cmd_coverage(const CommonArgs& args) {
  const json cfg = load_config(args);
  reject_unknown_fields(cfg,
                        {"forward_model", "sigma", "n_train", "n_test", "evaluator", "folds",
                         "alphas", "seed"},
                        "coverage config");
  const invdes::RngSeed seed{cfg.at("seed").get<std::uint64_t>()};
  const auto fm = invdes::make_forward_model(cfg.at("forward_model"));
  const auto n_train = cfg.at("n_train").get<Eigen::Index>();
  const auto n_test = cfg.at("n_test").get<Eigen::Index>();
  const double sigma = cfg.value("sigma", 0.25);

  const invdes::Dataset full =
      invdes::generate_dataset(*fm, n_train + n_test, sigma, invdes::derive(seed, {0}));
  const auto [train, test] = invdes::train_test_split(full, n_test, invdes::derive(seed, {1}));

  const auto choice = invdes::ModelChoice::from_json(cfg.at("evaluator"));
  const int folds = cfg.value("folds", 20);
  const invdes::RegressorSpec spec =
      spec_or_search(choice, train, cfg.value("folds", 20), invdes::derive(seed, {2}));
  const auto alphas = cfg.at("alphas").get<std::vector<double>>();
  if (alphas.empty()) throw std::invalid_argument("coverage config: alphas must be nonempty");

  const invdes::ConformalCalibration base =
      invdes::calibrate(spec, train, folds, alphas.front(), invdes::derive(seed, {3}));

  json result;
  result["n_test"] = test.n();
  result["per_alpha"] = json::array();
  for (double a : alphas) {
    const invdes::CoverageResult cov = invdes::coverage_audit(base.with_alpha(a), test);
    json entry;
    entry["alpha"] = a;
    entry["coverage"] = std::vector<double>(cov.coverage.begin(), cov.coverage.end());
    entry["mean_width"] = std::vector<double>(cov.mean_width.begin(), cov.mean_width.end());
    result["per_alpha"].push_back(entry);
  }

  const std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  write_json(out / "coverage.json", result);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage surrogate inverse design"};
  app.require_subcommand(1);

  CommonArgs gen_args, fit_args, solve_args, exp_args, cov_args;
  auto* gen = app.add_subcommand("gen", "Generate a benchmark dataset CSV");
  auto* fit = app.add_subcommand("fit", "Fit and persist a surrogate model");
  auto* solve = app.add_subcommand("solve", "Run a single- or two-stage inverse solve");
  auto* experiment = app.add_subcommand("experiment", "Run the multi-trial protocol");
  auto* coverage = app.add_subcommand("coverage", "Audit empirical interval coverage");
  add_common(gen, gen_args);
  add_common(fit, fit_args);
  add_common(solve, solve_args);
  add_common(experiment, exp_args);
  add_common(coverage, cov_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_args);
    if (fit->parsed()) return cmd_fit(fit_args);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (experiment->parsed()) return cmd_experiment(exp_args);
    if (coverage->parsed()) return cmd_coverage(cov_args);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
