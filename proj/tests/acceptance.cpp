// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Everything runs from fixed seeds; stochastic criteria
// carry explicit tolerances.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "invdes/conformal.hpp"
#include "invdes/experiment.hpp"
#include "invdes/forward_models.hpp"
#include "invdes/grid_search.hpp"
#include "invdes/solver.hpp"

using namespace invdes;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  [" << index << "] " << name;
  if (!detail.empty()) std::cout << "  (" << detail << ")";
  std::cout << std::endl;
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

// ---- criteria 1 & 2: learner / evaluator quality over 5 master seeds ----

struct SeedQuality {
  double knn_r2;
  double poly_r2;
  double seconds;
};

std::vector<SeedQuality> fit_quality() {
  std::vector<SeedQuality> out;
  const Ishigami1Model fm;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset full = generate_dataset(fm, 3000, 0.1, RngSeed{s});
    const auto [train, test] = train_test_split(full, 1000, derive(RngSeed{s}, {1}));
    const FittedRegressor knn = fit(RegressorSpec::knn(6), train);
    const FittedRegressor poly = fit(RegressorSpec::polynomial(6), train);
    out.push_back({r2_score(knn, test)(0), r2_score(poly, test)(0), seconds_since(t0)});
  }
  return out;
}

// ---- criteria 3 & 4: single-output multi-trial experiment ----

TrialStats run_main_experiment() {
  nlohmann::json j = {
      {"forward_model", "ishigami1"},
      {"sigma", 0.1},
      {"n_train", 2000},
      {"n_test", 1000},
      {"fixed_dim_values", {0.1 * M_PI, 0.2 * M_PI, 0.3 * M_PI, 0.4 * M_PI}},
      {"search_size", 10000},
      {"top_b", 10},
      {"alphas", {0.1, 0.2}},
      {"folds", 20},
      {"learner", {{"kind", "knn"}, {"k", 6}}},
      {"evaluator", {{"kind", "polynomial"}, {"degree", 6}}},
      {"targets", {4.0, 8.0}},
      {"trials", 20},
      {"seed", 20260824}};
  return run_experiment(ExperimentConfig::from_json(j));
}

const TrialStatRow& find_row(const TrialStats& stats, const std::string& method, double alpha,
                             double x1, int target_index, double target_value) {
  for (const auto& r : stats.rows) {
    if (r.method != method) continue;
    if (method == "two_stage" && std::abs(r.alpha - alpha) > 1e-12) continue;
    if (std::abs(r.fixed_value - x1) > 1e-12) continue;
    if (r.target_index != target_index) continue;
    if (std::abs(r.target_value - target_value) > 1e-12) continue;
    return r;
  }
  throw std::runtime_error("stats row not found");
}

// ---- criterion 7: independent brute-force CV+ oracle ----

PredictionInterval brute_force_interval(const ConformalCalibration& cal,
                                        const Eigen::VectorXd& x) {
  const auto n = static_cast<std::size_t>(cal.n());
  PredictionInterval iv;
  iv.lower.resize(cal.t());
  iv.upper.resize(cal.t());
  for (Eigen::Index j = 0; j < cal.t(); ++j) {
    std::vector<double> lo, hi;
    for (std::size_t i = 0; i < n; ++i) {
      const int k = cal.folds.membership[i];
      const double mu = cal.fold_models[static_cast<std::size_t>(k)].predict(x)(j);
      lo.push_back(mu - cal.residuals(static_cast<Eigen::Index>(i), j));
      hi.push_back(mu + cal.residuals(static_cast<Eigen::Index>(i), j));
    }
    std::sort(lo.begin(), lo.end());
    std::sort(hi.begin(), hi.end());
    int upper_rank = 1;
    while (upper_rank < static_cast<int>(n) + 1 &&
           static_cast<double>(upper_rank) < (1.0 - cal.alpha) * static_cast<double>(n + 1)) {
      ++upper_rank;
    }
    if (upper_rank > static_cast<int>(n)) upper_rank = static_cast<int>(n);
    int lower_rank = static_cast<int>(n);
    while (lower_rank > 0 &&
           static_cast<double>(lower_rank) > cal.alpha * static_cast<double>(n + 1)) {
      --lower_rank;
    }
    if (lower_rank < 1) lower_rank = 1;
    iv.lower(j) = lo[static_cast<std::size_t>(lower_rank - 1)];
    iv.upper(j) = hi[static_cast<std::size_t>(upper_rank - 1)];
  }
  return iv;
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return "<unreadable:" + path.string() + ">";
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  // --- 1 & 2 ---
  const std::vector<SeedQuality> quality = fit_quality();
  {
    bool ok = true;
    double worst_time = 0.0;
    std::string r2s;
    for (const auto& q : quality) {
      ok = ok && q.knn_r2 >= 0.90 && q.knn_r2 <= 0.98 && q.seconds < 10.0;
      worst_time = std::max(worst_time, q.seconds);
      if (!r2s.empty()) r2s += " ";
      r2s += fmt(q.knn_r2);
    }
    report(1, "learner test R^2 in [0.90, 0.98] for 5 seeds, < 10 s each", ok,
           "R^2: " + r2s + "; max " + fmt(worst_time) + " s");
  }
  {
    int wins = 0;
    for (const auto& q : quality) {
      if (q.poly_r2 >= q.knn_r2) ++wins;
    }
    report(2, "evaluator test R^2 >= learner's in >= 4 of 5 seeds", wins >= 4,
           std::to_string(wins) + "/5");
  }

  // --- 3 & 4 ---
  const auto exp_t0 = std::chrono::steady_clock::now();
  const TrialStats stats = run_main_experiment();
  const double exp_seconds = seconds_since(exp_t0);
  {
    double worst = 0.0;
    for (const double x1 : {0.1 * M_PI, 0.2 * M_PI, 0.3 * M_PI, 0.4 * M_PI}) {
      const TrialStatRow& r = find_row(stats, "two_stage", 0.2, x1, 0, 4.0);
      worst = std::max(worst, std::abs(r.mean - 4.0));
    }
    report(3, "target 4, alpha 0.2: max |mean - 4| <= 0.45 over the x1 grid, < 2 min",
           worst <= 0.45 && exp_seconds < 120.0,
           "max dev " + fmt(worst) + "; " + fmt(exp_seconds) + " s");
  }
  {
    bool ok = true;
    std::string detail;
    const TrialStatRow& single = find_row(stats, "single", 0.0, 0.2 * M_PI, 0, 8.0);
    for (const double a : {0.1, 0.2}) {
      const TrialStatRow& two = find_row(stats, "two_stage", a, 0.2 * M_PI, 0, 8.0);
      ok = ok && two.stddev <= 0.5 * single.stddev &&
           std::abs(two.mean - 8.0) < std::abs(single.mean - 8.0);
      detail += "alpha " + fmt(a) + ": std " + fmt(two.stddev) + " vs " + fmt(single.stddev) +
                ", mean " + fmt(two.mean) + " vs " + fmt(single.mean) + "; ";
    }
    report(4, "target 8 at x1=0.2pi: two-stage std <= 0.5x single and mean closer to 8", ok,
           detail);
  }

  // --- 5: two-output experiment, f2 target 0.65 ---
  {
    nlohmann::json j = {
        {"forward_model", "ishigami2"},
        {"sigma", 0.1},
        {"n_train", 2000},
        {"n_test", 1000},
        {"fixed_dim_values", {0.2 * M_PI, 0.3 * M_PI, 0.4 * M_PI}},
        {"search_size", 10000},
        {"top_b", 10},
        {"alphas", {0.2}},
        {"folds", 20},
        {"learner", {{"kind", "knn"}, {"k", 6}}},
        {"evaluator", {{"kind", "polynomial"}, {"degree", 6}}},
        {"targets", {{2.0, 0.20}, {8.0, 0.65}}},
        {"trials", 20},
        {"seed", 20260824}};
    const TrialStats two_out = run_experiment(ExperimentConfig::from_json(j));
    bool ok = true;
    std::string means;
    for (const double x1 : {0.2 * M_PI, 0.3 * M_PI, 0.4 * M_PI}) {
      const TrialStatRow& r = find_row(two_out, "two_stage", 0.2, x1, 1, 0.65);
      ok = ok && std::abs(r.mean - 0.65) <= 0.08;
      if (!means.empty()) means += " ";
      means += fmt(r.mean);
    }
    report(5, "two-output run: f2 means within 0.08 of target 0.65", ok, "means: " + means);
  }

  // --- 6: empirical coverage on 1000 held-out points ---
  {
    const Dataset full = generate_dataset(Ishigami1Model{}, 3000, 0.1, RngSeed{606});
    const auto [train, test] = train_test_split(full, 1000, derive(RngSeed{606}, {1}));
    const ConformalCalibration cal =
        calibrate(RegressorSpec::polynomial(6), train, 20, 0.1, derive(RngSeed{606}, {2}));
    const double cov10 = coverage_audit(cal, test).coverage(0);
    const double cov20 = coverage_audit(cal.with_alpha(0.2), test).coverage(0);
    const bool ok = cov10 >= 0.80 && cov20 >= 0.60 && cov10 >= cov20;
    report(6, "coverage >= 1 - 2*alpha for alpha 0.1/0.2, monotone in alpha", ok,
           "coverage " + fmt(cov10) + " / " + fmt(cov20));
  }

  // --- 7: exact oracle equivalence on 200 random toy instances ---
  {
    auto gen = make_stream(RngSeed{7007});
    bool ok = true;
    for (int instance = 0; instance < 200 && ok; ++instance) {
      const auto n = static_cast<Eigen::Index>(4 + gen() % 17);  // 4..20
      Dataset ds;
      ds.inputs.resize(n, 1);
      ds.outputs.resize(n, 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        ds.inputs(i, 0) = uniform_in(gen, -2, 2);
        ds.outputs(i, 0) = cubic(ds.inputs(i, 0)) + 0.3 * standard_normal(gen);
      }
      for (const int k : {2, 4, static_cast<int>(n)}) {
        if (k > n) continue;
        const double alpha = 0.05 + 0.4 * uniform01(gen);
        const ConformalCalibration cal =
            calibrate(RegressorSpec::knn(1), ds, k, alpha, RngSeed{gen()});
        for (int q = 0; q < 3; ++q) {
          Eigen::VectorXd x(1);
          x << uniform_in(gen, -2, 2);
          const PredictionInterval fast = interval(cal, x);
          const PredictionInterval slow = brute_force_interval(cal, x);
          ok = ok && fast.lower(0) == slow.lower(0) && fast.upper(0) == slow.upper(0);
        }
      }
    }
    report(7, "CV+ intervals match the brute-force oracle exactly (200 instances)", ok, "");
  }

  // --- 8: B=1 screening equals single-stage gamma=0, exact ---
  {
    auto gen = make_stream(RngSeed{808});
    bool ok = true;
    for (int instance = 0; instance < 100 && ok; ++instance) {
      const auto n = static_cast<Eigen::Index>(5 + gen() % 30);
      Dataset ds;
      ds.inputs.resize(n, 2);
      ds.outputs.resize(n, 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        ds.inputs(i, 0) = uniform_in(gen, -1, 1);
        ds.inputs(i, 1) = uniform_in(gen, -1, 1);
        ds.outputs(i, 0) = uniform_in(gen, -2, 2);
      }
      const FittedRegressor learner =
          fit(RegressorSpec::knn(1 + static_cast<int>(gen() % 3)), ds);
      const SearchSpace omega = sample_search_space(
          {RangeDim{-1, 1}, RangeDim{-1, 1}}, 1 + static_cast<Eigen::Index>(gen() % 50),
          RngSeed{gen()});
      Eigen::VectorXd target(1);
      target << uniform_in(gen, -2, 2);
      const Candidate a = screen_top_b(learner, omega, TargetSpec{target}, 1).front();
      const Candidate b = solve_single_stage(learner, omega, TargetSpec{target}, 0.0);
      ok = ok && a.row == b.row && a.score == b.score;
    }
    report(8, "B=1 screening equals gamma=0 single stage, ties included (100 instances)", ok,
           "");
  }

  // --- 9: polynomial exactness up to degree 6 ---
  {
    bool ok = true;
    double worst = 0.0;
    for (int degree = 1; degree <= 6 && ok; ++degree) {
      for (Eigen::Index p = 1; p <= 3; ++p) {
        auto gen = make_stream(RngSeed{static_cast<std::uint64_t>(900 + degree * 10 + p)});
        const auto exps = monomial_exponents(p, degree);
        Eigen::VectorXd coeffs(static_cast<Eigen::Index>(exps.size()));
        for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) = uniform_in(gen, -2, 2);
        const auto eval = [&](const Eigen::VectorXd& x) {
          double y = 0;
          for (std::size_t m = 0; m < exps.size(); ++m) {
            double v = coeffs(static_cast<Eigen::Index>(m));
            for (std::size_t d = 0; d < exps[m].size(); ++d) {
              for (int e = 0; e < exps[m][d]; ++e) v *= x(static_cast<Eigen::Index>(d));
            }
            y += v;
          }
          return y;
        };
        const Eigen::Index n = static_cast<Eigen::Index>(exps.size()) * 3;
        Dataset ds;
        ds.inputs.resize(n, p);
        ds.outputs.resize(n, 1);
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index d = 0; d < p; ++d) ds.inputs(i, d) = uniform_in(gen, -1.5, 1.5);
          ds.outputs(i, 0) = eval(ds.inputs.row(i).transpose());
        }
        const FittedRegressor model = fit(RegressorSpec::polynomial(degree), ds);
        for (int q = 0; q < 20; ++q) {
          Eigen::VectorXd x(p);
          for (Eigen::Index d = 0; d < p; ++d) x(d) = uniform_in(gen, -1.5, 1.5);
          worst = std::max(worst, std::abs(model.predict(x)(0) - eval(x)));
        }
      }
    }
    ok = worst <= 1e-8;
    report(9, "degree-d fit on noiseless degree-d data exact to 1e-8 (d <= 6, p <= 3)", ok,
           "max abs error " + fmt(worst));
  }

  // --- 10: Tikhonov pulls the cubic solution left, 4 of 5 seeds ---
  {
    int wins = 0;
    for (std::uint64_t s = 1; s <= 5; ++s) {
      const Dataset ds = generate_dataset(CubicModel{}, 30, 0.15, RngSeed{1000 + s});
      const FittedRegressor learner = fit(RegressorSpec::polynomial(2), ds);
      const SearchSpace omega =
          sample_search_space({RangeDim{-1.0, 1.5}}, 2000, derive(RngSeed{1000 + s}, {1}));
      Eigen::VectorXd target(1);
      target << 1.0;
      const Candidate plain = solve_single_stage(learner, omega, TargetSpec{target}, 0.0);
      const Candidate reg = solve_single_stage(learner, omega, TargetSpec{target}, 1.0);
      if (reg.x(0) < plain.x(0)) ++wins;
    }
    report(10, "gamma=1 minimizer strictly left of gamma=0 in >= 4 of 5 cubic seeds",
           wins >= 4, std::to_string(wins) + "/5");
  }

  // --- 11: CLI experiment determinism, byte-identical CSVs ---
  {
    const fs::path dir = fs::temp_directory_path() / "invdes_accept_det";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const nlohmann::json cfg = {{"forward_model", "ishigami1"},
                                {"sigma", 0.1},
                                {"n_train", 300},
                                {"n_test", 100},
                                {"fixed_dim_values", {0.2 * M_PI, 0.3 * M_PI}},
                                {"search_size", 500},
                                {"top_b", 5},
                                {"alphas", {0.1, 0.2}},
                                {"folds", 5},
                                {"learner", {{"kind", "knn"}, {"k", 6}}},
                                {"evaluator", {{"kind", "polynomial"}, {"degree", 4}}},
                                {"targets", {4.0, 8.0}},
                                {"trials", 3},
                                {"seed", 424242}};
    {
      std::ofstream f(dir / "cfg.json");
      f << cfg.dump(2);
    }
    const std::string base = std::string(INVDES_CLI_PATH) + " experiment --config " +
                             (dir / "cfg.json").string() + " --out ";
    const int rc1 =
        std::system((base + (dir / "a").string() + " > /dev/null 2>&1").c_str());
    const int rc2 =
        std::system((base + (dir / "b").string() + " > /dev/null 2>&1").c_str());
    const std::string a = slurp(dir / "a" / "stats.csv");
    const bool ok = rc1 == 0 && rc2 == 0 && !a.empty() && a[0] == 'm' &&
                    a == slurp(dir / "b" / "stats.csv");
    report(11, "experiment subcommand is byte-deterministic under a fixed config+seed", ok, "");
  }

  if (g_failures == 0) {
    std::cout << "all 11 criteria passed" << std::endl;
    return 0;
  }
  std::cout << g_failures << " criteria failed" << std::endl;
  return 1;
}
