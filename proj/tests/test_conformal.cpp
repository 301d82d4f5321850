#include <doctest.h>

#include <algorithm>
#include <vector>

#include "invdes/conformal.hpp"
#include "invdes/forward_models.hpp"

using namespace invdes;

namespace {

// Independent brute-force CV+ oracle: explicit sort, explicit index
// arithmetic, no shared code with conformal.cpp.
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

Dataset make_1d(std::initializer_list<double> xs, std::initializer_list<double> ys) {
  Dataset ds;
  ds.inputs.resize(static_cast<Eigen::Index>(xs.size()), 1);
  ds.outputs.resize(static_cast<Eigen::Index>(ys.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) ds.inputs(i++, 0) = x;
  i = 0;
  for (double y : ys) ds.outputs(i++, 0) = y;
  return ds;
}

}  // namespace

TEST_CASE("fold assignment partitions with near-equal sizes") {
  for (const auto [n, k] : std::vector<std::pair<Eigen::Index, int>>{{10, 5}, {11, 4}, {7, 7}}) {
    const FoldAssignment fa = FoldAssignment::make(n, k, RngSeed{3});
    REQUIRE(static_cast<Eigen::Index>(fa.membership.size()) == n);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int f : fa.membership) {
      REQUIRE(f >= 0);
      REQUIRE(f < k);
      ++counts[static_cast<std::size_t>(f)];
    }
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    CHECK(*hi - *lo <= 1);
  }
  CHECK_THROWS_AS(FoldAssignment::make(5, 1, RngSeed{0}), std::invalid_argument);
  CHECK_THROWS_AS(FoldAssignment::make(5, 6, RngSeed{0}), std::invalid_argument);
}

TEST_CASE("conformal quantiles on {1..5}") {
  const std::vector<double> values = {1, 2, 3, 4, 5};
  // alpha = 0.2: upper rank ceil(0.8 * 6) = 5, lower rank floor(0.2 * 6) = 1.
  CHECK(conformal_quantile(values, 0.2, QuantileSide::kUpper) == 5.0);
  CHECK(conformal_quantile(values, 0.2, QuantileSide::kLower) == 1.0);
  CHECK(conformal_quantile({7.5}, 0.3, QuantileSide::kUpper) == 7.5);
  CHECK(conformal_quantile({7.5}, 0.3, QuantileSide::kLower) == 7.5);
  CHECK_THROWS_AS(conformal_quantile({}, 0.2, QuantileSide::kUpper), std::invalid_argument);
}

TEST_CASE("leave-one-out calibration fits n models on n-1 rows each") {
  const Dataset ds = make_1d({0, 1, 2, 3}, {0, 1, 4, 9});
  const ConformalCalibration cal = calibrate(RegressorSpec::knn(1), ds, 4, 0.25, RngSeed{1});
  REQUIRE(cal.fold_models.size() == 4);
  for (const auto& m : cal.fold_models) {
    CHECK(m.knn()->train_inputs.rows() == 3);
  }
  CHECK((cal.residuals.array() >= 0.0).all());
}

TEST_CASE("perfect evaluator yields zero residuals and degenerate intervals") {
  // Data generated by a line; degree-1 evaluator refits it exactly per fold.
  const Dataset ds = make_1d({0, 1, 2, 3, 4, 5}, {1, 3, 5, 7, 9, 11});
  const ConformalCalibration cal =
      calibrate(RegressorSpec::polynomial(1), ds, 3, 0.25, RngSeed{2});
  CHECK(cal.residuals.maxCoeff() <= 1e-8);

  Eigen::VectorXd x(1);
  x << 2.5;
  const PredictionInterval iv = interval(cal, x);
  CHECK(iv.upper(0) - iv.lower(0) <= 1e-7);
  CHECK(iv.lower(0) == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("K=2 residuals on hand-built data match a hand computation") {
  // Four 1-D points, kNN k=1 evaluator. Fold membership is computed by the
  // library; refit each complement by hand via nearest-neighbor lookup.
  const Dataset ds = make_1d({0, 1, 2, 3}, {0, 10, 20, 30});
  const ConformalCalibration cal = calibrate(RegressorSpec::knn(1), ds, 2, 0.25, RngSeed{7});
  for (Eigen::Index i = 0; i < 4; ++i) {
    const int fold = cal.folds.membership[static_cast<std::size_t>(i)];
    // Brute-force 1-NN over the rows outside fold `fold`.
    double best_d = 1e18, pred = 0;
    for (Eigen::Index r = 0; r < 4; ++r) {
      if (cal.folds.membership[static_cast<std::size_t>(r)] == fold) continue;
      const double d = std::abs(ds.inputs(r, 0) - ds.inputs(i, 0));
      if (d < best_d) {
        best_d = d;
        pred = ds.outputs(r, 0);
      }
    }
    CHECK(cal.residuals(i, 0) == doctest::Approx(std::abs(ds.outputs(i, 0) - pred)));
  }
}

TEST_CASE("intervals match the brute-force oracle exactly on toy instances") {
  auto gen = make_stream(RngSeed{2024});
  for (int instance = 0; instance < 50; ++instance) {
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
        CHECK(fast.lower(0) == slow.lower(0));
        CHECK(fast.upper(0) == slow.upper(0));
      }
    }
  }
}

TEST_CASE("interval lower <= upper and monotone in alpha") {
  const Dataset ds = generate_dataset(Ishigami2Model{}, 200, 0.25, RngSeed{12});
  const ConformalCalibration cal =
      calibrate(RegressorSpec::polynomial(3), ds, 5, 0.1, RngSeed{13});
  auto gen = make_stream(RngSeed{14});
  for (int q = 0; q < 20; ++q) {
    Eigen::VectorXd x(3);
    for (int d = 0; d < 3; ++d) x(d) = uniform_in(gen, -M_PI, M_PI);
    const PredictionInterval wide = interval(cal.with_alpha(0.1), x);
    const PredictionInterval narrow = interval(cal.with_alpha(0.3), x);
    for (Eigen::Index j = 0; j < 2; ++j) {
      CHECK(wide.lower(j) <= wide.upper(j));
      CHECK(narrow.lower(j) <= narrow.upper(j));
      CHECK(wide.lower(j) <= narrow.lower(j));
      CHECK(wide.upper(j) >= narrow.upper(j));
    }
  }
}

TEST_CASE("residual reuse: interval queries trigger no refits") {
  const Dataset ds = generate_dataset(Ishigami1Model{}, 100, 0.25, RngSeed{21});
  const ConformalCalibration cal =
      calibrate(RegressorSpec::polynomial(2), ds, 5, 0.1, RngSeed{22});
  REQUIRE(cal.fold_models.size() == 5);
  // Calibration is immutable; querying 10 candidates reuses the same 5
  // models and the same residual matrix.
  const Eigen::MatrixXd residuals_before = cal.residuals;
  auto gen = make_stream(RngSeed{23});
  for (int q = 0; q < 10; ++q) {
    Eigen::VectorXd x(3);
    for (int d = 0; d < 3; ++d) x(d) = uniform_in(gen, -M_PI, M_PI);
    (void)interval(cal, x);
  }
  CHECK(cal.fold_models.size() == 5);
  CHECK(cal.residuals == residuals_before);
}

TEST_CASE("contains uses closed endpoints per coordinate") {
  PredictionInterval iv;
  iv.lower.resize(2);
  iv.upper.resize(2);
  iv.lower << 0.0, 0.0;
  iv.upper << 1.0, 1.0;
  Eigen::VectorXd inside(2), outside(2), boundary(2);
  inside << 0.5, 0.5;
  outside << 0.5, 1.5;
  boundary << 1.0, 0.0;
  CHECK(contains(iv, TargetSpec{inside}));
  CHECK_FALSE(contains(iv, TargetSpec{outside}));
  CHECK(contains(iv, TargetSpec{boundary}));
}

TEST_CASE("calibration JSON round-trip") {
  const Dataset ds = generate_dataset(Ishigami1Model{}, 60, 0.25, RngSeed{31});
  const ConformalCalibration cal =
      calibrate(RegressorSpec::polynomial(2), ds, 4, 0.2, RngSeed{32});
  const ConformalCalibration back = ConformalCalibration::from_json(cal.to_json());
  CHECK(back.alpha == cal.alpha);
  CHECK(back.folds.membership == cal.folds.membership);
  CHECK(back.residuals == cal.residuals);
  Eigen::VectorXd x(3);
  x << 0.3, -1.0, 2.0;
  const PredictionInterval a = interval(cal, x);
  const PredictionInterval b = interval(back, x);
  CHECK(a.lower(0) == doctest::Approx(b.lower(0)).epsilon(1e-12));
  CHECK(a.upper(0) == doctest::Approx(b.upper(0)).epsilon(1e-12));
}
