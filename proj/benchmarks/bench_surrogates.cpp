#include <benchmark/benchmark.h>

#include "invdes/conformal.hpp"
#include "invdes/forward_models.hpp"
#include "invdes/solver.hpp"

namespace {

using namespace invdes;

const Dataset& training_data() {
  static const Dataset ds =
      generate_dataset(Ishigami1Model{}, 2000, 0.25, RngSeed{1});
  return ds;
}

const SearchSpace& search_space() {
  static const SearchSpace omega = sample_search_space(
      {FixedDim{0.2 * M_PI}, RangeDim{-M_PI, M_PI}, RangeDim{-M_PI, M_PI}}, 10000, RngSeed{2});
  return omega;
}

void BM_KnnPredict(benchmark::State& state) {
  const FittedRegressor model = fit(RegressorSpec::knn(6), training_data());
  const Eigen::VectorXd x = search_space().candidates.row(0).transpose();
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(x));
}
BENCHMARK(BM_KnnPredict);

void BM_PolyPredict(benchmark::State& state) {
  const FittedRegressor model = fit(RegressorSpec::polynomial(6), training_data());
  const Eigen::VectorXd x = search_space().candidates.row(0).transpose();
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(x));
}
BENCHMARK(BM_PolyPredict);

void BM_ScreenTopB(benchmark::State& state) {
  const FittedRegressor model = fit(RegressorSpec::knn(6), training_data());
  const Eigen::MatrixXd predictions = model.predict_batch(search_space().candidates);
  Eigen::VectorXd target(1);
  target << 4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        screen_top_b(predictions, search_space(), TargetSpec{target}, 10));
  }
}
BENCHMARK(BM_ScreenTopB);

void BM_ConformalInterval(benchmark::State& state) {
  static const ConformalCalibration cal =
      calibrate(RegressorSpec::polynomial(6), training_data(), 20, 0.1, RngSeed{3});
  const Eigen::VectorXd x = search_space().candidates.row(0).transpose();
  for (auto _ : state) benchmark::DoNotOptimize(interval(cal, x));
}
BENCHMARK(BM_ConformalInterval);

}  // namespace

BENCHMARK_MAIN();
