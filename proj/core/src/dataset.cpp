#include "invdes/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace invdes {

void Dataset::validate() const {
  if (inputs.rows() < 1 || inputs.cols() < 1 || outputs.cols() < 1) {
    throw std::invalid_argument("dataset: need n >= 1, p >= 1, t >= 1");
  }
  if (inputs.rows() != outputs.rows()) {
    throw std::invalid_argument("dataset: input/output row count mismatch");
  }
  if (!inputs.allFinite() || !outputs.allFinite()) {
    throw std::invalid_argument("dataset: non-finite entry");
  }
  if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != p()) {
    throw std::invalid_argument("dataset: feature_names size mismatch");
  }
  if (!output_names.empty() && static_cast<Eigen::Index>(output_names.size()) != t()) {
    throw std::invalid_argument("dataset: output_names size mismatch");
  }
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& ds, Eigen::Index n_test,
                                             RngSeed seed) {
  ds.validate();
  const Eigen::Index n = ds.n();
  if (n_test < 1 || n_test >= n) {
    throw std::invalid_argument("train_test_split: n_test must satisfy 1 <= n_test < n");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto gen = make_stream(seed);
  // Fisher-Yates with the stream's own uniform; std::shuffle's draw pattern
  // is implementation-defined.
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(uniform01(gen) * static_cast<double>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  const Eigen::Index n_train = n - n_test;
  Dataset train, test;
  train.inputs.resize(n_train, ds.p());
  train.outputs.resize(n_train, ds.t());
  test.inputs.resize(n_test, ds.p());
  test.outputs.resize(n_test, ds.t());
  for (Eigen::Index i = 0; i < n_train; ++i) {
    train.inputs.row(i) = ds.inputs.row(order[static_cast<std::size_t>(i)]);
    train.outputs.row(i) = ds.outputs.row(order[static_cast<std::size_t>(i)]);
  }
  for (Eigen::Index i = 0; i < n_test; ++i) {
    test.inputs.row(i) = ds.inputs.row(order[static_cast<std::size_t>(n_train + i)]);
    test.outputs.row(i) = ds.outputs.row(order[static_cast<std::size_t>(n_train + i)]);
  }
  train.feature_names = ds.feature_names;
  train.output_names = ds.output_names;
  test.feature_names = ds.feature_names;
  test.output_names = ds.output_names;
  return {std::move(train), std::move(test)};
}

}  // namespace invdes
