#include "invdes/grid_search.hpp"

#include <limits>
#include <stdexcept>

#include "invdes/conformal.hpp"

namespace invdes {

RegressorSpec grid_search(RegressorKind kind, const std::vector<int>& grid,
                          const Dataset& ds, int folds, RngSeed seed) {
  if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");
  ds.validate();
  if (folds < 2 || folds > ds.n()) {
    throw std::invalid_argument("grid_search: folds must satisfy 2 <= folds <= n");
  }

  const FoldAssignment assignment = FoldAssignment::make(ds.n(), folds, seed);

  // Materialize per-fold train/holdout datasets once; every grid value
  // reuses them.
  std::vector<Dataset> train(static_cast<std::size_t>(folds));
  std::vector<Dataset> holdout(static_cast<std::size_t>(folds));
  for (int k = 0; k < folds; ++k) {
    Eigen::Index n_in = 0;
    for (int f : assignment.membership) n_in += (f != k);
    auto& tr = train[static_cast<std::size_t>(k)];
    auto& ho = holdout[static_cast<std::size_t>(k)];
    tr.inputs.resize(n_in, ds.p());
    tr.outputs.resize(n_in, ds.t());
    ho.inputs.resize(ds.n() - n_in, ds.p());
    ho.outputs.resize(ds.n() - n_in, ds.t());
    Eigen::Index ti = 0, hi = 0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
      if (assignment.membership[static_cast<std::size_t>(i)] != k) {
        tr.inputs.row(ti) = ds.inputs.row(i);
        tr.outputs.row(ti++) = ds.outputs.row(i);
      } else {
        ho.inputs.row(hi) = ds.inputs.row(i);
        ho.outputs.row(hi++) = ds.outputs.row(i);
      }
    }
  }

  double best_score = -std::numeric_limits<double>::infinity();
  int best_value = grid.front();
  bool first = true;
  for (int value : grid) {
    const RegressorSpec candidate{kind, value};
    double score = 0.0;
    for (int k = 0; k < folds; ++k) {
      const FittedRegressor model = fit(candidate, train[static_cast<std::size_t>(k)]);
      score += r2_score(model, holdout[static_cast<std::size_t>(k)]).mean();
    }
    score /= static_cast<double>(folds);
    // Strict > keeps the smaller hyperparameter on ties (grid assumed
    // ascending; enforce by tracking the minimum on equal scores).
    if (first || score > best_score || (score == best_score && value < best_value)) {
      best_score = score;
      best_value = value;
      first = false;
    }
  }
  return RegressorSpec{kind, best_value};
}

}  // namespace invdes
