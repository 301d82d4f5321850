#pragma once

#include <vector>

#include "invdes/regressor.hpp"
#include "invdes/rng.hpp"

namespace invdes {

// K-fold cross-validated hyperparameter selection: returns the grid value
// maximizing mean CV R-squared (averaged over outputs, then folds). Ties go
// to the smaller hyperparameter. Fold assignment is a seeded shuffle
// followed by contiguous blocks.
RegressorSpec grid_search(RegressorKind kind, const std::vector<int>& grid,
                          const Dataset& ds, int folds, RngSeed seed);

}  // namespace invdes
