#pragma once

#include <Eigen/Dense>
#include <variant>
#include <vector>

#include "invdes/rng.hpp"

namespace invdes {

struct FixedDim {
  double value;
};

struct RangeDim {
  double min;
  double max;
};

using DimensionSpec = std::variant<FixedDim, RangeDim>;

// Finite unlabeled candidate set: m concrete points, each row satisfying its
// dimension spec (fixed dims exact, ranged dims inside [min, max)).
struct SearchSpace {
  std::vector<DimensionSpec> dims;
  Eigen::MatrixXd candidates;  // m x p

  Eigen::Index m() const { return candidates.rows(); }
  Eigen::Index p() const { return candidates.cols(); }
};

// Draws m candidates: ranged dims i.i.d. uniform on [min, max) from the
// seeded stream, fixed dims copied verbatim. Deterministic given seed.
// Throws on an empty dim list or a range with min >= max.
SearchSpace sample_search_space(const std::vector<DimensionSpec>& dims, Eigen::Index m,
                                RngSeed seed);

}  // namespace invdes
