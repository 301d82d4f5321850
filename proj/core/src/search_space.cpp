#include "invdes/search_space.hpp"

#include <stdexcept>

namespace invdes {

SearchSpace sample_search_space(const std::vector<DimensionSpec>& dims, Eigen::Index m,
                                RngSeed seed) {
  if (dims.empty()) throw std::invalid_argument("sample_search_space: empty dimension list");
  if (m < 1) throw std::invalid_argument("sample_search_space: m must be >= 1");
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (const auto* r = std::get_if<RangeDim>(&dims[d])) {
      if (!(r->min < r->max)) {
        throw std::invalid_argument("sample_search_space: range with min >= max at dim " +
                                    std::to_string(d));
      }
    }
  }

  const auto p = static_cast<Eigen::Index>(dims.size());
  SearchSpace omega;
  omega.dims = dims;
  omega.candidates.resize(m, p);
  auto gen = make_stream(seed);
  // Row-major draw order: candidate i consumes its p values consecutively.
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index d = 0; d < p; ++d) {
      const auto& spec = dims[static_cast<std::size_t>(d)];
      if (const auto* f = std::get_if<FixedDim>(&spec)) {
        omega.candidates(i, d) = f->value;
      } else {
        const auto& r = std::get<RangeDim>(spec);
        omega.candidates(i, d) = uniform_in(gen, r.min, r.max);
      }
    }
  }
  return omega;
}

}  // namespace invdes
