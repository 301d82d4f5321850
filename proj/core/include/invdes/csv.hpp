#pragma once

#include <filesystem>
#include <string>

#include "invdes/dataset.hpp"
#include "invdes/search_space.hpp"

namespace invdes {

// Dataset CSV: UTF-8, comma-separated, '.' decimal, mandatory header row.
// Columns prefixed "x" are inputs, "y" are outputs; all inputs precede all
// outputs. Parse errors carry 1-based row/column locations.
Dataset load_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds);

// Inputs-only CSV with the same conventions (header x1..xp).
void write_search_space_csv(const std::filesystem::path& path, const SearchSpace& omega);

// Raw numeric matrix with an arbitrary single-prefix header; used by the
// external forward-model adapter. Returns the matrix only.
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path,
                                Eigen::Index expected_cols);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& mat,
                      const std::string& column_prefix);

}  // namespace invdes
