#include "invdes/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace invdes {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col) {
  const std::string s = trim(raw);
  double value = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || s.empty()) {
    throw std::runtime_error("csv: non-numeric cell \"" + s + "\" at row " +
                             std::to_string(row) + ", column " + std::to_string(col));
  }
  return value;
}

void format_value(std::string& out, double v) {
  char buf[40];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, ptr);
}

std::vector<std::string> read_nonempty_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

Dataset load_dataset_csv(const std::filesystem::path& path) {
  const auto lines = read_nonempty_lines(path);
  if (lines.empty()) throw std::runtime_error("csv: " + path.string() + " is empty");

  const auto header = split_line(lines[0]);
  std::size_t num_inputs = 0;
  std::size_t i = 0;
  for (; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (name.rfind('x', 0) == 0) {
      ++num_inputs;
    } else {
      break;
    }
  }
  std::size_t num_outputs = 0;
  for (; i < header.size(); ++i) {
    const std::string name = trim(header[i]);
    if (name.rfind('y', 0) == 0) {
      ++num_outputs;
    } else {
      throw std::runtime_error("csv: header column " + std::to_string(i + 1) +
                               " (\"" + name + "\") must be x-prefixed inputs followed by "
                               "y-prefixed outputs");
    }
  }
  if (num_inputs == 0 || num_outputs == 0) {
    throw std::runtime_error("csv: header needs at least one x column and one y column");
  }
  const std::size_t num_rows = lines.size() - 1;
  if (num_rows == 0) throw std::runtime_error("csv: " + path.string() + " has zero data rows");

  Dataset ds;
  ds.inputs.resize(static_cast<Eigen::Index>(num_rows), static_cast<Eigen::Index>(num_inputs));
  ds.outputs.resize(static_cast<Eigen::Index>(num_rows), static_cast<Eigen::Index>(num_outputs));
  for (std::size_t r = 0; r < num_rows; ++r) {
    const auto cells = split_line(lines[r + 1]);
    if (cells.size() != num_inputs + num_outputs) {
      throw std::runtime_error("csv: row " + std::to_string(r + 2) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(num_inputs + num_outputs));
    }
    for (std::size_t c = 0; c < num_inputs; ++c) {
      ds.inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_cell(cells[c], r + 2, c + 1);
    }
    for (std::size_t c = 0; c < num_outputs; ++c) {
      ds.outputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_cell(cells[num_inputs + c], r + 2, num_inputs + c + 1);
    }
  }
  for (std::size_t c = 0; c < num_inputs; ++c) ds.feature_names.push_back(trim(header[c]));
  for (std::size_t c = 0; c < num_outputs; ++c) {
    ds.output_names.push_back(trim(header[num_inputs + c]));
  }
  ds.validate();
  return ds;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& ds) {
  ds.validate();
  std::string out;
  for (Eigen::Index c = 0; c < ds.p(); ++c) {
    if (c) out += ',';
    out += ds.feature_names.empty() ? "x" + std::to_string(c + 1)
                                    : ds.feature_names[static_cast<std::size_t>(c)];
  }
  for (Eigen::Index c = 0; c < ds.t(); ++c) {
    out += ',';
    out += ds.output_names.empty() ? "y" + std::to_string(c + 1)
                                   : ds.output_names[static_cast<std::size_t>(c)];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < ds.n(); ++r) {
    for (Eigen::Index c = 0; c < ds.p(); ++c) {
      if (c) out += ',';
      format_value(out, ds.inputs(r, c));
    }
    for (Eigen::Index c = 0; c < ds.t(); ++c) {
      out += ',';
      format_value(out, ds.outputs(r, c));
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("csv: cannot write " + path.string());
  f << out;
}

void write_search_space_csv(const std::filesystem::path& path, const SearchSpace& omega) {
  write_matrix_csv(path, omega.candidates, "x");
}

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path, Eigen::Index expected_cols) {
  const auto lines = read_nonempty_lines(path);
  if (lines.size() < 2) throw std::runtime_error("csv: " + path.string() + " has no data rows");
  const auto header = split_line(lines[0]);
  if (static_cast<Eigen::Index>(header.size()) != expected_cols) {
    throw std::runtime_error("csv: " + path.string() + " has " +
                             std::to_string(header.size()) + " columns, expected " +
                             std::to_string(expected_cols));
  }
  Eigen::MatrixXd mat(static_cast<Eigen::Index>(lines.size() - 1), expected_cols);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    if (static_cast<Eigen::Index>(cells.size()) != expected_cols) {
      throw std::runtime_error("csv: row " + std::to_string(r + 1) +
                               " has inconsistent column count");
    }
    for (Eigen::Index c = 0; c < expected_cols; ++c) {
      mat(static_cast<Eigen::Index>(r - 1), c) =
          parse_cell(cells[static_cast<std::size_t>(c)], r + 1, static_cast<std::size_t>(c) + 1);
    }
  }
  return mat;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& mat,
                      const std::string& column_prefix) {
  std::string out;
  for (Eigen::Index c = 0; c < mat.cols(); ++c) {
    if (c) out += ',';
    out += column_prefix + std::to_string(c + 1);
  }
  out += '\n';
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      if (c) out += ',';
      format_value(out, mat(r, c));
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("csv: cannot write " + path.string());
  f << out;
}

}  // namespace invdes
