#include "regbp/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace regbp {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

double parse_cell(const std::string& cell, std::size_t line) {
  std::size_t b = cell.find_first_not_of(" \t\r");
  std::size_t e = cell.find_last_not_of(" \t\r");
  if (b == std::string::npos) throw IoError("empty CSV cell on line " + std::to_string(line));
  const std::string s = cell.substr(b, e - b + 1);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw IoError("bad number '" + s + "' on line " + std::to_string(line));
  }
  return v;
}

}  // namespace

DenseMatrix parse_matrix_csv(std::istream& in) {
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t width = 0;
    while (std::getline(ss, cell, ',')) {
      data.push_back(parse_cell(cell, lineno));
      ++width;
    }
    if (rows == 0) {
      cols = width;
    } else if (width != cols) {
      throw IoError("CSV line " + std::to_string(lineno) + " has " + std::to_string(width) +
                    " columns, expected " + std::to_string(cols));
    }
    ++rows;
  }
  return DenseMatrix(rows, cols, std::move(data));
}

void write_matrix_csv(std::ostream& out, const DenseMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_real(m(r, c));
    }
    out << '\n';
  }
}

DenseMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_matrix_csv(in);
}

void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_matrix_csv(out, m);
}

Vector read_vector_csv(const std::filesystem::path& path) {
  const DenseMatrix m = read_matrix_csv(path);
  if (m.cols() != 1 && m.rows() != 1) throw IoError(path.string() + " is not a vector");
  return m.data();
}

void write_vector_csv(std::ostream& out, std::span<const double> v) {
  for (double x : v) out << format_real(x) << '\n';
}

void write_vector_csv(const std::filesystem::path& path, std::span<const double> v) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_vector_csv(out, v);
}

}  // namespace regbp
