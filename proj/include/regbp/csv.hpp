#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "regbp/linalg.hpp"

namespace regbp {

/// 17 significant digits, enough to round-trip any double through strtod.
std::string format_real(double v);

/// Plain decimal matrix text: one row per line, comma separated, 17 significant
/// digits. Blank lines are ignored; rows must all have the same width.
DenseMatrix parse_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const DenseMatrix& m);

DenseMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& m);

/// Vectors are stored as a single column.
Vector read_vector_csv(const std::filesystem::path& path);
void write_vector_csv(std::ostream& out, std::span<const double> v);
void write_vector_csv(const std::filesystem::path& path, std::span<const double> v);

}  // namespace regbp
