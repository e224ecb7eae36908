#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ripkit/linalg.hpp"

namespace ripkit {

// Text format: first non-comment line "<rows> <cols>", followed by `rows`
// lines of `cols` whitespace-separated numbers. Lines starting with '#' are
// skipped anywhere in the file.

/// Shortest decimal text of x with 17 significant digits (%.17g).
std::string format_real(double x);

Matrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const Matrix& m);

Matrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const Matrix& m);

}  // namespace ripkit
