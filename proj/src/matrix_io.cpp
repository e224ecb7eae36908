#include "ripkit/matrix_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ripkit/error.hpp"

namespace ripkit {

namespace {

bool is_skippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_real(const std::string& tok, std::size_t line_no) {
  double value = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  if (!tok.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw ParseError("invalid number '" + tok + "'", line_no);
  return value;
}

std::size_t parse_dim(const std::string& tok, std::size_t line_no) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || value == 0)
    throw ParseError("invalid dimension '" + tok + "'", line_no);
  return value;
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Matrix read_matrix(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto toks = split_ws(line);
    if (toks.size() != 2) throw ParseError("expected header '<rows> <cols>'", line_no);
    rows = parse_dim(toks[0], line_no);
    cols = parse_dim(toks[1], line_no);
    break;
  }
  if (rows == 0) throw ParseError("missing matrix header");

  std::vector<double> entries;
  entries.reserve(rows * cols);
  std::size_t rows_read = 0;
  while (rows_read < rows && std::getline(in, line)) {
    ++line_no;
    if (is_skippable(line)) continue;
    const auto toks = split_ws(line);
    if (toks.size() != cols)
      throw ParseError("expected " + std::to_string(cols) + " values, found " +
                           std::to_string(toks.size()),
                       line_no);
    for (const auto& tok : toks) entries.push_back(parse_real(tok, line_no));
    ++rows_read;
  }
  if (rows_read != rows)
    throw ParseError("expected " + std::to_string(rows) + " rows, found " +
                     std::to_string(rows_read));
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_skippable(line)) throw ParseError("trailing data after matrix", line_no);
  }
  return Matrix(rows, cols, std::move(entries));
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_real(m(r, c));
    }
    out << '\n';
  }
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file '" + path.string() + "'");
  try {
    return read_matrix(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix file '" + path.string() + "'");
  write_matrix(out, m);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace ripkit
