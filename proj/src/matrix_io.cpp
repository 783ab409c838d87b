#include "xview/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "xview/errors.hpp"

namespace xview {

namespace {

[[noreturn]] void parse_fail(const std::string& source, int line_no, const std::string& what) {
  throw IoError(source + ":" + std::to_string(line_no) + ": " + what);
}

// Splits on runs of spaces. The writer emits single spaces; the reader is
// lenient about repeats but strict about token count and content.
std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_value(std::string_view tok, const std::string& source, int line_no) {
  double v = 0.0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    parse_fail(source, line_no, "non-numeric token '" + std::string(tok) + "'");
  if (!std::isfinite(v))
    parse_fail(source, line_no, "non-finite value '" + std::string(tok) + "'");
  return v;
}

long parse_dimension(std::string_view tok, const std::string& source, int line_no) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || v < 1)
    parse_fail(source, line_no, "bad dimension '" + std::string(tok) + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

void write_matrix_stream(std::ostream& out, const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.cols() < 1)
    throw std::invalid_argument("write_matrix: empty matrix");
  if (!m.allFinite())
    throw std::invalid_argument("write_matrix: non-finite entries");
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_stream(std::istream& in, int& line_no, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) parse_fail(source, line_no + 1, "missing header line");
  ++line_no;
  const auto header = split_tokens(line);
  if (header.size() != 2)
    parse_fail(source, line_no, "malformed header, expected 'rows cols'");
  const long rows = parse_dimension(header[0], source, line_no);
  const long cols = parse_dimension(header[1], source, line_no);

  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    if (!std::getline(in, line))
      parse_fail(source, line_no + 1, "unexpected end of data, expected " +
                                          std::to_string(rows) + " rows");
    ++line_no;
    const auto toks = split_tokens(line);
    if (static_cast<long>(toks.size()) != cols)
      parse_fail(source, line_no,
                 "expected " + std::to_string(cols) + " values, found " +
                     std::to_string(toks.size()));
    for (long c = 0; c < cols; ++c) m(r, c) = parse_value(toks[c], source, line_no);
  }
  return m;
}

void write_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_matrix_stream(out, m);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  int line_no = 0;
  Eigen::MatrixXd m = read_matrix_stream(in, line_no, path.string());
  // nothing but trailing whitespace may follow the last row
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!split_tokens(line).empty())
      parse_fail(path.string(), line_no, "trailing data after matrix body");
  }
  return m;
}

std::string matrix_to_string(const Eigen::MatrixXd& m) {
  std::ostringstream ss;
  write_matrix_stream(ss, m);
  return ss.str();
}

Eigen::MatrixXd matrix_from_string(const std::string& text, const std::string& source) {
  std::istringstream ss(text);
  int line_no = 0;
  return read_matrix_stream(ss, line_no, source);
}

}  // namespace xview
