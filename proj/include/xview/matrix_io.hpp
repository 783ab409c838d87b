#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace xview {

/// Plain-text matrix format used for every persisted matrix and vector.
///
///   rows cols\n
///   v v ... v\n        (rows lines of cols space-separated literals)
///
/// Values are written with 17 significant digits so that parse(serialize(M))
/// is bit-identical to M in binary64. Newlines are LF, encoding is ASCII.
/// Non-finite values are rejected on both sides.

void write_matrix(const Eigen::MatrixXd& m, const std::filesystem::path& path);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

/// Stream variants, used to embed matrix blocks in larger files (network
/// checkpoints). `line_no` counts lines consumed so parse errors can name
/// the offending line of the enclosing file.
void write_matrix_stream(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_stream(std::istream& in, int& line_no, const std::string& source);

std::string matrix_to_string(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_string(const std::string& text, const std::string& source = "<string>");

/// 17-significant-digit decimal literal for one double (shared with the
/// matrix writer; exposed for tests).
std::string format_double(double v);

}  // namespace xview
