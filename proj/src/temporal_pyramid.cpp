#include "xview/temporal_pyramid.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace xview {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_pyramid_args(int levels, int coeffs) {
  if (levels < 1) throw std::invalid_argument("ftp: levels must be >= 1");
  if (coeffs < 1) throw std::invalid_argument("ftp: coeffs must be >= 1");
  if (levels > 30) throw std::invalid_argument("ftp: levels out of range");
}
}  // namespace

int pyramid_group_count(int levels) {
  check_pyramid_args(levels, 1);
  return (1 << levels) - 1;
}

int pyramid_output_cols(int levels, int coeffs) {
  check_pyramid_args(levels, coeffs);
  return pyramid_group_count(levels) * coeffs;
}

std::vector<std::pair<int, int>> pyramid_groups(int frames, int levels) {
  check_pyramid_args(levels, 1);
  if (frames < 1) throw std::invalid_argument("ftp: frames must be >= 1");
  std::vector<std::pair<int, int>> out;
  out.reserve(pyramid_group_count(levels));
  // level 1 is the whole span; each further level halves the previous one
  std::vector<std::pair<int, int>> level{{0, frames}};
  for (int l = 1; l <= levels; ++l) {
    out.insert(out.end(), level.begin(), level.end());
    if (l == levels) break;
    std::vector<std::pair<int, int>> next;
    next.reserve(level.size() * 2);
    for (auto [start, len] : level) {
      const int first = (len + 1) / 2;  // ceil-first on odd lengths
      next.emplace_back(start, first);
      next.emplace_back(start + first, len - first);
    }
    level = std::move(next);
  }
  return out;
}

Eigen::MatrixXd ftp_encode(const Eigen::MatrixXd& seq, int levels, int coeffs) {
  check_pyramid_args(levels, coeffs);
  if (seq.rows() < 1 || seq.cols() < 1)
    throw std::invalid_argument("ftp_encode: empty sequence");
  if (!seq.allFinite())
    throw std::invalid_argument("ftp_encode: non-finite entries");

  const auto groups = pyramid_groups(static_cast<int>(seq.cols()), levels);
  Eigen::MatrixXd out(seq.rows(), static_cast<Eigen::Index>(groups.size()) * coeffs);

  for (Eigen::Index r = 0; r < seq.rows(); ++r) {
    Eigen::Index col = 0;
    for (auto [start, len] : groups) {
      for (int k = 0; k < coeffs; ++k, ++col) {
        if (k >= len || len == 0) {
          out(r, col) = 0.0;  // group too short, pad
          continue;
        }
        // definition-sum DFT in fixed t order; len is small enough that
        // O(n^2) is never the bottleneck here
        std::complex<double> acc(0.0, 0.0);
        for (int t = 0; t < len; ++t) {
          const double angle = -kTwoPi * static_cast<double>(k) * t / len;
          acc += seq(r, start + t) * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        out(r, col) = std::abs(acc);
      }
    }
  }
  return out;
}

Eigen::VectorXd vectorize_descriptor(const Eigen::MatrixXd& desc) {
  if (desc.rows() < 1 || desc.cols() < 1)
    throw std::invalid_argument("vectorize_descriptor: empty matrix");
  // Eigen matrices are column-major; reshaping gives column-major stacking
  return Eigen::Map<const Eigen::VectorXd>(desc.data(), desc.size());
}

Eigen::VectorXd depth_feature(const Eigen::MatrixXd& seq, int levels, int coeffs) {
  return vectorize_descriptor(ftp_encode(seq, levels, coeffs));
}

}  // namespace xview
