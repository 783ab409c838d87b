#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "xview/rng.hpp"
#include "xview/temporal_pyramid.hpp"

using namespace xview;

namespace {

// Independent reference: recompute the recursive-halving group layout and a
// literal definition-sum DFT per group, with no shared code beyond Eigen.
std::vector<std::pair<int, int>> oracle_groups(int frames, int levels) {
  std::vector<std::pair<int, int>> out;
  std::vector<std::pair<int, int>> current{{0, frames}};
  for (int l = 0; l < levels; ++l) {
    for (auto g : current) out.push_back(g);
    std::vector<std::pair<int, int>> next;
    for (auto [start, len] : current) {
      const int first = len - len / 2;  // ceil half
      next.push_back({start, first});
      next.push_back({start + first, len - first});
    }
    current = next;
  }
  return out;
}

Eigen::MatrixXd oracle_encode(const Eigen::MatrixXd& seq, int levels, int coeffs) {
  const auto groups = oracle_groups(static_cast<int>(seq.cols()), levels);
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(seq.rows(), static_cast<Eigen::Index>(groups.size()) * coeffs);
  for (Eigen::Index r = 0; r < seq.rows(); ++r) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto [start, len] = groups[g];
      for (int k = 0; k < std::min(coeffs, len); ++k) {
        std::complex<double> sum = 0.0;
        for (int t = 0; t < len; ++t) {
          const double angle = -2.0 * M_PI * k * t / len;
          sum += seq(r, start + t) * std::exp(std::complex<double>(0.0, angle));
        }
        out(r, static_cast<Eigen::Index>(g) * coeffs + k) = std::abs(sum);
      }
    }
  }
  return out;
}

Eigen::MatrixXd seeded_sequence(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.gaussian();
  return m;
}

}  // namespace

TEST_CASE("three levels make seven groups and 28 output columns at four coefficients") {
  CHECK(pyramid_group_count(1) == 1);
  CHECK(pyramid_group_count(2) == 3);
  CHECK(pyramid_group_count(3) == 7);
  CHECK(pyramid_output_cols(3, 4) == 28);
  CHECK(pyramid_output_cols(2, 5) == 15);
}

TEST_CASE("odd spans split ceil-first") {
  const auto groups = pyramid_groups(5, 2);
  REQUIRE(groups.size() == 3);
  CHECK(groups[0] == std::pair<int, int>{0, 5});
  CHECK(groups[1] == std::pair<int, int>{0, 3});
  CHECK(groups[2] == std::pair<int, int>{3, 2});
}

TEST_CASE("group layout is level-major and partitions every level") {
  for (int frames : {1, 2, 7, 16, 33}) {
    const auto groups = pyramid_groups(frames, 3);
    REQUIRE(groups.size() == 7);
    CHECK(groups == oracle_groups(frames, 3));
    // level 2 and level 3 each tile [0, frames) without gaps
    CHECK(groups[1].second + groups[2].second == frames);
    CHECK(groups[3].second + groups[4].second + groups[5].second + groups[6].second == frames);
  }
}

TEST_CASE("an all-ones row encodes as per-group DC magnitudes") {
  const Eigen::MatrixXd seq = Eigen::MatrixXd::Ones(1, 8);
  const Eigen::MatrixXd enc = ftp_encode(seq, 3, 4);
  REQUIRE(enc.rows() == 1);
  REQUIRE(enc.cols() == 28);
  const double expected[28] = {8, 0, 0, 0, 4, 0, 0, 0, 4, 0, 0, 0, 2, 0,
                               0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0};
  for (int c = 0; c < 28; ++c) CHECK(enc(0, c) == doctest::Approx(expected[c]).epsilon(1e-12));
}

TEST_CASE("encoding matches the naive reference within 1e-10") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Rng pick(mix_seed(900, seed));
    const int rows = 1 + static_cast<int>(pick.below(8));
    const int frames = 1 + static_cast<int>(pick.below(64));
    const Eigen::MatrixXd seq = seeded_sequence(rows, frames, mix_seed(901, seed));
    const Eigen::MatrixXd got = ftp_encode(seq, 3, 4);
    const Eigen::MatrixXd want = oracle_encode(seq, 3, 4);
    REQUIRE(got.rows() == want.rows());
    REQUIRE(got.cols() == want.cols());
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("a full-scale 4096-row sequence keeps its rows and gains 28 columns") {
  const Eigen::MatrixXd seq = Eigen::MatrixXd::Zero(4096, 20);
  const Eigen::MatrixXd enc = ftp_encode(seq);
  CHECK(enc.rows() == 4096);
  CHECK(enc.cols() == 28);
}

TEST_CASE("groups shorter than the coefficient count zero-pad") {
  // two frames at three levels: all level-3 groups have at most one frame
  Eigen::MatrixXd seq(1, 2);
  seq << 3.0, 5.0;
  const Eigen::MatrixXd enc = ftp_encode(seq, 3, 4);
  // level 1: DFT of (3,5) -> |8|, |3-5| = 2, pad, pad
  CHECK(enc(0, 0) == doctest::Approx(8.0));
  CHECK(enc(0, 1) == doctest::Approx(2.0));
  CHECK(enc(0, 2) == 0.0);
  CHECK(enc(0, 3) == 0.0);
  // level 2: singleton groups (3) and (5), only a DC coefficient each
  CHECK(enc(0, 4) == doctest::Approx(3.0));
  CHECK(enc(0, 5) == 0.0);
  CHECK(enc(0, 8) == doctest::Approx(5.0));
  // level 3: splits of singletons are (1, 0) frames; empty groups are all pad
  CHECK(enc.row(0).segment(12, 4).isApprox((Eigen::RowVector4d() << 3, 0, 0, 0).finished()));
  CHECK(enc.row(0).segment(16, 4).isZero());
}

TEST_CASE("entries are non-negative DFT magnitudes") {
  const Eigen::MatrixXd seq = seeded_sequence(4, 31, 77);
  const Eigen::MatrixXd enc = ftp_encode(seq, 3, 4);
  CHECK(enc.minCoeff() >= 0.0);
}

TEST_CASE("scaling the sequence scales the encoding by the magnitude") {
  const Eigen::MatrixXd seq = seeded_sequence(3, 24, 300);
  const Eigen::MatrixXd base = ftp_encode(seq, 3, 4);
  CHECK((ftp_encode(2.5 * seq, 3, 4) - 2.5 * base).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((ftp_encode(-2.5 * seq, 3, 4) - 2.5 * base).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rows encode independently, so row permutation commutes") {
  const Eigen::MatrixXd seq = seeded_sequence(5, 19, 41);
  Eigen::MatrixXd permuted(5, 19);
  const int order[5] = {4, 2, 0, 3, 1};
  for (int r = 0; r < 5; ++r) permuted.row(r) = seq.row(order[r]);
  const Eigen::MatrixXd enc = ftp_encode(seq, 3, 4);
  const Eigen::MatrixXd enc_p = ftp_encode(permuted, 3, 4);
  for (int r = 0; r < 5; ++r) CHECK(enc_p.row(r) == enc.row(order[r]));
}

TEST_CASE("vectorize stacks columns first") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 3, 4;
  const Eigen::VectorXd v = vectorize_descriptor(m);
  REQUIRE(v.size() == 4);
  CHECK(v(0) == 1);
  CHECK(v(1) == 3);
  CHECK(v(2) == 2);
  CHECK(v(3) == 4);
}

TEST_CASE("depth feature is the vectorized encoding") {
  const Eigen::MatrixXd seq = seeded_sequence(6, 16, 88);
  const Eigen::VectorXd direct = depth_feature(seq, 3, 4);
  const Eigen::VectorXd manual = vectorize_descriptor(ftp_encode(seq, 3, 4));
  CHECK(direct == manual);
  CHECK(direct.size() == 6 * 28);
}

TEST_CASE("invalid arguments are rejected") {
  const Eigen::MatrixXd seq = Eigen::MatrixXd::Ones(2, 4);
  CHECK_THROWS_AS(ftp_encode(seq, 0, 4), std::invalid_argument);
  CHECK_THROWS_AS(ftp_encode(seq, 3, 0), std::invalid_argument);
  CHECK_THROWS_AS(ftp_encode(Eigen::MatrixXd(), 3, 4), std::invalid_argument);
  Eigen::MatrixXd bad(1, 2);
  bad << 1.0, std::nan("");
  CHECK_THROWS_AS(ftp_encode(bad, 3, 4), std::invalid_argument);
}
