#include <doctest.h>

#include <Eigen/Core>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "xview/errors.hpp"
#include "xview/manifest.hpp"
#include "xview/matrix_io.hpp"
#include "xview/protocol.hpp"
#include "xview/report.hpp"
#include "xview/synth.hpp"

namespace fs = std::filesystem;
using namespace xview;

namespace {

fs::path fresh_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "xview_protocol_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Small noisy dataset: three views so the protocol has exactly three
/// view pairs, and modest stream shapes to keep feature extraction cheap.
SynthConfig noisy_config() {
  SynthConfig cfg;
  cfg.classes = 3;
  cfg.views = 3;
  cfg.samples_per_cell = 2;
  cfg.depth_dim = 12;
  cfg.frames = 8;
  cfg.trajectories_per_video = 30;
  cfg.traj_dim = 4;
  cfg.pretrain_per_cell = 4;
  cfg.seed = 7;
  return cfg;
}

/// Degenerate noise-free dataset with widely separated classes: every
/// sample of a (class, view) cell is identical, so each cell contributes a
/// single prototype and the pipeline should classify every split
/// perfectly. The stream shapes are larger than noisy_config() because
/// the cross-view margins come entirely from dimensionality here.
SynthConfig separable_config() {
  SynthConfig cfg;
  cfg.classes = 3;
  cfg.views = 3;
  cfg.samples_per_cell = 2;
  cfg.depth_dim = 48;
  cfg.frames = 32;
  cfg.trajectories_per_video = 60;
  cfg.traj_dim = 8;
  cfg.pretrain_per_cell = 8;
  cfg.separation = 6.0;
  cfg.noise_sigma = 0.0;
  cfg.seed = 3;
  return cfg;
}

PipelineParams params_with_seed(std::uint64_t seed) {
  PipelineParams p = benchmark_params();
  p.seed = seed;
  return p;
}

void overwrite_with_garbage(const DatasetManifest& m, bool depth_stream) {
  for (const SampleRecord& rec : m.samples) {
    std::ofstream out(m.resolve(depth_stream ? rec.depth_path : rec.traj_path),
                      std::ios::binary | std::ios::trunc);
    out << "garbage\n";
  }
}

bool records_equal(const SplitRecord& a, const SplitRecord& b) {
  return a.train_views == b.train_views && a.test_view == b.test_view &&
         a.modality == b.modality && a.accuracy == b.accuracy && a.confusion == b.confusion;
}

}  // namespace

TEST_CASE("modality names round-trip and unknown names are rejected") {
  CHECK(modality_name(Modality::kDepth) == "depth");
  CHECK(modality_name(Modality::kRgb) == "rgb");
  CHECK(modality_name(Modality::kFused) == "fused");
  CHECK(modality_from_string("depth") == Modality::kDepth);
  CHECK(modality_from_string("rgb") == Modality::kRgb);
  CHECK(modality_from_string("fused") == Modality::kFused);
  CHECK_THROWS_WITH_AS(modality_from_string("thermal"),
                       doctest::Contains("unknown modality 'thermal'"), std::invalid_argument);
  CHECK_THROWS_AS(modality_from_string(""), std::invalid_argument);
}

TEST_CASE("protocol combinations pair every two views and test on each remaining view") {
  SUBCASE("three views give three combinations in pair-major order") {
    const auto combos = protocol_combinations({0, 1, 2});
    REQUIRE(combos.size() == 3);
    CHECK(combos[0].train_views == std::vector<int>{0, 1});
    CHECK(combos[0].test_view == 2);
    CHECK(combos[1].train_views == std::vector<int>{0, 2});
    CHECK(combos[1].test_view == 1);
    CHECK(combos[2].train_views == std::vector<int>{1, 2});
    CHECK(combos[2].test_view == 0);
  }
  SUBCASE("four views give twelve combinations with ascending test views per pair") {
    const auto combos = protocol_combinations({0, 1, 2, 3});
    REQUIRE(combos.size() == 12);
    const std::vector<std::pair<std::vector<int>, int>> expected = {
        {{0, 1}, 2}, {{0, 1}, 3}, {{0, 2}, 1}, {{0, 2}, 3}, {{0, 3}, 1}, {{0, 3}, 2},
        {{1, 2}, 0}, {{1, 2}, 3}, {{1, 3}, 0}, {{1, 3}, 2}, {{2, 3}, 0}, {{2, 3}, 1},
    };
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(combos[i].train_views == expected[i].first);
      CHECK(combos[i].test_view == expected[i].second);
    }
  }
  SUBCASE("five views give C(5,2) x 3 = 30 combinations") {
    CHECK(protocol_combinations({0, 1, 2, 3, 4}).size() == 30);
  }
  SUBCASE("view labels need not be contiguous") {
    const auto combos = protocol_combinations({2, 5, 9});
    REQUIRE(combos.size() == 3);
    CHECK(combos[0].train_views == std::vector<int>{2, 5});
    CHECK(combos[0].test_view == 9);
    CHECK(combos[2].train_views == std::vector<int>{5, 9});
    CHECK(combos[2].test_view == 2);
  }
  SUBCASE("fewer than three views or duplicate views are rejected") {
    CHECK_THROWS_AS(protocol_combinations({0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(protocol_combinations({}), std::invalid_argument);
    CHECK_THROWS_WITH_AS(protocol_combinations({0, 1, 1, 2}), doctest::Contains("duplicate"),
                         std::invalid_argument);
  }
}

TEST_CASE("accuracy is the fraction of positions where prediction matches truth") {
  CHECK(compute_accuracy({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(compute_accuracy({0, 0, 0}, {1, 2, 3}) == 0.0);
  CHECK(compute_accuracy({1, 2, 3, 0}, {1, 2, 3, 4}) == 0.75);
  CHECK_THROWS_AS(compute_accuracy({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(compute_accuracy({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("split requests are validated against the manifest's views") {
  const DatasetManifest m = generate_dataset(noisy_config(), fresh_dir("validate"));
  const PipelineParams params = params_with_seed(7);
  CHECK_THROWS_WITH_AS(run_split(m, {0, 0}, 1, params, Modality::kDepth),
                       doctest::Contains("duplicate training view"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(run_split(m, {0, 1}, 1, params, Modality::kDepth),
                       doctest::Contains("also appears among the training views"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(run_split(m, {0, 9}, 1, params, Modality::kDepth),
                       doctest::Contains("training view 9"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(run_split(m, {0, 1}, 9, params, Modality::kDepth),
                       doctest::Contains("test view 9"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(run_split(m, {}, 1, params, Modality::kDepth),
                       doctest::Contains("no training views"), std::invalid_argument);
}

TEST_CASE("a split record reports sorted train views and a consistent confusion matrix") {
  const DatasetManifest m = generate_dataset(noisy_config(), fresh_dir("record"));
  const SplitRecord rec = run_split(m, {2, 0}, 1, params_with_seed(7), Modality::kDepth);
  CHECK(rec.train_views == std::vector<int>{0, 2});
  CHECK(rec.test_view == 1);
  CHECK(rec.modality == "depth");
  REQUIRE(rec.confusion.size() == 3);
  int total = 0;
  int trace = 0;
  for (std::size_t r = 0; r < rec.confusion.size(); ++r) {
    REQUIRE(rec.confusion[r].size() == 3);
    int row_sum = 0;
    for (std::size_t c = 0; c < rec.confusion[r].size(); ++c) {
      CHECK(rec.confusion[r][c] >= 0);
      row_sum += rec.confusion[r][c];
    }
    // every test view holds samples_per_cell samples of each class
    CHECK(row_sum == 2);
    total += row_sum;
    trace += rec.confusion[r][r];
  }
  CHECK(total == 6);
  CHECK(rec.accuracy == static_cast<double>(trace) / static_cast<double>(total));
}

TEST_CASE("a noise-free separable dataset is classified perfectly on every split") {
  const DatasetManifest m = generate_dataset(separable_config(), fresh_dir("separable"));
  const EvaluationReport report = run_protocol(m, params_with_seed(3));
  REQUIRE(report.combinations.size() == 9);
  for (const SplitRecord& rec : report.combinations) {
    CHECK(rec.accuracy == 1.0);
    for (std::size_t r = 0; r < rec.confusion.size(); ++r)
      for (std::size_t c = 0; c < rec.confusion[r].size(); ++c)
        CHECK(rec.confusion[r][c] == (r == c ? 2 : 0));
  }
  for (const auto& [name, mean] : report.modality_means) CHECK(mean == 1.0);
  REQUIRE(report.fused_minus_best_single.has_value());
  CHECK(*report.fused_minus_best_single == 0.0);
}

TEST_CASE("the full protocol evaluates every combination in all three modalities") {
  const DatasetManifest m = generate_dataset(noisy_config(), fresh_dir("protocol"));
  const PipelineParams params = params_with_seed(7);
  const EvaluationReport report = run_protocol(m, params);

  CHECK(report.protocol == "cross-view");
  CHECK(report.params.lambda == params.lambda);
  CHECK(report.params.lambda1 == params.lambda1);
  CHECK(report.params.sparsity == params.sparsity);
  CHECK(report.params.codebook_size == params.codebook_size);
  CHECK(report.params.widths == params.train.widths);
  CHECK(report.params.seed == params.seed);
  CHECK(report.params.ftp_levels == params.ftp_levels);
  CHECK(report.params.ftp_coeffs == params.ftp_coeffs);

  const auto combos = protocol_combinations(m.views);
  REQUIRE(report.combinations.size() == combos.size() * 3);
  const char* order[] = {"depth", "rgb", "fused"};
  double sums[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < report.combinations.size(); ++i) {
    const SplitRecord& rec = report.combinations[i];
    CHECK(rec.train_views == combos[i / 3].train_views);
    CHECK(rec.test_view == combos[i / 3].test_view);
    CHECK(rec.modality == order[i % 3]);
    CHECK(rec.accuracy >= 0.0);
    CHECK(rec.accuracy <= 1.0);
    sums[i % 3] += rec.accuracy;
  }

  REQUIRE(report.modality_means.size() == 3);
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(report.modality_means[s].first == order[s]);
    CHECK(report.modality_means[s].second == sums[s] / static_cast<double>(combos.size()));
  }
  REQUIRE(report.fused_minus_best_single.has_value());
  CHECK(*report.fused_minus_best_single ==
        report.modality_means[2].second -
            std::max(report.modality_means[0].second, report.modality_means[1].second));

  SUBCASE("a second run serializes to identical bytes") {
    const EvaluationReport again = run_protocol(m, params);
    CHECK(report_to_string(again) == report_to_string(report));
  }
}

TEST_CASE("single-modality runs never open the other stream's files") {
  const PipelineParams params = params_with_seed(7);

  SUBCASE("depth runs survive corrupted trajectory files") {
    const DatasetManifest m = generate_dataset(noisy_config(), fresh_dir("corrupt_traj"));
    const SplitRecord before = run_split(m, {0, 1}, 2, params, Modality::kDepth);
    overwrite_with_garbage(m, /*depth_stream=*/false);
    CHECK_THROWS_AS(read_matrix(m.resolve(m.samples[0].traj_path)), IoError);
    const SplitRecord after = run_split(m, {0, 1}, 2, params, Modality::kDepth);
    CHECK(records_equal(before, after));
  }
  SUBCASE("rgb runs survive corrupted depth files") {
    const DatasetManifest m = generate_dataset(noisy_config(), fresh_dir("corrupt_depth"));
    const SplitRecord before = run_split(m, {0, 1}, 2, params, Modality::kRgb);
    overwrite_with_garbage(m, /*depth_stream=*/true);
    CHECK_THROWS_AS(read_matrix(m.resolve(m.samples[0].depth_path)), IoError);
    const SplitRecord after = run_split(m, {0, 1}, 2, params, Modality::kRgb);
    CHECK(records_equal(before, after));
  }
}

TEST_CASE("pre-trained extractors give the same split results as standalone runs") {
  const DatasetManifest m = generate_dataset(noisy_config(), fresh_dir("extractors"));
  const PipelineParams params = params_with_seed(7);
  const Extractors ex = train_extractors(m, params);

  for (const Modality modality : {Modality::kDepth, Modality::kRgb, Modality::kFused}) {
    const SplitRecord shared = run_split(m, {0, 2}, 1, params, ex, modality);
    const SplitRecord standalone = run_split(m, {0, 2}, 1, params, modality);
    CHECK(records_equal(shared, standalone));
  }

  SUBCASE("per-sample encodings are consistent across modalities") {
    const SampleRecord& sample = m.samples[4];
    const Eigen::VectorXd depth = encode_sample(m, sample, params, nullptr, Modality::kDepth);
    const Eigen::VectorXd rgb = encode_sample(m, sample, params, &ex, Modality::kRgb);
    const Eigen::VectorXd fused = encode_sample(m, sample, params, &ex, Modality::kFused);
    // depth stream: 12 pixels x 28 pyramid coefficients; rgb stream: the
    // histogram's concatenated layer outputs (16 + 16 + 32 + 32)
    CHECK(depth.size() == 12 * 28);
    CHECK(rgb.size() == 96);
    REQUIRE(fused.size() == depth.size() + rgb.size());
    CHECK(std::abs(depth.norm() - 1.0) < 1e-12);
    CHECK(std::abs(rgb.norm() - 1.0) < 1e-12);
    CHECK(std::abs(fused.norm() - 1.0) < 1e-12);
    // the fused vector is the per-stream blocks re-normalized jointly, so
    // normalizing either block recovers the single-modality encoding
    const Eigen::VectorXd head = fused.head(depth.size()).normalized();
    const Eigen::VectorXd tail = fused.tail(rgb.size()).normalized();
    CHECK((head - depth).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((tail - rgb).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("rgb and fused encodings require extractors") {
    CHECK_THROWS_AS(encode_sample(m, m.samples[0], params, nullptr, Modality::kRgb),
                    std::invalid_argument);
    CHECK_THROWS_AS(encode_sample(m, m.samples[0], params, nullptr, Modality::kFused),
                    std::invalid_argument);
  }
}

TEST_CASE("pipeline parameter validation rejects out-of-range knobs") {
  const DatasetManifest m = generate_dataset(noisy_config(), fresh_dir("params"));
  PipelineParams p = params_with_seed(7);
  p.lambda = 0.0;
  CHECK_THROWS_WITH_AS(run_protocol(m, p), doctest::Contains("lambda"), std::invalid_argument);
  p = params_with_seed(7);
  p.lambda1 = 1.5;
  CHECK_THROWS_WITH_AS(run_protocol(m, p), doctest::Contains("lambda1"), std::invalid_argument);
  p = params_with_seed(7);
  p.sparsity = 0;
  CHECK_THROWS_WITH_AS(run_protocol(m, p), doctest::Contains("sparsity"), std::invalid_argument);
  p = params_with_seed(7);
  p.codebook_size = 0;
  CHECK_THROWS_WITH_AS(run_protocol(m, p), doctest::Contains("codebook"), std::invalid_argument);
  p = params_with_seed(7);
  p.ftp_levels = 0;
  CHECK_THROWS_WITH_AS(run_protocol(m, p), doctest::Contains("levels"), std::invalid_argument);
  p = params_with_seed(7);
  p.ftp_coeffs = 0;
  CHECK_THROWS_WITH_AS(run_protocol(m, p), doctest::Contains("coefficient"),
                       std::invalid_argument);
}
