#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "xview/codebook.hpp"
#include "xview/errors.hpp"
#include "xview/manifest.hpp"
#include "xview/matrix_io.hpp"
#include "xview/protocol.hpp"
#include "xview/report.hpp"
#include "xview/synth.hpp"
#include "xview/view_transfer_net.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-view action recognition: feature encoding, view transfer, and"
               " sparse-dense collaborative classification"};
  app.require_subcommand(1);

  std::string manifest_path, out_path, codebook_path, net_path;
  std::string modality_str = "fused";
  std::vector<int> train_views;
  std::vector<int> widths;
  int test_view = 0;
  bool bench = false;
  std::uint64_t synth_seed = 7;
  xview::PipelineParams params;

  // --bench swaps in the desk-scale defaults; explicitly given flags win
  const auto finalize_params = [&](CLI::App* cmd) {
    const auto untouched = [&](const std::string& flag) {
      const CLI::Option* opt = cmd->get_option_no_throw(flag);
      return opt != nullptr && opt->count() == 0;
    };
    if (bench) {
      const xview::PipelineParams b = xview::benchmark_params();
      if (untouched("--codebook-size")) params.codebook_size = b.codebook_size;
      if (untouched("--sparsity")) params.sparsity = b.sparsity;
      params.train.widths = b.train.widths;
      params.train.initial_lr = b.train.initial_lr;
      params.train.lr_drop_every = b.train.lr_drop_every;
      params.train.total_iters = b.train.total_iters;
      params.train.weight_decay = b.train.weight_decay;
      params.train.dropout_rate = b.train.dropout_rate;
    }
    if (!widths.empty()) {
      if (widths.size() != 4)
        throw std::invalid_argument("--widths expects exactly four comma-separated values");
      for (std::size_t i = 0; i < widths.size(); ++i) {
        if (widths[i] < 1) throw std::invalid_argument("--widths entries must be >= 1");
        params.train.widths[i] = widths[i];
      }
    }
  };

  const auto add_bench_flag = [&](CLI::App* cmd) {
    cmd->add_flag("--bench", bench,
                  "Use desk-scale benchmark parameters (small codebook and network,"
                  " hot unregularized training schedule)");
  };

  const auto add_param_flags = [&](CLI::App* cmd) {
    cmd->add_option("--lambda", params.lambda, "Ridge regularizer")->capture_default_str();
    cmd->add_option("--lambda1", params.lambda1, "Sparse/dense mixing weight in [0,1]")
        ->capture_default_str();
    cmd->add_option("--sparsity", params.sparsity, "Max OMP support size")->capture_default_str();
    cmd->add_option("--codebook-size", params.codebook_size, "Number of codebook centroids")
        ->capture_default_str();
    cmd->add_option("--widths", widths, "Network layer widths w1,w2,w3,w4")->delimiter(',');
    cmd->add_option("--seed", params.seed, "Seed for all pipeline randomness")
        ->capture_default_str();
    add_bench_flag(cmd);
  };

  CLI::App* synth = app.add_subcommand("synth", "Generate the seeded synthetic benchmark");
  synth->add_option("--out", out_path, "Output dataset directory")->required();
  synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synth->callback([&] {
    xview::SynthConfig cfg;
    cfg.seed = synth_seed;
    const xview::DatasetManifest manifest = xview::generate_dataset(cfg, out_path);
    std::cout << "wrote " << manifest.samples.size() << " samples and "
              << manifest.pretrain.size() << " pretrain trajectory sets to " << out_path << "\n";
  });

  CLI::App* train_cb =
      app.add_subcommand("train-codebook", "Fit the trajectory codebook on the pretrain corpus");
  train_cb->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  train_cb->add_option("--out", out_path, "Output centroid matrix file")->required();
  train_cb->add_option("--codebook-size", params.codebook_size, "Number of centroids")
      ->capture_default_str();
  train_cb->add_option("--seed", params.seed, "Seed for all pipeline randomness")
      ->capture_default_str();
  add_bench_flag(train_cb);
  train_cb->callback([&] {
    finalize_params(train_cb);
    const xview::DatasetManifest manifest = xview::load_manifest(manifest_path);
    const xview::Codebook codebook = xview::fit_codebook(manifest, params);
    xview::write_matrix(codebook.centroids, out_path);
    std::cout << "wrote " << codebook.size() << " centroids of dimension " << codebook.dim()
              << " to " << out_path << "\n";
  });

  CLI::App* train_net = app.add_subcommand(
      "train-viewnet", "Train the view-transfer network on pretrain histogram pairs");
  train_net->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  train_net->add_option("--codebook", codebook_path, "Centroid matrix from train-codebook")
      ->required();
  train_net->add_option("--out", out_path, "Output network checkpoint")->required();
  train_net->add_option("--widths", widths, "Network layer widths w1,w2,w3,w4")->delimiter(',');
  train_net->add_option("--seed", params.seed, "Seed for all pipeline randomness")
      ->capture_default_str();
  add_bench_flag(train_net);
  train_net->callback([&] {
    finalize_params(train_net);
    const xview::DatasetManifest manifest = xview::load_manifest(manifest_path);
    const xview::Codebook codebook{xview::read_matrix(codebook_path)};
    params.codebook_size = codebook.size();
    const xview::NetworkParams net = xview::train_network(manifest, params, codebook);
    xview::save_network(net, out_path);
    std::cout << "wrote network (input " << net.input_dim() << ", feature " << net.feature_dim()
              << ") to " << out_path << "\n";
  });

  CLI::App* encode =
      app.add_subcommand("encode", "Write the per-sample feature columns for one modality");
  encode->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  encode->add_option("--modality", modality_str, "depth, rgb, or fused")->capture_default_str();
  encode->add_option("--codebook", codebook_path, "Centroid matrix (rgb and fused only)");
  encode->add_option("--net", net_path, "Network checkpoint (rgb and fused only)");
  encode->add_option("--out", out_path, "Output matrix file, feature dim x sample count")
      ->required();
  encode->callback([&] {
    const xview::DatasetManifest manifest = xview::load_manifest(manifest_path);
    const xview::Modality modality = xview::modality_from_string(modality_str);
    if (manifest.samples.empty()) throw std::invalid_argument("encode: manifest has no samples");
    xview::Extractors extractors;
    const bool want_rgb = modality != xview::Modality::kDepth;
    if (want_rgb) {
      if (codebook_path.empty() || net_path.empty())
        throw std::invalid_argument("encode: --codebook and --net are required for modality '" +
                                    modality_str + "'");
      extractors.codebook = xview::Codebook{xview::read_matrix(codebook_path)};
      extractors.net = xview::load_network(net_path);
    }
    Eigen::MatrixXd features;
    for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
      const Eigen::VectorXd f = xview::encode_sample(
          manifest, manifest.samples[i], params, want_rgb ? &extractors : nullptr, modality);
      if (i == 0) features.resize(f.size(), static_cast<Eigen::Index>(manifest.samples.size()));
      if (f.size() != features.rows())
        throw std::invalid_argument("encode: sample " + manifest.samples[i].id +
                                    ": feature length differs from earlier samples");
      features.col(static_cast<Eigen::Index>(i)) = f;
    }
    xview::write_matrix(features, out_path);
    std::cout << "wrote " << features.rows() << " x " << features.cols()
              << " feature matrix to " << out_path << "\n";
  });

  CLI::App* split = app.add_subcommand("run-split", "Evaluate one train-views/test-view split");
  split->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  split->add_option("--train-views", train_views, "Training view indices i,j")
      ->delimiter(',')
      ->required();
  split->add_option("--test-view", test_view, "Held-out test view")->required();
  split->add_option("--modality", modality_str, "depth, rgb, or fused")->capture_default_str();
  split->add_option("--out", out_path, "Optional single-split report file");
  add_param_flags(split);
  split->callback([&] {
    finalize_params(split);
    const xview::DatasetManifest manifest = xview::load_manifest(manifest_path);
    const xview::Modality modality = xview::modality_from_string(modality_str);
    const xview::SplitRecord record =
        xview::run_split(manifest, train_views, test_view, params, modality);
    std::cout << record.modality << " accuracy = " << record.accuracy << "\n";
    if (!out_path.empty()) {
      xview::EvaluationReport report;
      report.protocol = "cross-view";
      report.params.lambda = params.lambda;
      report.params.lambda1 = params.lambda1;
      report.params.sparsity = params.sparsity;
      report.params.codebook_size = params.codebook_size;
      report.params.widths = params.train.widths;
      report.params.seed = params.seed;
      report.params.ftp_levels = params.ftp_levels;
      report.params.ftp_coeffs = params.ftp_coeffs;
      report.modality_means.emplace_back(record.modality, record.accuracy);
      report.combinations.push_back(record);
      xview::write_report(report, out_path);
    }
  });

  CLI::App* protocol = app.add_subcommand(
      "run-protocol", "Run every view combination in all three modalities");
  protocol->add_option("--manifest", manifest_path, "Dataset manifest")->required();
  protocol->add_option("--out", out_path, "Output report file")->required();
  add_param_flags(protocol);
  protocol->callback([&] {
    finalize_params(protocol);
    const xview::DatasetManifest manifest = xview::load_manifest(manifest_path);
    const xview::EvaluationReport report = xview::run_protocol(manifest, params);
    xview::write_report(report, out_path);
    for (const auto& [name, mean] : report.modality_means)
      std::cout << name << " mean accuracy = " << mean << "\n";
    if (report.fused_minus_best_single)
      std::cout << "fused minus best single = " << *report.fused_minus_best_single << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  } catch (const xview::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
