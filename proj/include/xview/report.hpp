#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xview {

/// Parameter block echoed into every report so a result is reproducible
/// from the report alone.
struct ReportParams {
  double lambda = 0.01;
  double lambda1 = 0.35;
  int sparsity = 50;
  int codebook_size = 2000;
  std::array<int, 4> widths{1000, 1000, 2000, 2000};
  std::uint64_t seed = 0;
  int ftp_levels = 3;
  int ftp_coeffs = 4;
};

/// One (train views, test view, modality) evaluation. The confusion matrix
/// is class_count x class_count, row = true class, column = predicted.
struct SplitRecord {
  std::vector<int> train_views;
  int test_view = 0;
  std::string modality;
  double accuracy = 0.0;
  std::vector<std::vector<int>> confusion;
};

struct EvaluationReport {
  std::string protocol;
  ReportParams params;
  std::vector<SplitRecord> combinations;
  // insertion-ordered (modality, mean accuracy) pairs
  std::vector<std::pair<std::string, double>> modality_means;
  std::optional<double> fused_minus_best_single;
};

/// Fixed field order; identical reports serialize to identical bytes.
void write_report(const EvaluationReport& report, const std::filesystem::path& path);
std::string report_to_string(const EvaluationReport& report);

/// Parses and validates: accuracies within [0, 1], square confusion
/// matrices consistent with the stated accuracy.
EvaluationReport read_report(const std::filesystem::path& path);
EvaluationReport report_from_string(const std::string& text, const std::string& source = "<string>");

}  // namespace xview
