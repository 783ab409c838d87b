#include "xview/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xview/errors.hpp"

namespace xview {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json params_to_json(const ReportParams& p) {
  ordered_json j;
  j["lambda"] = p.lambda;
  j["lambda1"] = p.lambda1;
  j["sparsity"] = p.sparsity;
  j["codebook_size"] = p.codebook_size;
  j["widths"] = p.widths;
  j["seed"] = p.seed;
  j["ftp_levels"] = p.ftp_levels;
  j["ftp_coeffs"] = p.ftp_coeffs;
  return j;
}

[[noreturn]] void parse_fail(const std::string& source, const std::string& what) {
  throw IoError(source + ": " + what);
}

}  // namespace

std::string report_to_string(const EvaluationReport& report) {
  ordered_json j;
  j["protocol"] = report.protocol;
  j["parameters"] = params_to_json(report.params);
  j["combinations"] = ordered_json::array();
  for (const auto& c : report.combinations) {
    ordered_json rec;
    rec["train_views"] = c.train_views;
    rec["test_view"] = c.test_view;
    rec["modality"] = c.modality;
    rec["accuracy"] = c.accuracy;
    rec["confusion"] = c.confusion;
    j["combinations"].push_back(std::move(rec));
  }
  j["modality_means"] = ordered_json::object();
  for (const auto& [name, mean] : report.modality_means) j["modality_means"][name] = mean;
  if (report.fused_minus_best_single)
    j["fused_minus_best_single"] = *report.fused_minus_best_single;
  return j.dump(2) + "\n";
}

void write_report(const EvaluationReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << report_to_string(report);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

EvaluationReport report_from_string(const std::string& text, const std::string& source) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    parse_fail(source, std::string("invalid JSON: ") + e.what());
  }

  EvaluationReport r;
  try {
    r.protocol = j.at("protocol").get<std::string>();
    const auto& p = j.at("parameters");
    r.params.lambda = p.at("lambda").get<double>();
    r.params.lambda1 = p.at("lambda1").get<double>();
    r.params.sparsity = p.at("sparsity").get<int>();
    r.params.codebook_size = p.at("codebook_size").get<int>();
    r.params.widths = p.at("widths").get<std::array<int, 4>>();
    r.params.seed = p.at("seed").get<std::uint64_t>();
    r.params.ftp_levels = p.at("ftp_levels").get<int>();
    r.params.ftp_coeffs = p.at("ftp_coeffs").get<int>();
    for (const auto& c : j.at("combinations")) {
      SplitRecord rec;
      rec.train_views = c.at("train_views").get<std::vector<int>>();
      rec.test_view = c.at("test_view").get<int>();
      rec.modality = c.at("modality").get<std::string>();
      rec.accuracy = c.at("accuracy").get<double>();
      rec.confusion = c.at("confusion").get<std::vector<std::vector<int>>>();
      r.combinations.push_back(std::move(rec));
    }
    for (const auto& [key, value] : j.at("modality_means").items())
      r.modality_means.emplace_back(key, value.get<double>());
    if (j.contains("fused_minus_best_single"))
      r.fused_minus_best_single = j["fused_minus_best_single"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(source, std::string("malformed report: ") + e.what());
  }

  for (const auto& c : r.combinations) {
    if (c.accuracy < 0.0 || c.accuracy > 1.0)
      parse_fail(source, "accuracy outside [0, 1]");
    long total = 0, diag = 0;
    const auto classes = c.confusion.size();
    for (std::size_t i = 0; i < classes; ++i) {
      if (c.confusion[i].size() != classes) parse_fail(source, "confusion matrix not square");
      for (std::size_t k = 0; k < classes; ++k) {
        if (c.confusion[i][k] < 0) parse_fail(source, "negative confusion count");
        total += c.confusion[i][k];
        if (i == k) diag += c.confusion[i][k];
      }
    }
    if (total > 0 && std::abs(c.accuracy - static_cast<double>(diag) / total) > 1e-12)
      parse_fail(source, "accuracy does not match the confusion matrix");
  }
  return r;
}

EvaluationReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return report_from_string(ss.str(), path.string());
}

}  // namespace xview
