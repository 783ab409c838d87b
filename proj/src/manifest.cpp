#include "xview/manifest.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "xview/errors.hpp"

namespace xview {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void load_fail(const std::filesystem::path& path, const std::string& what) {
  throw IoError(path.string() + ": " + what);
}

int require_int(const ordered_json& j, const char* key, const std::filesystem::path& path) {
  if (!j.contains(key) || !j[key].is_number_integer())
    load_fail(path, std::string("missing or non-integer field '") + key + "'");
  return j[key].get<int>();
}

std::string require_string(const ordered_json& j, const char* key,
                           const std::filesystem::path& path) {
  if (!j.contains(key) || !j[key].is_string())
    load_fail(path, std::string("missing or non-string field '") + key + "'");
  return j[key].get<std::string>();
}

void validate_record(const std::filesystem::path& path, const DatasetManifest& m,
                     const std::string& id, int class_index, int view_index,
                     std::set<std::string>& seen_ids) {
  if (!seen_ids.insert(id).second) load_fail(path, "duplicate sample id '" + id + "'");
  if (class_index < 0 || class_index >= m.class_count)
    load_fail(path, "sample '" + id + "': class index " + std::to_string(class_index) +
                        " outside [0, " + std::to_string(m.class_count) + ")");
  bool known_view = false;
  for (int v : m.views) known_view = known_view || v == view_index;
  if (!known_view)
    load_fail(path, "sample '" + id + "': view " + std::to_string(view_index) +
                        " not in the manifest view list");
}

void require_file(const std::filesystem::path& manifest_path, const DatasetManifest& m,
                  const std::string& id, const std::string& rel) {
  if (!std::filesystem::exists(m.resolve(rel)))
    load_fail(manifest_path, "sample '" + id + "': missing file " + rel);
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    load_fail(path, std::string("invalid JSON: ") + e.what());
  }

  DatasetManifest m;
  m.base_dir = path.parent_path();
  m.class_count = require_int(j, "class_count", path);
  if (m.class_count < 1) load_fail(path, "class_count must be >= 1");
  if (!j.contains("views") || !j["views"].is_array() || j["views"].empty())
    load_fail(path, "missing or empty 'views'");
  for (const auto& v : j["views"]) {
    if (!v.is_number_integer()) load_fail(path, "non-integer view entry");
    m.views.push_back(v.get<int>());
  }
  if (!j.contains("samples") || !j["samples"].is_array())
    load_fail(path, "missing 'samples' array");

  std::set<std::string> sample_ids;
  for (const auto& s : j["samples"]) {
    SampleRecord rec;
    rec.id = require_string(s, "id", path);
    rec.class_index = require_int(s, "class", path);
    rec.view_index = require_int(s, "view", path);
    rec.depth_path = require_string(s, "depth", path);
    rec.traj_path = require_string(s, "trajectories", path);
    validate_record(path, m, rec.id, rec.class_index, rec.view_index, sample_ids);
    require_file(path, m, rec.id, rec.depth_path);
    require_file(path, m, rec.id, rec.traj_path);
    m.samples.push_back(std::move(rec));
  }

  if (j.contains("pretrain")) {
    if (!j["pretrain"].is_array()) load_fail(path, "'pretrain' must be an array");
    std::set<std::string> pre_ids;
    for (const auto& s : j["pretrain"]) {
      PretrainRecord rec;
      rec.id = require_string(s, "id", path);
      rec.class_index = require_int(s, "class", path);
      rec.view_index = require_int(s, "view", path);
      rec.traj_path = require_string(s, "trajectories", path);
      validate_record(path, m, rec.id, rec.class_index, rec.view_index, pre_ids);
      require_file(path, m, rec.id, rec.traj_path);
      m.pretrain.push_back(std::move(rec));
    }
  }
  return m;
}

std::string manifest_to_string(const DatasetManifest& manifest) {
  ordered_json j;
  j["class_count"] = manifest.class_count;
  j["views"] = manifest.views;
  j["samples"] = ordered_json::array();
  for (const auto& s : manifest.samples) {
    ordered_json rec;
    rec["id"] = s.id;
    rec["class"] = s.class_index;
    rec["view"] = s.view_index;
    rec["depth"] = s.depth_path;
    rec["trajectories"] = s.traj_path;
    j["samples"].push_back(std::move(rec));
  }
  if (!manifest.pretrain.empty()) {
    j["pretrain"] = ordered_json::array();
    for (const auto& s : manifest.pretrain) {
      ordered_json rec;
      rec["id"] = s.id;
      rec["class"] = s.class_index;
      rec["view"] = s.view_index;
      rec["trajectories"] = s.traj_path;
      j["pretrain"].push_back(std::move(rec));
    }
  }
  return j.dump(2) + "\n";
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << manifest_to_string(manifest);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace xview
