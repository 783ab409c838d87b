#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace xview {

/// One evaluation video: a depth feature sequence plus a trajectory set.
struct SampleRecord {
  std::string id;
  int class_index = 0;
  int view_index = 0;
  std::string depth_path;  // relative to the manifest location
  std::string traj_path;
};

/// One auxiliary-corpus video used only to fit the codebook and train the
/// view-transfer network; depth is not needed there. Record (c, v, j)
/// pairs with record (c, 0, j) of the same corpus.
struct PretrainRecord {
  std::string id;
  int class_index = 0;
  int view_index = 0;
  std::string traj_path;
};

struct DatasetManifest {
  int class_count = 0;
  std::vector<int> views;
  std::vector<SampleRecord> samples;
  std::vector<PretrainRecord> pretrain;
  std::filesystem::path base_dir;  // set on load; not serialized

  std::filesystem::path resolve(const std::string& relative) const { return base_dir / relative; }
};

/// Loads and eagerly validates a manifest: class indices in range, views
/// consistent, sample ids unique, every referenced file present.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Serializes with a fixed field order; identical manifests produce
/// byte-identical files.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

std::string manifest_to_string(const DatasetManifest& manifest);

}  // namespace xview
