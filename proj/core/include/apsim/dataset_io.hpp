#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apsim/detection_stats.hpp"
#include "apsim/error.hpp"

namespace apsim {

enum class ClassGroup { kTrafficSign, kSpeedSign, kTrafficLight };

std::string_view group_name(ClassGroup group);
ClassGroup parse_group(std::string_view text);

struct ClassEntry {
  int class_id = 0;
  std::string name;
  ClassGroup group = ClassGroup::kTrafficSign;

  bool operator==(const ClassEntry&) const = default;
};

class ClassCatalog {
 public:
  ClassCatalog() = default;
  explicit ClassCatalog(std::vector<ClassEntry> entries);

  // 100 classes: traffic signs 0-16, 25-45, 66-84 (57); speed signs 17-24,
  // 46-65 (28); traffic lights 85-99 (15).
  static ClassCatalog reference();

  const std::vector<ClassEntry>& entries() const { return entries_; }
  bool contains(int class_id) const;
  ClassGroup group_of(int class_id) const;
  std::vector<int> classes_in(ClassGroup group) const;

  bool operator==(const ClassCatalog&) const = default;

 private:
  std::vector<ClassEntry> entries_;
};

ClassCatalog parse_catalog(const std::string& json_text);
ClassCatalog load_catalog(const std::filesystem::path& path);

struct SceneRecord {
  std::string id;
  std::filesystem::path rgb_path;
  std::filesystem::path depth_path;
  std::filesystem::path annotation_path;
  double depth_scale = 0.01;
  // Record path relative to the manifest directory, used for output layout.
  std::filesystem::path relative_rgb;
  std::filesystem::path relative_annotation;

  bool operator==(const SceneRecord&) const = default;
};

struct Manifest {
  std::string dataset_name;
  std::filesystem::path root;
  std::vector<SceneRecord> records;
  ClassCatalog catalog = ClassCatalog::reference();

  bool operator==(const Manifest&) const = default;
};

class ManifestError : public Error {
 public:
  enum class Reason { kMissingFile, kSchema, kDimensionMismatch, kUnknownClass };
  ManifestError(Reason reason, std::string record_id, const std::string& what);
  Reason reason() const { return reason_; }
  const std::string& record_id() const { return record_id_; }

 private:
  Reason reason_;
  std::string record_id_;
};

struct ManifestLoadOptions {
  // Check referenced files for existence, PNG dimension agreement and
  // annotation class ids.
  bool check_files = true;
};

// Accepts either a JSON array of records or an object with "records" and the
// optional "dataset_name", "depth_scale" and "class_catalog" (inline array or
// path). Record paths are relative to the manifest's directory.
Manifest load_manifest(const std::filesystem::path& path, const ManifestLoadOptions& options = {});

ClassGroup group_of_class(const Manifest& manifest, int class_id);

enum class SizeClass { kTiny, kSmall, kMedium, kLarge };

std::string_view size_class_name(SizeClass size);
SizeClass parse_size_class(std::string_view text);

// Side lengths; boxes are compared by area against side^2, inclusive.
struct SizeClassification {
  double tiny = 23;
  double small = 32;
  double medium = 96;

  void validate() const;
};

SizeClass classify_bbox(const BBox& bbox, const SizeClassification& rules = {});

// ---- COCO-style annotation files ----------------------------------------

// {"images": [...], "annotations": [{"image_id", "category_id", "bbox"}], ...}
std::vector<GroundTruth> load_coco_ground_truth(const std::filesystem::path& path);
std::vector<GroundTruth> parse_coco_ground_truth(const std::string& json_text);

// Either a bare COCO results array [{"image_id", "category_id", "bbox",
// "score"}] or an object with that array under "detections".
std::vector<Detection> load_coco_detections(const std::filesystem::path& path);
std::vector<Detection> parse_coco_detections(const std::string& json_text);

}  // namespace apsim
