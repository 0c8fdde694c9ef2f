#include "apsim/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "apsim/png_io.hpp"

namespace apsim {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* manifest_reason(ManifestError::Reason r) {
  switch (r) {
    case ManifestError::Reason::kMissingFile: return "manifest_missing_file";
    case ManifestError::Reason::kSchema: return "manifest_schema";
    case ManifestError::Reason::kDimensionMismatch: return "manifest_dimension_mismatch";
    case ManifestError::Reason::kUnknownClass: return "manifest_unknown_class";
  }
  return "manifest";
}

}  // namespace

std::string_view group_name(ClassGroup group) {
  switch (group) {
    case ClassGroup::kTrafficSign: return "traffic_sign";
    case ClassGroup::kSpeedSign: return "speed_sign";
    case ClassGroup::kTrafficLight: return "traffic_light";
  }
  return "unknown";
}

ClassGroup parse_group(std::string_view text) {
  if (text == "traffic_sign") return ClassGroup::kTrafficSign;
  if (text == "speed_sign") return ClassGroup::kSpeedSign;
  if (text == "traffic_light") return ClassGroup::kTrafficLight;
  throw LookupError("unknown class group '" + std::string(text) + "'");
}

ClassCatalog::ClassCatalog(std::vector<ClassEntry> entries) : entries_(std::move(entries)) {
  std::set<int> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.class_id).second) {
      throw ConfigError("duplicate class id " + std::to_string(e.class_id) + " in catalog");
    }
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const ClassEntry& a, const ClassEntry& b) { return a.class_id < b.class_id; });
}

ClassCatalog ClassCatalog::reference() {
  std::vector<ClassEntry> entries;
  auto add_range = [&](int lo, int hi, ClassGroup g) {
    for (int id = lo; id <= hi; ++id) {
      entries.push_back({id, std::string(group_name(g)) + "_" + std::to_string(id), g});
    }
  };
  add_range(0, 16, ClassGroup::kTrafficSign);
  add_range(17, 24, ClassGroup::kSpeedSign);
  add_range(25, 45, ClassGroup::kTrafficSign);
  add_range(46, 65, ClassGroup::kSpeedSign);
  add_range(66, 84, ClassGroup::kTrafficSign);
  add_range(85, 99, ClassGroup::kTrafficLight);
  return ClassCatalog(std::move(entries));
}

bool ClassCatalog::contains(int class_id) const {
  return std::binary_search(
      entries_.begin(), entries_.end(), ClassEntry{class_id, {}, ClassGroup::kTrafficSign},
      [](const ClassEntry& a, const ClassEntry& b) { return a.class_id < b.class_id; });
}

ClassGroup ClassCatalog::group_of(int class_id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), class_id,
                             [](const ClassEntry& e, int id) { return e.class_id < id; });
  if (it == entries_.end() || it->class_id != class_id) {
    throw LookupError("class id " + std::to_string(class_id) + " is not in the catalog");
  }
  return it->group;
}

std::vector<int> ClassCatalog::classes_in(ClassGroup group) const {
  std::vector<int> ids;
  for (const auto& e : entries_) {
    if (e.group == group) ids.push_back(e.class_id);
  }
  return ids;
}

namespace {

ClassCatalog catalog_from_json(const json& j) {
  const json& list = j.is_object() ? j.at("classes") : j;
  std::vector<ClassEntry> entries;
  for (const auto& e : list) {
    entries.push_back({e.at("id").get<int>(), e.value("name", std::string{}),
                       parse_group(e.at("group").get<std::string>())});
  }
  return ClassCatalog(std::move(entries));
}

}  // namespace

ClassCatalog parse_catalog(const std::string& json_text) {
  try {
    return catalog_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid class catalog: ") + e.what());
  }
}

ClassCatalog load_catalog(const std::filesystem::path& path) { return parse_catalog(read_text(path)); }

ManifestError::ManifestError(Reason reason, std::string record_id, const std::string& what)
    : Error(manifest_reason(reason), what), reason_(reason), record_id_(std::move(record_id)) {}

Manifest load_manifest(const std::filesystem::path& path, const ManifestLoadOptions& options) {
  using R = ManifestError::Reason;
  if (!std::filesystem::exists(path)) {
    throw ManifestError(R::kMissingFile, {}, "manifest " + path.string() + " does not exist");
  }
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ManifestError(R::kSchema, {}, std::string("manifest is not valid JSON: ") + e.what());
  }

  Manifest m;
  m.root = path.parent_path();
  double default_scale = 0.01;
  const json* records = &j;
  try {
    if (j.is_object()) {
      m.dataset_name = j.value("dataset_name", std::string{});
      default_scale = j.value("depth_scale", default_scale);
      if (auto it = j.find("class_catalog"); it != j.end()) {
        if (it->is_string()) {
          m.catalog = load_catalog(m.root / it->get<std::string>());
        } else {
          m.catalog = catalog_from_json(*it);
        }
      }
      records = &j.at("records");
    }
    if (!records->is_array()) throw ManifestError(R::kSchema, {}, "manifest records must be an array");
  } catch (const json::exception& e) {
    throw ManifestError(R::kSchema, {}, std::string("manifest schema violation: ") + e.what());
  }

  std::set<std::string> ids;
  for (const auto& r : *records) {
    SceneRecord rec;
    try {
      if (!r.is_object()) throw ManifestError(R::kSchema, {}, "manifest record must be an object");
      rec.id = r.at("id").is_string() ? r.at("id").get<std::string>()
                                      : r.at("id").dump();
      rec.relative_rgb = r.at("rgb_path").get<std::string>();
      rec.rgb_path = m.root / rec.relative_rgb;
      const std::string depth = r.value("depth_path", std::string{});
      if (!depth.empty()) rec.depth_path = m.root / depth;
      const std::string ann = r.value("annotation_path", std::string{});
      if (!ann.empty()) {
        rec.relative_annotation = ann;
        rec.annotation_path = m.root / ann;
      }
      rec.depth_scale = r.value("depth_scale", default_scale);
    } catch (const json::exception& e) {
      throw ManifestError(R::kSchema, rec.id, "record '" + rec.id + "': " + e.what());
    }
    if (rec.id.empty()) throw ManifestError(R::kSchema, {}, "record with an empty id");
    if (!ids.insert(rec.id).second) {
      throw ManifestError(R::kSchema, rec.id, "duplicate record id '" + rec.id + "'");
    }
    if (!(rec.depth_scale > 0.0)) {
      throw ManifestError(R::kSchema, rec.id, "record '" + rec.id + "' has a non-positive depth_scale");
    }

    if (options.check_files) {
      if (rec.depth_path.empty()) {
        throw ManifestError(R::kSchema, rec.id, "record '" + rec.id + "' has no depth_path");
      }
      for (const auto* p : {&rec.rgb_path, &rec.depth_path}) {
        if (!std::filesystem::exists(*p)) {
          throw ManifestError(R::kMissingFile, rec.id,
                              "record '" + rec.id + "': missing file " + p->string());
        }
      }
      const PngInfo rgb = read_png_info(rec.rgb_path);
      const PngInfo dep = read_png_info(rec.depth_path);
      if (rgb.width != dep.width || rgb.height != dep.height) {
        throw ManifestError(R::kDimensionMismatch, rec.id,
                            "record '" + rec.id + "': rgb is " + std::to_string(rgb.width) + "x" +
                                std::to_string(rgb.height) + ", depth is " +
                                std::to_string(dep.width) + "x" + std::to_string(dep.height));
      }
      if (!rec.annotation_path.empty()) {
        if (!std::filesystem::exists(rec.annotation_path)) {
          throw ManifestError(R::kMissingFile, rec.id,
                              "record '" + rec.id + "': missing file " +
                                  rec.annotation_path.string());
        }
        std::vector<GroundTruth> gts;
        try {
          gts = load_coco_ground_truth(rec.annotation_path);
        } catch (const Error& e) {
          throw ManifestError(R::kSchema, rec.id, "record '" + rec.id + "': " + e.what());
        }
        for (const auto& gt : gts) {
          if (!m.catalog.contains(gt.class_id)) {
            throw ManifestError(R::kUnknownClass, rec.id,
                                "record '" + rec.id + "': class id " +
                                    std::to_string(gt.class_id) + " is not in the catalog");
          }
        }
      }
    }
    m.records.push_back(std::move(rec));
  }
  return m;
}

ClassGroup group_of_class(const Manifest& manifest, int class_id) {
  return manifest.catalog.group_of(class_id);
}

std::string_view size_class_name(SizeClass size) {
  switch (size) {
    case SizeClass::kTiny: return "tiny";
    case SizeClass::kSmall: return "small";
    case SizeClass::kMedium: return "medium";
    case SizeClass::kLarge: return "large";
  }
  return "unknown";
}

SizeClass parse_size_class(std::string_view text) {
  if (text == "tiny") return SizeClass::kTiny;
  if (text == "small") return SizeClass::kSmall;
  if (text == "medium") return SizeClass::kMedium;
  if (text == "large") return SizeClass::kLarge;
  throw LookupError("unknown size class '" + std::string(text) + "'");
}

void SizeClassification::validate() const {
  if (!(tiny > 0.0 && tiny < small && small < medium)) {
    throw ConfigError("size thresholds must be positive and strictly increasing");
  }
}

SizeClass classify_bbox(const BBox& bbox, const SizeClassification& rules) {
  if (!bbox.valid()) throw DomainError("cannot classify a degenerate box");
  rules.validate();
  const double area = bbox.area();
  if (area <= rules.tiny * rules.tiny) return SizeClass::kTiny;
  if (area <= rules.small * rules.small) return SizeClass::kSmall;
  if (area <= rules.medium * rules.medium) return SizeClass::kMedium;
  return SizeClass::kLarge;
}

namespace {

BBox bbox_from_json(const json& b) {
  if (!b.is_array() || b.size() != 4) throw InputError("bbox must be [x, y, w, h]");
  BBox box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
  if (!box.valid()) throw InputError("bbox has non-positive width or height");
  return box;
}

long long image_id_of(const json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_string()) return static_cast<long long>(std::hash<std::string>{}(v.get<std::string>()));
  throw InputError("image_id must be an integer or string");
}

}  // namespace

std::vector<GroundTruth> parse_coco_ground_truth(const std::string& json_text) {
  std::vector<GroundTruth> out;
  try {
    const json j = json::parse(json_text);
    for (const auto& a : j.at("annotations")) {
      GroundTruth gt;
      gt.image_id = a.contains("image_id") ? image_id_of(a["image_id"]) : 0;
      gt.class_id = a.at("category_id").get<int>();
      gt.bbox = bbox_from_json(a.at("bbox"));
      out.push_back(gt);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid COCO ground truth: ") + e.what());
  }
  return out;
}

std::vector<GroundTruth> load_coco_ground_truth(const std::filesystem::path& path) {
  try {
    return parse_coco_ground_truth(read_text(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<Detection> parse_coco_detections(const std::string& json_text) {
  std::vector<Detection> out;
  try {
    const json j = json::parse(json_text);
    const json& list = j.is_object() ? j.at("detections") : j;
    for (const auto& d : list) {
      Detection det;
      det.image_id = d.contains("image_id") ? image_id_of(d["image_id"]) : 0;
      det.class_id = d.at("category_id").get<int>();
      det.bbox = bbox_from_json(d.at("bbox"));
      det.confidence = d.at("score").get<double>();
      if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) {
        throw InputError("detection score outside [0, 1]");
      }
      out.push_back(det);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid COCO detections: ") + e.what());
  }
  return out;
}

std::vector<Detection> load_coco_detections(const std::filesystem::path& path) {
  try {
    return parse_coco_detections(read_text(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace apsim
