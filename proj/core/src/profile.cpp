#include "apsim/profile.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "apsim/error.hpp"

namespace apsim {

using nlohmann::json;

OpticsProfile OpticsProfile::reference() {
  OpticsProfile p;
  p.camera = CameraModel::reference();
  p.reference_f_number = 1.8;
  p.apertures = {
      {"circular", 63.6, 9.0, true},
      {"plus", 35.6, std::nullopt, false},
      {"vertical_slit", 17.6, std::nullopt, false},
      {"horizontal_slit", 17.6, std::nullopt, false},
  };
  p.objects = {
      {"traffic_light", 0.305},
      {"traffic_sign", 0.62},
      {"speed_sign", 0.25},
  };
  return p;
}

void OpticsProfile::validate() const {
  camera.validate();
  if (!(reference_f_number > 0.0)) throw ConfigError("reference_f_number must be positive");
  validate_aperture_set(apertures);
  if (!apertures.empty() && find_reference(apertures) == nullptr) {
    throw ConfigError("aperture set has no reference aperture");
  }
  for (const auto& o : objects) o.validate();
}

const ApertureSpec& OpticsProfile::aperture(const std::string& name) const {
  for (const auto& a : apertures) {
    if (a.name == name) return a;
  }
  throw LookupError("unknown aperture '" + name + "'");
}

const ApertureSpec& OpticsProfile::reference_aperture() const {
  if (const auto* ref = find_reference(apertures)) return *ref;
  throw LookupError("profile has no reference aperture");
}

const ObjectClassGeometry& OpticsProfile::object(const std::string& class_name) const {
  for (const auto& o : objects) {
    if (o.class_name == class_name) return o;
  }
  throw LookupError("unknown object class '" + class_name + "'");
}

double OpticsProfile::f_number_of(const std::string& aperture_name) const {
  return effective_f_number(aperture(aperture_name), reference_aperture(), reference_f_number);
}

double OpticsProfile::gain_db_of(const std::string& aperture_name,
                                 GainConvention convention) const {
  return gain_factor_db(aperture(aperture_name), reference_aperture(), convention);
}

OpticsProfile parse_profile(const std::string& json_text) {
  OpticsProfile p = OpticsProfile::reference();
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("profile is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("profile root must be an object");

  try {
    if (auto it = j.find("camera"); it != j.end()) {
      const auto& c = *it;
      p.camera.focal_length_mm = c.value("focal_length_mm", p.camera.focal_length_mm);
      p.camera.pixel_pitch_um = c.value("pixel_pitch_um", p.camera.pixel_pitch_um);
      p.camera.sensor_width = c.value("sensor_width", p.camera.sensor_width);
      p.camera.sensor_height = c.value("sensor_height", p.camera.sensor_height);
    }
    p.reference_f_number = j.value("reference_f_number", p.reference_f_number);
    if (auto it = j.find("apertures"); it != j.end()) {
      p.apertures.clear();
      for (const auto& a : *it) {
        ApertureSpec spec;
        spec.name = a.at("name").get<std::string>();
        spec.area_mm2 = a.at("area_mm2").get<double>();
        if (a.contains("effective_diameter_mm")) {
          spec.effective_diameter_mm = a["effective_diameter_mm"].get<double>();
        }
        spec.is_reference = a.value("reference", false);
        p.apertures.push_back(std::move(spec));
      }
    }
    if (auto it = j.find("objects"); it != j.end()) {
      p.objects.clear();
      for (const auto& o : *it) {
        p.objects.push_back(
            {o.at("class_name").get<std::string>(), o.at("physical_width_m").get<double>()});
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("profile schema violation: ") + e.what());
  }
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid profile: ") + e.what());
  }
  return p;
}

OpticsProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_profile(ss.str());
}

std::string profile_to_json(const OpticsProfile& p) {
  json j;
  j["camera"] = {{"focal_length_mm", p.camera.focal_length_mm},
                 {"pixel_pitch_um", p.camera.pixel_pitch_um},
                 {"sensor_width", p.camera.sensor_width},
                 {"sensor_height", p.camera.sensor_height}};
  j["reference_f_number"] = p.reference_f_number;
  j["apertures"] = json::array();
  for (const auto& a : p.apertures) {
    json ja = {{"name", a.name}, {"area_mm2", a.area_mm2}};
    if (a.effective_diameter_mm) ja["effective_diameter_mm"] = *a.effective_diameter_mm;
    if (a.is_reference) ja["reference"] = true;
    j["apertures"].push_back(std::move(ja));
  }
  j["objects"] = json::array();
  for (const auto& o : p.objects) {
    j["objects"].push_back({{"class_name", o.class_name}, {"physical_width_m", o.physical_width_m}});
  }
  return j.dump(2) + "\n";
}

}  // namespace apsim
