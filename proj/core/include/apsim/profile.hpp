#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "apsim/optics.hpp"

namespace apsim {

// Camera, aperture set and object geometry as one editable JSON document.
// Keys missing from a file fall back to the built-in reference profile.
struct OpticsProfile {
  CameraModel camera;
  // Nominal f-number of the reference aperture (16 mm / 9 mm rounded to 1.8).
  double reference_f_number = 1.8;
  std::vector<ApertureSpec> apertures;
  std::vector<ObjectClassGeometry> objects;

  static OpticsProfile reference();

  void validate() const;
  const ApertureSpec& aperture(const std::string& name) const;
  const ApertureSpec& reference_aperture() const;
  const ObjectClassGeometry& object(const std::string& class_name) const;

  // Effective f-number and area-convention gain of a named aperture.
  double f_number_of(const std::string& aperture_name) const;
  double gain_db_of(const std::string& aperture_name,
                    GainConvention convention = GainConvention::kAreaRatio) const;
};

OpticsProfile parse_profile(const std::string& json_text);
OpticsProfile load_profile(const std::filesystem::path& path);
std::string profile_to_json(const OpticsProfile& profile);

}  // namespace apsim
