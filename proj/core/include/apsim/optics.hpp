#pragma once

// Optical photometry and projective geometry for a fixed-focus automotive
// camera: field of view, f-numbers, aperture gain compensation, numerical
// aperture, diffraction spot size and the bbox-width <-> distance mapping.
//
// Aperture gain is 20*log10 of the light-collecting area ratio by default, so
// digital numbers scale with collected light. kLiteralFNumberRatio uses
// 20*log10 of the f-number ratio instead.

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace apsim {

struct CameraModel {
  double focal_length_mm = 16.0;
  double pixel_pitch_um = 3.45;
  int sensor_width = 2048;
  int sensor_height = 1536;

  // Throws DomainError unless every field is strictly positive.
  void validate() const;

  // DFK37BUX252-like reference camera with a 16 mm lens.
  static CameraModel reference();
};

struct ApertureSpec {
  std::string name;
  double area_mm2 = 0.0;
  std::optional<double> effective_diameter_mm;
  bool is_reference = false;

  void validate() const;
};

// At most one aperture may be flagged as the reference; names must be unique.
void validate_aperture_set(std::span<const ApertureSpec> apertures);

// Returns the aperture flagged is_reference, or nullptr when none is.
const ApertureSpec* find_reference(std::span<const ApertureSpec> apertures);

struct ObjectClassGeometry {
  std::string class_name;
  double physical_width_m = 0.0;

  void validate() const;
};

// width = scale_a * distance^exponent_b
struct PowerLawFit {
  double scale_a = 0.0;
  double exponent_b = 0.0;
  double residual_rms = 0.0;

  double evaluate(double x) const;
};

enum class GainConvention { kAreaRatio, kLiteralFNumberRatio };

double horizontal_fov_rad(const CameraModel& camera);
double horizontal_fov_deg(const CameraModel& camera);

double f_number(double focal_length_mm, double diameter_mm);

// reference_f_number * sqrt(reference.area / aperture.area)
double effective_f_number(const ApertureSpec& aperture, const ApertureSpec& reference,
                          double reference_f_number);

// Compensation gain that restores the reference aperture's intensity.
double gain_factor_db(const ApertureSpec& aperture, const ApertureSpec& reference,
                      GainConvention convention = GainConvention::kAreaRatio);

double numerical_aperture(double f_number);

// Diffraction-limited spot spanning four pixels: 4 * 1.22 * lambda * f/#.
double min_spot_size_um(double wavelength_um, double f_number);

// Projected bbox width (ceil) of an object of the given physical width.
int bbox_width_px(const ObjectClassGeometry& object, double distance_m,
                  const CameraModel& camera);

// Least squares on (ln distance, ln width).
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> samples);

double distance_for_width(const PowerLawFit& fit, double width_px);

// Samples bbox_width_px over the given distances.
std::vector<std::pair<double, double>> sample_bbox_widths(
    const ObjectClassGeometry& object, const CameraModel& camera,
    std::span<const double> distances_m);

}  // namespace apsim
