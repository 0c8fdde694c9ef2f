#include "apsim/optics.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "apsim/error.hpp"

namespace apsim {

namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << what << " must be positive and finite (got " << value << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

void CameraModel::validate() const {
  require_positive(focal_length_mm, "focal_length_mm");
  require_positive(pixel_pitch_um, "pixel_pitch_um");
  if (sensor_width <= 0 || sensor_height <= 0) {
    throw DomainError("sensor resolution must be positive");
  }
}

CameraModel CameraModel::reference() { return CameraModel{}; }

void ApertureSpec::validate() const {
  if (name.empty()) throw DomainError("aperture name is empty");
  require_positive(area_mm2, "aperture area");
  if (effective_diameter_mm) require_positive(*effective_diameter_mm, "effective diameter");
}

void validate_aperture_set(std::span<const ApertureSpec> apertures) {
  std::set<std::string> names;
  int references = 0;
  for (const auto& a : apertures) {
    a.validate();
    if (!names.insert(a.name).second) {
      throw DomainError("duplicate aperture name '" + a.name + "'");
    }
    if (a.is_reference) ++references;
  }
  if (references > 1) throw DomainError("more than one reference aperture");
}

const ApertureSpec* find_reference(std::span<const ApertureSpec> apertures) {
  for (const auto& a : apertures) {
    if (a.is_reference) return &a;
  }
  return nullptr;
}

void ObjectClassGeometry::validate() const {
  require_positive(physical_width_m, "physical_width_m");
}

double PowerLawFit::evaluate(double x) const { return scale_a * std::pow(x, exponent_b); }

double horizontal_fov_rad(const CameraModel& camera) {
  camera.validate();
  const double half_extent_mm = 0.5 * camera.sensor_width * camera.pixel_pitch_um * 1e-3;
  return 2.0 * std::atan(half_extent_mm / camera.focal_length_mm);
}

double horizontal_fov_deg(const CameraModel& camera) {
  return horizontal_fov_rad(camera) * 180.0 / std::numbers::pi;
}

double f_number(double focal_length_mm, double diameter_mm) {
  require_positive(focal_length_mm, "focal length");
  require_positive(diameter_mm, "aperture diameter");
  return focal_length_mm / diameter_mm;
}

double effective_f_number(const ApertureSpec& aperture, const ApertureSpec& reference,
                          double reference_f_number) {
  require_positive(aperture.area_mm2, "aperture area");
  require_positive(reference.area_mm2, "reference area");
  require_positive(reference_f_number, "reference f-number");
  return reference_f_number * std::sqrt(reference.area_mm2 / aperture.area_mm2);
}

double gain_factor_db(const ApertureSpec& aperture, const ApertureSpec& reference,
                      GainConvention convention) {
  require_positive(aperture.area_mm2, "aperture area");
  require_positive(reference.area_mm2, "reference area");
  const double area_ratio = reference.area_mm2 / aperture.area_mm2;
  switch (convention) {
    case GainConvention::kAreaRatio:
      return 20.0 * std::log10(area_ratio);
    case GainConvention::kLiteralFNumberRatio:
      // f-number ratio is sqrt(area ratio)
      return 10.0 * std::log10(area_ratio);
  }
  return 0.0;
}

double numerical_aperture(double f_number) {
  require_positive(f_number, "f-number");
  return 1.0 / (2.0 * f_number);
}

double min_spot_size_um(double wavelength_um, double f_number) {
  require_positive(wavelength_um, "wavelength");
  require_positive(f_number, "f-number");
  return 4.0 * 1.22 * wavelength_um * f_number;
}

int bbox_width_px(const ObjectClassGeometry& object, double distance_m,
                  const CameraModel& camera) {
  object.validate();
  require_positive(distance_m, "distance");
  const double subtended = 2.0 * std::atan(object.physical_width_m / (2.0 * distance_m));
  const double width = subtended / horizontal_fov_rad(camera) * camera.sensor_width;
  return static_cast<int>(std::ceil(width));
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 2) throw FitError("power-law fit needs at least 2 samples");
  double sx = 0, sy = 0;
  for (const auto& [x, y] : samples) {
    if (!(x > 0.0) || !(y > 0.0)) throw FitError("power-law samples must be positive");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double n = static_cast<double>(samples.size());
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : samples) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (sxx == 0.0) throw FitError("power-law fit needs at least 2 distinct abscissae");

  PowerLawFit fit;
  fit.exponent_b = sxy / sxx;
  const double log_a = my - fit.exponent_b * mx;
  fit.scale_a = std::exp(log_a);
  double ss = 0;
  for (const auto& [x, y] : samples) {
    const double r = std::log(y) - (log_a + fit.exponent_b * std::log(x));
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

double distance_for_width(const PowerLawFit& fit, double width_px) {
  require_positive(width_px, "bbox width");
  require_positive(fit.scale_a, "fit scale");
  if (fit.exponent_b == 0.0 || !std::isfinite(fit.exponent_b)) {
    throw DomainError("power-law exponent must be non-zero");
  }
  return std::pow(width_px / fit.scale_a, 1.0 / fit.exponent_b);
}

std::vector<std::pair<double, double>> sample_bbox_widths(
    const ObjectClassGeometry& object, const CameraModel& camera,
    std::span<const double> distances_m) {
  std::vector<std::pair<double, double>> out;
  out.reserve(distances_m.size());
  for (double d : distances_m) {
    out.emplace_back(d, static_cast<double>(bbox_width_px(object, d, camera)));
  }
  return out;
}

}  // namespace apsim
