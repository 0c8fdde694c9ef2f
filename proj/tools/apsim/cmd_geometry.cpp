#include <iostream>
#include <memory>

#include "apsim/psf_bank.hpp"
#include "common.hpp"

namespace apsim::cli {

namespace {

struct GeometryOptions {
  std::string object;
  std::optional<double> width_m;
  std::optional<double> focal_length_mm;
  std::optional<double> pixel_pitch_um;
  std::optional<int> sensor_width;
  std::vector<double> distances_m;
  std::vector<double> widths_px;
  double wavelength_um = 0.55;
  bool apertures = false;
};

int run_geometry(const GlobalOptions& global, const GeometryOptions& opt) {
  if (opt.object.empty() && !opt.width_m) {
    throw UsageError("geometry needs --object or --width-m");
  }
  OpticsProfile profile = load_config(global);
  if (opt.focal_length_mm) profile.camera.focal_length_mm = *opt.focal_length_mm;
  if (opt.pixel_pitch_um) profile.camera.pixel_pitch_um = *opt.pixel_pitch_um;
  if (opt.sensor_width) profile.camera.sensor_width = *opt.sensor_width;
  profile.camera.validate();

  ObjectClassGeometry object;
  if (opt.width_m) {
    object.class_name = opt.object.empty() ? "custom" : opt.object;
    object.physical_width_m = *opt.width_m;
  } else {
    object = profile.object(opt.object);
  }
  object.validate();

  const CameraModel& cam = profile.camera;
  std::cout << "camera: focal_length_mm=" << format_number(cam.focal_length_mm)
            << " pixel_pitch_um=" << format_number(cam.pixel_pitch_um)
            << " sensor=" << cam.sensor_width << "x" << cam.sensor_height << "\n";
  std::cout << "horizontal_fov_deg: " << fixed(horizontal_fov_deg(cam), 4) << "\n";
  std::cout << "object: " << object.class_name << " width_m=" << format_number(object.physical_width_m)
            << "\n";

  const auto samples = sample_bbox_widths(object, cam, DepthPlanSpec::standard().distances_m);
  const PowerLawFit fit = fit_power_law(samples);
  std::cout << "power_law: width_px = " << fixed(fit.scale_a, 4) << " * d^" << fixed(fit.exponent_b, 6)
            << " (rms " << fixed(fit.residual_rms, 4) << ", d = 10..100 m)\n";

  for (double d : opt.distances_m) {
    std::cout << "distance_m " << format_number(d) << ": bbox_width_px "
              << bbox_width_px(object, d, cam) << "\n";
  }
  std::vector<double> widths = opt.widths_px;
  if (opt.distances_m.empty() && widths.empty()) widths = {23, 32, 96};
  for (double w : widths) {
    std::cout << "bbox_width_px " << format_number(w) << ": distance_m "
              << fixed(distance_for_width(fit, w), 2) << "\n";
  }

  if (opt.apertures) {
    std::cout << "aperture area_mm2 f_number gain_db numerical_aperture spot_um\n";
    for (const auto& a : profile.apertures) {
      const double fn = profile.f_number_of(a.name);
      std::cout << a.name << " " << format_number(a.area_mm2) << " " << fixed(fn, 4) << " "
                << fixed(profile.gain_db_of(a.name), 4) << " " << fixed(numerical_aperture(fn), 6)
                << " " << fixed(min_spot_size_um(opt.wavelength_um, fn), 4) << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

void add_geometry_command(CLI::App& app, const GlobalOptions& global, std::vector<Command>& out) {
  auto opt = std::make_shared<GeometryOptions>();
  CLI::App* sub = app.add_subcommand("geometry", "Field of view, bbox width and distance printout");
  sub->add_option("--object", opt->object, "Object class from the profile (e.g. speed_sign)");
  sub->add_option("--width-m", opt->width_m, "Physical object width in meters")
      ->check(CLI::PositiveNumber);
  sub->add_option("--focal-length-mm", opt->focal_length_mm, "Override the camera focal length")
      ->check(CLI::PositiveNumber);
  sub->add_option("--pixel-pitch-um", opt->pixel_pitch_um, "Override the pixel pitch")
      ->check(CLI::PositiveNumber);
  sub->add_option("--sensor-width", opt->sensor_width, "Override the sensor width in pixels")
      ->check(CLI::PositiveNumber);
  sub->add_option("--distance", opt->distances_m, "Distances (m) to project; repeatable")
      ->check(CLI::PositiveNumber);
  sub->add_option("--width-px", opt->widths_px, "Bbox widths (px) to invert; repeatable")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--apertures", opt->apertures, "Also print the aperture table");
  sub->add_option("--wavelength-um", opt->wavelength_um, "Wavelength for the spot size column")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  out.push_back({sub, [&global, opt] { return run_geometry(global, *opt); }});
}

}  // namespace apsim::cli
