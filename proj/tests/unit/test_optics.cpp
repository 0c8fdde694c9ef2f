#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "apsim/error.hpp"
#include "apsim/optics.hpp"
#include "apsim/psf_bank.hpp"

using namespace apsim;

namespace {

ApertureSpec aperture(const char* name, double area, bool ref = false) {
  ApertureSpec a;
  a.name = name;
  a.area_mm2 = area;
  a.is_reference = ref;
  return a;
}

const ApertureSpec kCircular = aperture("circular", 63.6, true);
const ApertureSpec kPlus = aperture("plus", 35.6);
const ApertureSpec kSlit = aperture("vertical_slit", 17.6);

}  // namespace

TEST(HorizontalFov, ReferenceCamera) {
  EXPECT_NEAR(horizontal_fov_deg(CameraModel::reference()), 24.9, 0.05);
  EXPECT_NEAR(horizontal_fov_deg(CameraModel::reference()), 24.9022635, 1e-6);
}

TEST(HorizontalFov, ShortFocalLength) {
  CameraModel cam = CameraModel::reference();
  cam.focal_length_mm = 8.0;
  // 2 * atan(3.5328 / 8) in degrees.
  EXPECT_NEAR(horizontal_fov_deg(cam), 2.0 * std::atan(3.5328 / 8.0) * 180.0 / M_PI, 1e-9);
  EXPECT_NEAR(horizontal_fov_deg(cam), 47.6525, 1e-3);
}

TEST(HorizontalFov, VanishingPitch) {
  CameraModel cam = CameraModel::reference();
  cam.pixel_pitch_um = 1e-12;
  EXPECT_NEAR(horizontal_fov_deg(cam), 0.0, 1e-9);
}

TEST(HorizontalFov, MonotoneInWidthAndFocalLength) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> f(2.0, 100.0);
  std::uniform_int_distribution<int> w(16, 8000);
  for (int i = 0; i < 200; ++i) {
    CameraModel a = CameraModel::reference();
    a.focal_length_mm = f(rng);
    a.sensor_width = w(rng);
    CameraModel wider = a;
    wider.sensor_width += 1;
    CameraModel longer = a;
    longer.focal_length_mm *= 1.01;
    EXPECT_LT(horizontal_fov_deg(a), horizontal_fov_deg(wider));
    EXPECT_GT(horizontal_fov_deg(a), horizontal_fov_deg(longer));
  }
}

TEST(CameraModel, RejectsNonPositiveFields) {
  CameraModel cam = CameraModel::reference();
  cam.focal_length_mm = 0;
  EXPECT_THROW(cam.validate(), DomainError);
  cam = CameraModel::reference();
  cam.sensor_height = -1;
  EXPECT_THROW(cam.validate(), DomainError);
  // No orientation assumption.
  cam = CameraModel::reference();
  cam.sensor_width = 100;
  cam.sensor_height = 4000;
  EXPECT_NO_THROW(cam.validate());
}

TEST(FNumber, Examples) {
  EXPECT_NEAR(f_number(16, 9), 1.7778, 1e-4);
  EXPECT_DOUBLE_EQ(f_number(7.5, 7.5), 1.0);
  EXPECT_NEAR(f_number(16, 4.7), 3.404, 1e-3);
  EXPECT_THROW(f_number(0, 9), DomainError);
  EXPECT_THROW(f_number(16, -1), DomainError);
}

TEST(EffectiveFNumber, ReferenceApertures) {
  EXPECT_NEAR(effective_f_number(kPlus, kCircular, 1.8), 2.4, 0.05);
  EXPECT_NEAR(effective_f_number(kSlit, kCircular, 1.8), 3.4, 0.05);
  EXPECT_NEAR(effective_f_number(kSlit, kCircular, 1.8), 3.4217, 1e-4);
  EXPECT_DOUBLE_EQ(effective_f_number(kPlus, kPlus, 2.7), 2.7);
  EXPECT_DOUBLE_EQ(effective_f_number(kCircular, kCircular, 1.8), 1.8);
}

TEST(EffectiveFNumber, ScaleInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> area(0.1, 500.0), scale(1e-3, 1e3);
  for (int i = 0; i < 500; ++i) {
    ApertureSpec a = aperture("a", area(rng));
    ApertureSpec r = aperture("r", area(rng));
    const double c = scale(rng);
    ApertureSpec as = a, rs = r;
    as.area_mm2 *= c;
    rs.area_mm2 *= c;
    EXPECT_NEAR(effective_f_number(a, r, 1.8), effective_f_number(as, rs, 1.8),
                1e-12 * effective_f_number(a, r, 1.8));
  }
}

TEST(EffectiveFNumber, RejectsBadAreas) {
  EXPECT_THROW(effective_f_number(aperture("z", 0), kCircular, 1.8), DomainError);
  EXPECT_THROW(effective_f_number(kPlus, aperture("z", -2), 1.8), DomainError);
  EXPECT_THROW(effective_f_number(kPlus, kCircular, 0), DomainError);
}

TEST(GainFactor, ReferenceAperturesAreaConvention) {
  EXPECT_NEAR(gain_factor_db(kPlus, kCircular), 5.1, 0.15);
  EXPECT_NEAR(gain_factor_db(kSlit, kCircular), 11.2, 0.15);
  EXPECT_NEAR(gain_factor_db(kPlus, kCircular), 5.0401, 1e-4);
  EXPECT_DOUBLE_EQ(gain_factor_db(kCircular, kCircular), 0.0);
}

TEST(GainFactor, LiteralConventionIsHalfInDecibels) {
  EXPECT_NEAR(gain_factor_db(kPlus, kCircular, GainConvention::kLiteralFNumberRatio), 2.5200, 1e-4);
}

TEST(GainFactor, ConsistentWithEffectiveFNumber) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> area(0.5, 200.0), k(0.5, 16.0);
  for (int i = 0; i < 500; ++i) {
    const ApertureSpec a = aperture("a", area(rng));
    const ApertureSpec r = aperture("r", area(rng));
    const double kk = k(rng);
    EXPECT_NEAR(gain_factor_db(a, r), 40.0 * std::log10(effective_f_number(a, r, kk) / kk), 1e-9);
  }
}

TEST(NumericalAperture, Examples) {
  EXPECT_NEAR(numerical_aperture(1.8), 0.2778, 1e-4);
  EXPECT_DOUBLE_EQ(numerical_aperture(0.5), 1.0);
  EXPECT_NEAR(numerical_aperture(3.4), 0.1471, 1e-4);
  EXPECT_THROW(numerical_aperture(0.0), DomainError);
}

TEST(MinSpotSize, Examples) {
  EXPECT_NEAR(min_spot_size_um(0.55, 1.8), 4.8312, 1e-9);
  EXPECT_NEAR(min_spot_size_um(0.48, 3.4), 4 * 1.22 * 0.48 * 3.4, 1e-12);
  EXPECT_LT(min_spot_size_um(0.55, 1e-9), 1e-6);
  EXPECT_THROW(min_spot_size_um(-0.5, 1.8), DomainError);
  EXPECT_THROW(min_spot_size_um(0.5, 0.0), DomainError);
}

TEST(BboxWidth, BoundaryDistances) {
  const CameraModel cam = CameraModel::reference();
  const ObjectClassGeometry speed{"speed_sign", 0.25};
  const ObjectClassGeometry sign{"traffic_sign", 0.62};
  // Exact projection 31.0005 px, so the ceiling is 32.
  EXPECT_EQ(bbox_width_px(speed, 38, cam), 32);
  EXPECT_NEAR(bbox_width_px(speed, 38, cam), 32, 2);
  EXPECT_EQ(bbox_width_px(sign, 31, cam), 95);
  EXPECT_NEAR(bbox_width_px(sign, 31, cam), 96, 2);
  EXPECT_EQ(bbox_width_px(speed, 1e7, cam), 1);
  EXPECT_THROW(bbox_width_px(speed, 0, cam), DomainError);
}

TEST(BboxWidth, Monotonicity) {
  const CameraModel cam = CameraModel::reference();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(1.0, 300.0), width(0.05, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double d = dist(rng);
    const double w = width(rng);
    const ObjectClassGeometry o{"x", w};
    EXPECT_GE(bbox_width_px(o, d, cam), bbox_width_px(o, d * 1.05, cam));
    EXPECT_LE(bbox_width_px(o, d, cam), bbox_width_px(ObjectClassGeometry{"x", w * 1.05}, d, cam));
  }
}

TEST(PowerLaw, ExactRecovery) {
  std::vector<std::pair<double, double>> s;
  for (double d = 10; d <= 100; d += 5) s.emplace_back(d, 500.0 / d);
  const PowerLawFit fit = fit_power_law(s);
  EXPECT_NEAR(fit.scale_a, 500.0, 1e-9);
  EXPECT_NEAR(fit.exponent_b, -1.0, 1e-9);
  EXPECT_LT(fit.residual_rms, 1e-9);
  EXPECT_NEAR(distance_for_width(fit, 23), 21.739130, 1e-5);
}

TEST(PowerLaw, RoundTripIdentity) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> a(10, 5000), b(-2.0, -0.3), d(1, 200);
  for (int i = 0; i < 200; ++i) {
    PowerLawFit fit{a(rng), b(rng), 0.0};
    const double dist = d(rng);
    EXPECT_NEAR(distance_for_width(fit, fit.evaluate(dist)), dist, 1e-3 * dist);
  }
}

TEST(PowerLaw, SpeedSignFit) {
  const auto samples = sample_bbox_widths({"speed_sign", 0.25}, CameraModel::reference(),
                                          DepthPlanSpec::standard().distances_m);
  ASSERT_EQ(samples.size(), 19u);
  const PowerLawFit fit = fit_power_law(samples);
  EXPECT_GT(fit.exponent_b, -1.1);
  EXPECT_LT(fit.exponent_b, -0.9);
  EXPECT_NEAR(distance_for_width(fit, 23), 51.0, 5.1);
}

TEST(PowerLaw, Errors) {
  const std::vector<std::pair<double, double>> one{{10, 5}};
  EXPECT_THROW(fit_power_law(one), FitError);
  const std::vector<std::pair<double, double>> neg{{10, 5}, {-1, 3}};
  EXPECT_THROW(fit_power_law(neg), FitError);
  const std::vector<std::pair<double, double>> same_x{{10, 5}, {10, 3}};
  EXPECT_THROW(fit_power_law(same_x), FitError);
  EXPECT_THROW(distance_for_width(PowerLawFit{500, -1, 0}, 0), DomainError);
}

TEST(ApertureSet, AtMostOneReferenceAndUniqueNames) {
  std::vector<ApertureSpec> ok{kCircular, kPlus, kSlit};
  EXPECT_NO_THROW(validate_aperture_set(ok));
  EXPECT_EQ(find_reference(ok)->name, "circular");
  std::vector<ApertureSpec> two_refs{kCircular, aperture("other", 10, true)};
  EXPECT_THROW(validate_aperture_set(two_refs), DomainError);
  std::vector<ApertureSpec> dup{kPlus, kPlus};
  EXPECT_THROW(validate_aperture_set(dup), DomainError);
  ApertureSpec bad_diam = kPlus;
  bad_diam.effective_diameter_mm = 0.0;
  EXPECT_THROW(bad_diam.validate(), DomainError);
}
