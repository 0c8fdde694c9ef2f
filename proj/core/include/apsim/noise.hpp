#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "apsim/image.hpp"

namespace apsim {

// Sensor noise STD (8-bit gray levels) as a function of camera gain:
// sigma_c(g) = amplitude_c * exp(rate_c * g).
struct NoiseModel {
  struct ChannelCurve {
    double amplitude = 0.0;
    double rate = 0.0;  // 1/dB
  };
  std::array<ChannelCurve, 3> channels{};
  double gain_min_db = 0.0;
  double gain_max_db = 0.0;

  void validate() const;
};

struct GainMeasurement {
  double gain_db = 0.0;
  double std_gray = 0.0;
};

// One measurement list per channel (R, G, B).
using NoiseMeasurements = std::array<std::vector<GainMeasurement>, 3>;

// Least squares of ln(std) = ln(a) + b * gain for each channel. The valid gain
// range spans the measured gains of all channels.
NoiseModel fit_noise_model(const NoiseMeasurements& measurements);

struct NoiseStd {
  double std_gray = 0.0;
  bool extrapolated = false;
};

NoiseStd noise_std_for_gain(const NoiseModel& model, double gain_db, Channel channel);

// CSV with header gain_db,std_r,std_g,std_b.
NoiseMeasurements read_noise_measurements(const std::filesystem::path& path);

std::string noise_model_to_json(const NoiseModel& model);
NoiseModel parse_noise_model(const std::string& json_text);
NoiseModel load_noise_model(const std::filesystem::path& path);
void save_noise_model(const NoiseModel& model, const std::filesystem::path& path);

// Adds zero-mean Gaussian noise (std per channel, gray levels) to every sample,
// then rounds and clamps to 8 bits. Output is a pure function of the inputs
// and seed on every platform.
RgbImage add_awgn(const PlanarImage& image, const std::array<double, 3>& std_per_channel,
                  std::uint64_t seed);

}  // namespace apsim
