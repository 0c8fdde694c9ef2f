#pragma once

// Depth-binned, per-channel spatially varying PSF filtering followed by
// aperture gain compensation and gain-calibrated sensor noise.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apsim/image.hpp"
#include "apsim/noise.hpp"
#include "apsim/psf_bank.hpp"

namespace apsim {

enum class OutOfRangePolicy { kClampToNearestPlane, kPassthrough };

// Plane label per pixel. Plane k owns depths in [lower_k, upper_k), where the
// bounds are the midpoints between neighbouring plane distances and the outer
// planes extend half their neighbour spacing outward.
class DepthBins {
 public:
  static constexpr std::uint8_t kPassthrough = 0xff;

  DepthBins(int width, int height, std::size_t plane_count);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t plane_count() const { return plane_count_; }

  std::uint8_t label(int row, int col) const {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const std::uint8_t> labels() const { return labels_; }
  std::span<std::uint8_t> labels() { return labels_; }

  // Mask of plane k (k == plane_count() addresses the passthrough mask).
  std::vector<bool> mask(std::size_t k) const;
  std::size_t count(std::size_t k) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::size_t plane_count_ = 0;
  std::vector<std::uint8_t> labels_;
};

DepthBins bin_depth(const DepthMap& depth, const DepthPlanSpec& plan, OutOfRangePolicy policy);

struct RenderConfig {
  std::string aperture_name;
  // Camera gain level; selects the sensor noise. 0 dB is the noise-free replica.
  double gain_db = 0.0;
  // Compensation gain for the aperture's reduced light throughput. The image is
  // attenuated by the same factor before it, so intensity is preserved; the
  // noise is evaluated at gain_db + aperture_gain_db.
  double aperture_gain_db = 0.0;
  std::uint64_t base_seed = 0;
  OutOfRangePolicy out_of_range_policy = OutOfRangePolicy::kClampToNearestPlane;
  bool apply_centroid_offset = false;
  unsigned workers = 1;
};

// out(p) = sum_q w(q) * in(p - q [- shift]) / sum_q w(q), over source pixels
// in the same depth plane as p, using the kernel of the block nearest p.
PlanarImage filter_image(const PlanarImage& image, const DepthBins& bins, const PsfBank& bank,
                         const RenderConfig& config);
PlanarImage filter_image(const RgbImage& image, const DepthMap& depth, const PsfBank& bank,
                         const RenderConfig& config);

// Multiplies every sample by 10^(gain_db / 20).
PlanarImage apply_gain(const PlanarImage& image, double gain_db);

// Light throughput of an aperture relative to the reference: 10^(-gain_db / 20).
PlanarImage attenuate_exposure(const PlanarImage& image, double aperture_gain_db);

// Per-channel noise STD for a replica; zero at 0 dB camera gain.
std::array<double, 3> replica_noise_std(const std::optional<NoiseModel>& model,
                                        const RenderConfig& config, bool* extrapolated = nullptr);

// 64-bit FNV-1a over the fields, finalized with splitmix64.
std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& image_id,
                          const std::string& aperture_name, double gain_db);

RgbImage render(const RgbImage& image, const DepthMap& depth, const PsfBank& bank,
                const std::optional<NoiseModel>& noise_model, const RenderConfig& config,
                const std::string& image_id);

}  // namespace apsim
