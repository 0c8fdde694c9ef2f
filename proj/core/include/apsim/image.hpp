#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace apsim {

enum class Channel : std::uint8_t { kR = 0, kG = 1, kB = 2 };

inline constexpr std::array<Channel, 3> kChannels = {Channel::kR, Channel::kG, Channel::kB};

constexpr int index_of(Channel c) { return static_cast<int>(c); }
char channel_letter(Channel c);
// Accepts "R"/"G"/"B" (either case) and "red"/"green"/"blue".
Channel parse_channel(std::string_view text);

// 8-bit interleaved RGB, row-major.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  std::uint8_t& at(int row, int col, Channel c) {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * 3 + index_of(c)];
  }
  std::uint8_t at(int row, int col, Channel c) const {
    return data_[(static_cast<std::size_t>(row) * width_ + col) * 3 + index_of(c)];
  }

  std::span<std::uint8_t> data() { return data_; }
  std::span<const std::uint8_t> data() const { return data_; }

  bool operator==(const RgbImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// One float plane per channel; the working representation between stages.
class PlanarImage {
 public:
  PlanarImage() = default;
  PlanarImage(int width, int height, float fill = 0.0f);

  static PlanarImage from_rgb(const RgbImage& image);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

  std::span<float> plane(Channel c) { return planes_[index_of(c)]; }
  std::span<const float> plane(Channel c) const { return planes_[index_of(c)]; }

  float& at(int row, int col, Channel c) {
    return planes_[index_of(c)][static_cast<std::size_t>(row) * width_ + col];
  }
  float at(int row, int col, Channel c) const {
    return planes_[index_of(c)][static_cast<std::size_t>(row) * width_ + col];
  }

  // Round-to-nearest and clamp to [0, 255].
  RgbImage to_rgb() const;

  bool operator==(const PlanarImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::array<std::vector<float>, 3> planes_;
};

// 16-bit fixed-point depth; meters = value * depth_scale.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, double depth_scale = 0.01);

  int width() const { return width_; }
  int height() const { return height_; }
  double depth_scale() const { return depth_scale_; }

  std::uint16_t& raw(int row, int col) {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::uint16_t raw(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  double meters(int row, int col) const { return raw(row, col) * depth_scale_; }

  std::span<std::uint16_t> values() { return values_; }
  std::span<const std::uint16_t> values() const { return values_; }

  // Fills every pixel with the unit value closest to `meters`.
  void fill_meters(double meters);

 private:
  int width_ = 0;
  int height_ = 0;
  double depth_scale_ = 0.01;
  std::vector<std::uint16_t> values_;
};

}  // namespace apsim
