#include "apsim/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "apsim/error.hpp"

namespace apsim {

char channel_letter(Channel c) {
  switch (c) {
    case Channel::kR: return 'R';
    case Channel::kG: return 'G';
    case Channel::kB: return 'B';
  }
  return '?';
}

Channel parse_channel(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (t == "r" || t == "red") return Channel::kR;
  if (t == "g" || t == "green") return Channel::kG;
  if (t == "b" || t == "blue") return Channel::kB;
  throw ConfigError("unknown channel '" + std::string(text) + "'");
}

RgbImage::RgbImage(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw DomainError("negative image size");
  data_.assign(static_cast<std::size_t>(width) * height * 3, 0);
}

PlanarImage::PlanarImage(int width, int height, float fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw DomainError("negative image size");
  for (auto& p : planes_) p.assign(static_cast<std::size_t>(width) * height, fill);
}

PlanarImage PlanarImage::from_rgb(const RgbImage& image) {
  PlanarImage out(image.width(), image.height());
  const auto src = image.data();
  const std::size_t n = image.pixel_count();
  for (int c = 0; c < 3; ++c) {
    auto& plane = out.planes_[c];
    for (std::size_t i = 0; i < n; ++i) plane[i] = src[i * 3 + c];
  }
  return out;
}

RgbImage PlanarImage::to_rgb() const {
  RgbImage out(width_, height_);
  auto dst = out.data();
  const std::size_t n = pixel_count();
  for (int c = 0; c < 3; ++c) {
    const auto& plane = planes_[c];
    for (std::size_t i = 0; i < n; ++i) {
      const float v = std::nearbyint(std::clamp(plane[i], 0.0f, 255.0f));
      dst[i * 3 + c] = static_cast<std::uint8_t>(v);
    }
  }
  return out;
}

DepthMap::DepthMap(int width, int height, double depth_scale)
    : width_(width), height_(height), depth_scale_(depth_scale) {
  if (width < 0 || height < 0) throw DomainError("negative depth map size");
  if (!(depth_scale > 0.0)) throw DomainError("depth_scale must be positive");
  values_.assign(static_cast<std::size_t>(width) * height, 0);
}

void DepthMap::fill_meters(double meters) {
  const double units = std::clamp(std::round(meters / depth_scale_), 0.0, 65535.0);
  std::fill(values_.begin(), values_.end(), static_cast<std::uint16_t>(units));
}

}  // namespace apsim
