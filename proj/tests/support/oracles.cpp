#include "oracles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>

#include <json.hpp>
#include <unistd.h>

#include "apsim/png_io.hpp"

namespace apsim::testing {

namespace fs = std::filesystem;

int nearest_block_exhaustive(const AxisTiling& tiling, int pixel) {
  int best = 0;
  int best_distance = std::abs(pixel - tiling.block_center(0));
  for (int i = 1; i < tiling.blocks; ++i) {
    const int d = std::abs(pixel - tiling.block_center(i));
    if (d < best_distance) {
      best = i;
      best_distance = d;
    }
  }
  return best;
}

PlanarImage masked_convolution_oracle(const PlanarImage& image, const DepthBins& bins,
                                      const PsfBank& bank) {
  const int w = image.width();
  const int h = image.height();
  PlanarImage out(w, h);
  for (Channel ch : kChannels) {
    std::vector<double> result(static_cast<std::size_t>(w) * h, 0.0);
    std::vector<bool> written(result.size(), false);
    for (std::size_t k = 0; k <= bins.plane_count(); ++k) {
      const std::vector<bool> mask = bins.mask(k);
      for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
          const std::size_t p = static_cast<std::size_t>(r) * w + c;
          if (!mask[p]) continue;
          if (k == bins.plane_count()) {
            result[p] = image.at(r, c, ch);
            written[p] = true;
            continue;
          }
          const BankKey key{static_cast<int>(k), ch,
                            nearest_block_exhaustive(bank.row_tiling(), r),
                            nearest_block_exhaustive(bank.col_tiling(), c)};
          const PsfKernel& kern = bank.kernel(key);
          double num = 0.0, den = 0.0;
          for (int i = 0; i < kern.height; ++i) {
            for (int j = 0; j < kern.width; ++j) {
              const int sr = r - (i - kern.radius_y());
              const int sc = c - (j - kern.radius_x());
              if (sr < 0 || sr >= h || sc < 0 || sc >= w) continue;
              const double m = mask[static_cast<std::size_t>(sr) * w + sc] ? 1.0 : 0.0;
              num += kern.at(i, j) * m * image.at(sr, sc, ch);
              den += kern.at(i, j) * m;
            }
          }
          result[p] = den > 0.0 ? num / den : image.at(r, c, ch);
          written[p] = true;
        }
      }
    }
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const std::size_t p = static_cast<std::size_t>(r) * w + c;
        out.at(r, c, ch) = written[p] ? static_cast<float>(result[p]) : std::nanf("");
      }
    }
  }
  return out;
}

PsfKernel random_kernel(std::mt19937_64& rng, int max_support, double floor_ratio) {
  std::uniform_int_distribution<int> radius(0, max_support / 2);
  std::uniform_real_distribution<double> weight(floor_ratio, 1.0);
  PsfKernel k;
  k.height = 2 * radius(rng) + 1;
  k.width = 2 * radius(rng) + 1;
  std::vector<double> w(static_cast<std::size_t>(k.height) * k.width);
  double total = 0.0;
  for (auto& v : w) total += (v = weight(rng));
  k.weights.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) k.weights[i] = static_cast<float>(w[i] / total);
  return k;
}

PsfKernel gaussian_kernel(int support, double sigma) {
  PsfKernel k;
  k.height = k.width = support;
  k.weights.assign(static_cast<std::size_t>(support) * support, 0.0f);
  const int r = support / 2;
  std::vector<double> w(k.weights.size());
  double total = 0.0;
  for (int i = 0; i < support; ++i) {
    for (int j = 0; j < support; ++j) {
      const double v = std::exp(-((i - r) * (i - r) + (j - r) * (j - r)) / (2 * sigma * sigma));
      w[static_cast<std::size_t>(i) * support + j] = v;
      total += v;
    }
  }
  for (std::size_t i = 0; i < w.size(); ++i) k.weights[i] = static_cast<float>(w[i] / total);
  return k;
}

std::pair<double, double> kernel_centroid(const PsfKernel& k) {
  double mass = 0, sx = 0, sy = 0;
  for (int i = 0; i < k.height; ++i) {
    for (int j = 0; j < k.width; ++j) {
      mass += k.at(i, j);
      sx += k.at(i, j) * (j - k.radius_x());
      sy += k.at(i, j) * (i - k.radius_y());
    }
  }
  return {sx / mass, sy / mass};
}

PlanarImage random_image(std::mt19937_64& rng, int width, int height, float lo, float hi) {
  std::uniform_real_distribution<float> value(lo, hi);
  PlanarImage img(width, height);
  for (Channel c : kChannels) {
    for (float& v : img.plane(c)) v = value(rng);
  }
  return img;
}

PlanarImage stamp_kernel(const RgbImage& impulse_grid, Channel channel, const PsfKernel& kernel,
                         int dx, int dy) {
  const int w = impulse_grid.width();
  const int h = impulse_grid.height();
  PlanarImage frame(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::uint8_t v = impulse_grid.at(r, c, channel);
      if (v == 0) continue;
      for (int i = 0; i < kernel.height; ++i) {
        for (int j = 0; j < kernel.width; ++j) {
          const int tr = r + dy + i - kernel.radius_y();
          const int tc = c + dx + j - kernel.radius_x();
          if (tr < 0 || tr >= h || tc < 0 || tc >= w) continue;
          frame.at(tr, tc, channel) += static_cast<float>(v) * kernel.at(i, j);
        }
      }
    }
  }
  return frame;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path write_fixture_dataset(const fs::path& root, const FixtureOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> pixel(0, 255);
  std::uniform_int_distribution<int> depth_raw(500, 11000);  // 5 m .. 110 m at 0.01 m/unit
  fs::create_directories(root / "rgb");
  fs::create_directories(root / "depth");
  if (options.with_annotations) fs::create_directories(root / "annotations");

  nlohmann::json records = nlohmann::json::array();
  for (int n = 0; n < options.images; ++n) {
    RgbImage rgb(options.width, options.height);
    for (auto& v : rgb.data()) v = static_cast<std::uint8_t>(pixel(rng));
    // Piecewise-constant depth: vertical bands of random depth.
    DepthMap depth(options.width, options.height, 0.01);
    const int bands = 4;
    std::vector<std::uint16_t> band_depth(bands);
    for (auto& d : band_depth) d = static_cast<std::uint16_t>(depth_raw(rng));
    for (int r = 0; r < options.height; ++r) {
      for (int c = 0; c < options.width; ++c) {
        depth.raw(r, c) = band_depth[static_cast<std::size_t>(c) * bands / options.width];
      }
    }
    const std::string stem = "scene_" + std::to_string(n);
    write_rgb_png(root / "rgb" / (stem + ".png"), rgb);
    write_depth_png(root / "depth" / (stem + ".png"), depth);
    nlohmann::json rec{{"id", stem},
                       {"rgb_path", "rgb/" + stem + ".png"},
                       {"depth_path", "depth/" + stem + ".png"}};
    if (options.with_annotations) {
      nlohmann::json ann{
          {"images", {{{"id", n}, {"file_name", stem + ".png"}}}},
          {"annotations",
           {{{"id", 1}, {"image_id", n}, {"category_id", 20}, {"bbox", {4, 5, 20, 20}}},
            {{"id", 2}, {"image_id", n}, {"category_id", 90}, {"bbox", {30, 10, 12, 30}}}}}};
      std::ofstream(root / "annotations" / (stem + ".json")) << ann.dump(1);
      rec["annotation_path"] = "annotations/" + stem + ".json";
    }
    records.push_back(rec);
  }
  nlohmann::json manifest{{"dataset_name", "fixture"}, {"records", records}};
  const fs::path path = root / "manifest.json";
  std::ofstream(path) << manifest.dump(1);
  return path;
}

PsfBank random_bank(std::mt19937_64& rng, const std::string& aperture, const DepthPlanSpec& plan,
                    int height, int width, int block_size, int max_support) {
  PsfBank bank(aperture, plan, height, width, block_size);
  for (const auto& key : bank.keys()) bank.set_kernel(key, random_kernel(rng, max_support));
  return bank;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace apsim::testing
