#include "apsim/render.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "apsim/error.hpp"
#include "apsim/parallel.hpp"

namespace apsim {

DepthBins::DepthBins(int width, int height, std::size_t plane_count)
    : width_(width), height_(height), plane_count_(plane_count) {
  if (plane_count == 0 || plane_count >= kPassthrough) {
    throw DomainError("plane count must be in [1, 254]");
  }
  labels_.assign(static_cast<std::size_t>(width) * height, 0);
}

std::vector<bool> DepthBins::mask(std::size_t k) const {
  const std::uint8_t want = k == plane_count_ ? kPassthrough : static_cast<std::uint8_t>(k);
  std::vector<bool> m(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) m[i] = labels_[i] == want;
  return m;
}

std::size_t DepthBins::count(std::size_t k) const {
  const std::uint8_t want = k == plane_count_ ? kPassthrough : static_cast<std::uint8_t>(k);
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), want));
}

DepthBins bin_depth(const DepthMap& depth, const DepthPlanSpec& plan, OutOfRangePolicy policy) {
  plan.validate();
  const auto& d = plan.distances_m;
  const std::size_t n = d.size();

  // Bin edges: edges[k] <= depth < edges[k + 1] belongs to plane k.
  std::vector<double> edges(n + 1);
  if (n == 1) {
    edges[0] = -std::numeric_limits<double>::infinity();
    edges[1] = std::numeric_limits<double>::infinity();
  } else {
    for (std::size_t k = 1; k < n; ++k) edges[k] = 0.5 * (d[k - 1] + d[k]);
    edges[0] = d[0] - 0.5 * (d[1] - d[0]);
    edges[n] = d[n - 1] + 0.5 * (d[n - 1] - d[n - 2]);
  }

  // Fixed-point depths take 65536 values; label them once. The tolerance keeps
  // values such as 3750 * 0.01 on the intended side of an edge.
  constexpr double kEdgeTolerance = 1e-9;
  std::vector<std::uint8_t> lut(65536);
  for (std::size_t raw = 0; raw < lut.size(); ++raw) {
    const double m = raw * depth.depth_scale();
    if (m < edges[0] - kEdgeTolerance) {
      lut[raw] = policy == OutOfRangePolicy::kPassthrough ? DepthBins::kPassthrough : 0;
    } else if (m >= edges[n] - kEdgeTolerance) {
      lut[raw] = policy == OutOfRangePolicy::kPassthrough ? DepthBins::kPassthrough
                                                          : static_cast<std::uint8_t>(n - 1);
    } else {
      std::size_t k = 0;
      while (k + 1 < n && m >= edges[k + 1] - kEdgeTolerance) ++k;
      lut[raw] = static_cast<std::uint8_t>(k);
    }
  }

  DepthBins bins(depth.width(), depth.height(), n);
  auto labels = bins.labels();
  const auto values = depth.values();
  for (std::size_t i = 0; i < values.size(); ++i) labels[i] = lut[values[i]];
  return bins;
}

namespace {

struct KernelShift {
  int dy = 0;
  int dx = 0;
};

// Integer blob displacement of a kernel: stored centroid offset minus the
// kernel's own centroid about its centre.
KernelShift integer_shift(const PsfKernel& k) {
  double sy = 0, sx = 0, mass = 0;
  for (int r = 0; r < k.height; ++r) {
    for (int c = 0; c < k.width; ++c) {
      const double w = k.at(r, c);
      sy += w * (r - k.radius_y());
      sx += w * (c - k.radius_x());
      mass += w;
    }
  }
  if (mass > 0) {
    sy /= mass;
    sx /= mass;
  }
  return {static_cast<int>(std::lround(k.offset_dy - sy)),
          static_cast<int>(std::lround(k.offset_dx - sx))};
}

}  // namespace

PlanarImage filter_image(const PlanarImage& image, const DepthBins& bins, const PsfBank& bank,
                         const RenderConfig& config) {
  if (bank.empty()) throw InputError("PSF bank is empty");
  if (image.width() != bank.sensor_width() || image.height() != bank.sensor_height()) {
    throw InputError("image resolution " + std::to_string(image.width()) + "x" +
                     std::to_string(image.height()) + " does not match the bank sensor " +
                     std::to_string(bank.sensor_width()) + "x" +
                     std::to_string(bank.sensor_height()));
  }
  if (bins.width() != image.width() || bins.height() != image.height()) {
    throw InputError("depth map and image dimensions differ");
  }
  if (bins.plane_count() != bank.plan().size()) {
    throw InputError("depth binning and bank use different plane counts");
  }

  const int width = image.width();
  const int height = image.height();
  std::vector<int> block_of_row(height), block_of_col(width);
  for (int r = 0; r < height; ++r) block_of_row[r] = bank.row_tiling().nearest_block(r);
  for (int c = 0; c < width; ++c) block_of_col[c] = bank.col_tiling().nearest_block(c);

  const auto kernels = bank.kernels();
  std::vector<KernelShift> shifts(kernels.size());
  if (config.apply_centroid_offset) {
    for (std::size_t i = 0; i < kernels.size(); ++i) shifts[i] = integer_shift(kernels[i]);
  }

  const std::size_t block_rows = bank.block_rows();
  const std::size_t block_cols = bank.block_cols();
  const auto labels = bins.labels();
  PlanarImage out(width, height);

  for (Channel channel : kChannels) {
    const auto src = image.plane(channel);
    auto dst = out.plane(channel);
    parallel_for(static_cast<std::size_t>(height), config.workers, [&](std::size_t row_index) {
      const int r = static_cast<int>(row_index);
      for (int c = 0; c < width; ++c) {
        const std::size_t p = static_cast<std::size_t>(r) * width + c;
        const std::uint8_t plane = labels[p];
        if (plane == DepthBins::kPassthrough) {
          dst[p] = src[p];
          continue;
        }
        const std::size_t ki =
            ((static_cast<std::size_t>(plane) * 3 + index_of(channel)) * block_rows +
             block_of_row[r]) *
                block_cols +
            block_of_col[c];
        const PsfKernel& k = kernels[ki];
        const KernelShift s = shifts[ki];
        const int ry = k.radius_y();
        const int rx = k.radius_x();
        // Source column for tap kx is c - kx - s.dx; restrict kx to the image.
        const int kx_lo = std::max(-rx, c - s.dx - (width - 1));
        const int kx_hi = std::min(rx, c - s.dx);
        double acc = 0.0;
        double wsum = 0.0;
        for (int ky = -ry; ky <= ry; ++ky) {
          const int sr = r - ky - s.dy;
          if (sr < 0 || sr >= height) continue;
          const float* wrow = k.weights.data() + static_cast<std::size_t>(ky + ry) * k.width + rx;
          const std::size_t base = static_cast<std::size_t>(sr) * width;
          for (int kx = kx_lo; kx <= kx_hi; ++kx) {
            const std::size_t q = base + (c - kx - s.dx);
            if (labels[q] != plane) continue;
            const double w = wrow[kx];
            acc += w * src[q];
            wsum += w;
          }
        }
        dst[p] = wsum > 0.0 ? static_cast<float>(acc / wsum) : src[p];
      }
    });
  }
  return out;
}

PlanarImage filter_image(const RgbImage& image, const DepthMap& depth, const PsfBank& bank,
                         const RenderConfig& config) {
  if (depth.width() != image.width() || depth.height() != image.height()) {
    throw InputError("depth map and image dimensions differ");
  }
  if (bank.empty()) throw InputError("PSF bank is empty");
  const DepthBins bins = bin_depth(depth, bank.plan(), config.out_of_range_policy);
  return filter_image(PlanarImage::from_rgb(image), bins, bank, config);
}

namespace {

PlanarImage scale_image(const PlanarImage& image, double factor) {
  PlanarImage out = image;
  const auto f = static_cast<float>(factor);
  for (Channel c : kChannels) {
    for (float& v : out.plane(c)) v *= f;
  }
  return out;
}

void require_gain(double gain_db) {
  if (!(gain_db >= 0.0) || !std::isfinite(gain_db)) {
    throw ConfigError("gain must be a non-negative number of dB");
  }
}

}  // namespace

PlanarImage apply_gain(const PlanarImage& image, double gain_db) {
  require_gain(gain_db);
  return scale_image(image, std::pow(10.0, gain_db / 20.0));
}

PlanarImage attenuate_exposure(const PlanarImage& image, double aperture_gain_db) {
  require_gain(aperture_gain_db);
  return scale_image(image, std::pow(10.0, -aperture_gain_db / 20.0));
}

std::array<double, 3> replica_noise_std(const std::optional<NoiseModel>& model,
                                        const RenderConfig& config, bool* extrapolated) {
  require_gain(config.gain_db);
  require_gain(config.aperture_gain_db);
  std::array<double, 3> stds{0.0, 0.0, 0.0};
  bool extra = false;
  if (model && config.gain_db > 0.0) {
    for (Channel c : kChannels) {
      const NoiseStd s = noise_std_for_gain(*model, config.gain_db + config.aperture_gain_db, c);
      stds[index_of(c)] = s.std_gray;
      extra = extra || s.extrapolated;
    }
  }
  if (extrapolated) *extrapolated = extra;
  return stds;
}

std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& image_id,
                          const std::string& aperture_name, double gain_db) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix_byte = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ull;
  };
  auto mix_u64 = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto mix_str = [&](const std::string& s) {
    for (char ch : s) mix_byte(static_cast<std::uint8_t>(ch));
    mix_byte(0);
  };
  mix_u64(base_seed);
  mix_str(image_id);
  mix_str(aperture_name);
  mix_u64(std::bit_cast<std::uint64_t>(gain_db + 0.0));  // folds -0.0 into 0.0

  std::uint64_t z = h + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

RgbImage render(const RgbImage& image, const DepthMap& depth, const PsfBank& bank,
                const std::optional<NoiseModel>& noise_model, const RenderConfig& config,
                const std::string& image_id) {
  const auto stds = replica_noise_std(noise_model, config);
  const PlanarImage filtered = filter_image(image, depth, bank, config);
  const PlanarImage exposed = attenuate_exposure(filtered, config.aperture_gain_db);
  const PlanarImage gained = apply_gain(exposed, config.aperture_gain_db);
  const std::uint64_t seed =
      derive_seed(config.base_seed, image_id, config.aperture_name, config.gain_db);
  return add_awgn(gained, stds, seed);
}

}  // namespace apsim
