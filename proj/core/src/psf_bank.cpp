#include "apsim/psf_bank.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "apsim/parallel.hpp"

namespace apsim {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::string describe(const BankKey& k) {
  std::ostringstream os;
  os << "plane " << k.plane << " channel " << channel_letter(k.channel) << " block ("
     << k.block_row << "," << k.block_col << ")";
  return os.str();
}

}  // namespace

DepthPlanSpec DepthPlanSpec::standard() {
  DepthPlanSpec plan;
  for (int d = 10; d <= 100; d += 5) plan.distances_m.push_back(d);
  return plan;
}

void DepthPlanSpec::validate() const {
  if (distances_m.empty()) throw DomainError("depth plan is empty");
  for (std::size_t i = 0; i < distances_m.size(); ++i) {
    if (!(distances_m[i] > 0.0)) throw DomainError("depth plan distances must be positive");
    if (i > 0 && !(distances_m[i] > distances_m[i - 1])) {
      throw DomainError("depth plan must be strictly increasing");
    }
  }
}

PsfKernel PsfKernel::delta() { return PsfKernel{}; }

void PsfKernel::validate(double tolerance) const {
  if (height <= 0 || width <= 0 || height % 2 == 0 || width % 2 == 0) {
    throw DomainError("kernel support must be odd and positive");
  }
  if (weights.size() != static_cast<std::size_t>(height) * width) {
    throw DomainError("kernel weight count does not match its support");
  }
  double sum = 0.0;
  for (float w : weights) {
    if (!(w >= 0.0f)) throw DomainError("kernel weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > tolerance) throw DomainError("kernel weights must sum to 1");
}

AxisTiling AxisTiling::make(int extent, int block_size) {
  if (block_size <= 0 || block_size % 2 == 0) {
    throw ConfigError("block size must be a positive odd number");
  }
  if (extent < block_size) throw ConfigError("block size exceeds the sensor extent");
  AxisTiling t;
  t.extent = extent;
  t.block_size = block_size;
  t.blocks = extent / block_size;
  t.leading_margin = (extent % block_size) / 2;
  return t;
}

int AxisTiling::nearest_block(int pixel) const {
  const int idx = floor_div(pixel - block_center(0) + block_size / 2, block_size);
  return std::clamp(idx, 0, blocks - 1);
}

PsfBank::PsfBank(std::string aperture_name, DepthPlanSpec plan, int sensor_height,
                 int sensor_width, int block_size)
    : aperture_name_(std::move(aperture_name)),
      plan_(std::move(plan)),
      rows_(AxisTiling::make(sensor_height, block_size)),
      cols_(AxisTiling::make(sensor_width, block_size)) {
  plan_.validate();
  kernels_.assign(plan_.size() * 3 * rows_.blocks * cols_.blocks, PsfKernel::delta());
}

std::size_t PsfBank::flat_index(const BankKey& key) const {
  if (key.plane < 0 || static_cast<std::size_t>(key.plane) >= plan_.size() ||
      key.block_row < 0 || key.block_row >= rows_.blocks || key.block_col < 0 ||
      key.block_col >= cols_.blocks) {
    throw DomainError("bank key out of range: " + describe(key));
  }
  return ((static_cast<std::size_t>(key.plane) * 3 + index_of(key.channel)) * rows_.blocks +
          key.block_row) *
             cols_.blocks +
         key.block_col;
}

void PsfBank::set_kernel(const BankKey& key, PsfKernel kernel) {
  kernel.validate(1e-5);
  kernels_[flat_index(key)] = std::move(kernel);
}

void PsfBank::fill(const PsfKernel& kernel) {
  kernel.validate(1e-5);
  std::fill(kernels_.begin(), kernels_.end(), kernel);
}

const PsfKernel& PsfBank::kernel_at(int row, int col, int plane, Channel channel) const {
  if (row < 0 || row >= rows_.extent || col < 0 || col >= cols_.extent) {
    throw DomainError("pixel outside the sensor");
  }
  if (plane < 0 || static_cast<std::size_t>(plane) >= plan_.size()) {
    throw DomainError("depth plane index out of range");
  }
  return kernels_[flat_index({plane, channel, rows_.nearest_block(row), cols_.nearest_block(col)})];
}

std::vector<BankKey> PsfBank::keys() const {
  std::vector<BankKey> out;
  out.reserve(kernels_.size());
  for (int p = 0; p < static_cast<int>(plan_.size()); ++p) {
    for (Channel c : kChannels) {
      for (int r = 0; r < rows_.blocks; ++r) {
        for (int q = 0; q < cols_.blocks; ++q) out.push_back({p, c, r, q});
      }
    }
  }
  return out;
}

RgbImage synthesize_impulse_grid(const ImpulseGridSpec& spec) {
  if (spec.height <= 0 || spec.width <= 0) throw ConfigError("impulse grid size must be positive");
  const AxisTiling rows = AxisTiling::make(spec.height, spec.block_size);
  const AxisTiling cols = AxisTiling::make(spec.width, spec.block_size);
  RgbImage img(spec.width, spec.height);
  for (int r = 0; r < rows.blocks; ++r) {
    for (int c = 0; c < cols.blocks; ++c) {
      img.at(rows.block_center(r), cols.block_center(c), spec.channel) = 0xff;
    }
  }
  return img;
}

PsfKernel extract_kernel(std::span<const float> window, int window_height, int window_width,
                         int impulse_row, int impulse_col, int max_support,
                         const ExtractOptions& options) {
  float peak = 0.0f;
  for (float v : window) peak = std::max(peak, v);
  if (!(peak > 0.0f)) throw DomainError("block has no response");
  const double threshold = peak * options.background_fraction;

  int r0 = window_height, r1 = -1, c0 = window_width, c1 = -1;
  double mass = 0.0, sum_r = 0.0, sum_c = 0.0;
  for (int r = 0; r < window_height; ++r) {
    for (int c = 0; c < window_width; ++c) {
      const double v = window[static_cast<std::size_t>(r) * window_width + c];
      if (v < threshold) continue;
      r0 = std::min(r0, r);
      r1 = std::max(r1, r);
      c0 = std::min(c0, c);
      c1 = std::max(c1, c);
      mass += v;
      sum_r += v * r;
      sum_c += v * c;
    }
  }

  PsfKernel k;
  k.offset_dy = sum_r / mass - impulse_row;
  k.offset_dx = sum_c / mass - impulse_col;

  // Centre of the tight box; half-integer centres round toward the centroid.
  auto centre_of = [](int lo, int hi, double centroid) {
    if ((lo + hi) % 2 == 0) return (lo + hi) / 2;
    const int below = (lo + hi - 1) / 2;
    return centroid > below + 0.5 ? below + 1 : below;
  };
  const int cr = centre_of(r0, r1, sum_r / mass);
  const int cc = centre_of(c0, c1, sum_c / mass);
  const int cap = std::max(0, max_support / 2);
  const int ry = std::min(std::max(cr - r0, r1 - cr), cap);
  const int rx = std::min(std::max(cc - c0, c1 - cc), cap);

  k.height = 2 * ry + 1;
  k.width = 2 * rx + 1;
  k.weights.assign(static_cast<std::size_t>(k.height) * k.width, 0.0f);
  std::vector<double> acc(k.weights.size(), 0.0);
  double total = 0.0;
  for (int dy = -ry; dy <= ry; ++dy) {
    const int r = cr + dy;
    if (r < 0 || r >= window_height) continue;
    for (int dx = -rx; dx <= rx; ++dx) {
      const int c = cc + dx;
      if (c < 0 || c >= window_width) continue;
      const double v = window[static_cast<std::size_t>(r) * window_width + c];
      if (v < threshold) continue;
      acc[static_cast<std::size_t>(dy + ry) * k.width + (dx + rx)] = v;
      total += v;
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) k.weights[i] = static_cast<float>(acc[i] / total);
  return k;
}

PsfBank extract_bank(const FrameSet& frames, const DepthPlanSpec& plan, int block_size,
                     std::string aperture_name, const ExtractOptions& options) {
  plan.validate();
  const PlanarImage* first = nullptr;
  for (int p = 0; p < static_cast<int>(plan.size()); ++p) {
    for (Channel c : kChannels) {
      auto it = frames.find({p, c});
      if (it == frames.end()) {
        std::ostringstream os;
        os << "missing response frame for plane " << p << " (" << plan.distances_m[p]
           << " m) channel " << channel_letter(c);
        throw InputError(os.str());
      }
      if (!first) {
        first = &it->second;
      } else if (it->second.width() != first->width() || it->second.height() != first->height()) {
        throw InputError("response frames do not share one resolution");
      }
    }
  }

  PsfBank bank(std::move(aperture_name), plan, first->height(), first->width(), block_size);
  const AxisTiling& rows = bank.row_tiling();
  const AxisTiling& cols = bank.col_tiling();
  const int half = block_size / 2;

  const std::size_t frame_jobs = plan.size() * 3;
  parallel_for(frame_jobs, 0, [&](std::size_t job) {
    const int plane = static_cast<int>(job / 3);
    const Channel channel = kChannels[job % 3];
    const auto src = frames.at({plane, channel}).plane(channel);
    const int width = first->width();
    std::vector<float> window(static_cast<std::size_t>(block_size) * block_size);
    for (int br = 0; br < rows.blocks; ++br) {
      for (int bc = 0; bc < cols.blocks; ++bc) {
        const int top = rows.block_start(br);
        const int left = cols.block_start(bc);
        for (int r = 0; r < block_size; ++r) {
          const float* row = src.data() + static_cast<std::size_t>(top + r) * width + left;
          std::copy(row, row + block_size, window.begin() + static_cast<std::ptrdiff_t>(r) * block_size);
        }
        const BankKey key{plane, channel, br, bc};
        try {
          bank.kernel(key) =
              extract_kernel(window, block_size, block_size, half, half, block_size, options);
        } catch (const DomainError&) {
          throw DegenerateBlockError(key, "no PSF response in " + describe(key));
        }
      }
    }
  });
  return bank;
}

PsfBank extract_bank(const std::map<FrameKey, RgbImage>& frames, const DepthPlanSpec& plan,
                     int block_size, std::string aperture_name, const ExtractOptions& options) {
  FrameSet planar;
  for (const auto& [key, img] : frames) planar.emplace(key, PlanarImage::from_rgb(img));
  return extract_bank(planar, plan, block_size, std::move(aperture_name), options);
}

}  // namespace apsim
