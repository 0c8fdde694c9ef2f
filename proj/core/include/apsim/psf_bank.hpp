#pragma once

// Spatially varying PSF kernel banks.
//
// The sensor is tiled with square blocks of `block_size` pixels. The part of
// each dimension that does not fill a whole block is left as a margin, split
// evenly before the first and after the last block (the odd pixel goes to the
// trailing edge). Each block carries one kernel per (depth plane, channel),
// measured from the response to an impulse at the block's center pixel.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apsim/error.hpp"
#include "apsim/image.hpp"

namespace apsim {

struct DepthPlanSpec {
  std::vector<double> distances_m;

  // 10 m to 100 m in 5 m steps (19 planes).
  static DepthPlanSpec standard();

  // Strictly increasing, non-empty, all positive.
  void validate() const;
  std::size_t size() const { return distances_m.size(); }

  bool operator==(const DepthPlanSpec&) const = default;
};

struct PsfKernel {
  int height = 1;
  int width = 1;
  // Row-major, non-negative, sums to 1.
  std::vector<float> weights{1.0f};
  // Intensity-weighted blob centroid relative to the impulse, in pixels.
  double offset_dx = 0.0;
  double offset_dy = 0.0;

  static PsfKernel delta();

  int radius_y() const { return height / 2; }
  int radius_x() const { return width / 2; }
  float at(int row, int col) const { return weights[static_cast<std::size_t>(row) * width + col]; }

  // Throws DomainError unless support is odd, weights are non-negative and
  // sum to 1 within `tolerance`.
  void validate(double tolerance = 1e-6) const;

  bool operator==(const PsfKernel&) const = default;
};

// Block tiling along one axis.
struct AxisTiling {
  int extent = 0;
  int block_size = 0;
  int blocks = 0;
  int leading_margin = 0;

  static AxisTiling make(int extent, int block_size);

  int block_start(int index) const { return leading_margin + index * block_size; }
  int block_center(int index) const { return block_start(index) + block_size / 2; }
  // Index of the block whose center is nearest to `pixel` (clamped).
  int nearest_block(int pixel) const;

  bool operator==(const AxisTiling&) const = default;
};

struct BankKey {
  int plane = 0;
  Channel channel = Channel::kR;
  int block_row = 0;
  int block_col = 0;
};

class PsfBank {
 public:
  PsfBank() = default;
  // Every kernel starts as a delta.
  PsfBank(std::string aperture_name, DepthPlanSpec plan, int sensor_height, int sensor_width,
          int block_size);

  const std::string& aperture_name() const { return aperture_name_; }
  const DepthPlanSpec& plan() const { return plan_; }
  int sensor_height() const { return rows_.extent; }
  int sensor_width() const { return cols_.extent; }
  int block_size() const { return rows_.block_size; }
  int block_rows() const { return rows_.blocks; }
  int block_cols() const { return cols_.blocks; }
  const AxisTiling& row_tiling() const { return rows_; }
  const AxisTiling& col_tiling() const { return cols_; }
  std::size_t kernel_count() const { return kernels_.size(); }
  bool empty() const { return kernels_.empty(); }

  const PsfKernel& kernel(const BankKey& key) const { return kernels_[flat_index(key)]; }
  PsfKernel& kernel(const BankKey& key) { return kernels_[flat_index(key)]; }
  void set_kernel(const BankKey& key, PsfKernel kernel);
  // Assigns the same kernel to every block of every plane and channel.
  void fill(const PsfKernel& kernel);

  // Piecewise-constant lookup: kernel of the block whose center is nearest.
  const PsfKernel& kernel_at(int row, int col, int plane, Channel channel) const;

  // All keys in storage order (plane, channel, block_row, block_col).
  std::vector<BankKey> keys() const;
  std::span<const PsfKernel> kernels() const { return kernels_; }

  bool operator==(const PsfBank&) const = default;

 private:
  std::size_t flat_index(const BankKey& key) const;

  std::string aperture_name_;
  DepthPlanSpec plan_;
  AxisTiling rows_;
  AxisTiling cols_;
  std::vector<PsfKernel> kernels_;
};

struct ImpulseGridSpec {
  int height = 1536;
  int width = 2048;
  int block_size = 51;
  Channel channel = Channel::kR;
};

// Black frame with one full-scale impulse of the target channel at the
// center pixel of every whole block.
RgbImage synthesize_impulse_grid(const ImpulseGridSpec& spec);

// Raised when a block of a response frame contains no signal at all.
class DegenerateBlockError : public Error {
 public:
  DegenerateBlockError(const BankKey& key, const std::string& what)
      : Error("degenerate_block", what), key_(key) {}
  const BankKey& key() const { return key_; }

 private:
  BankKey key_;
};

struct ExtractOptions {
  // Pixels below this fraction of the block maximum are background.
  double background_fraction = 2.0 / 255.0;
};

using FrameKey = std::pair<int, Channel>;  // (plane index, channel)
using FrameSet = std::map<FrameKey, PlanarImage>;

// Measures one kernel per (plane, channel, block) from impulse response
// frames. Only the frame channel matching the key's channel is read.
PsfBank extract_bank(const FrameSet& frames, const DepthPlanSpec& plan, int block_size,
                     std::string aperture_name = {}, const ExtractOptions& options = {});
PsfBank extract_bank(const std::map<FrameKey, RgbImage>& frames, const DepthPlanSpec& plan,
                     int block_size, std::string aperture_name = {},
                     const ExtractOptions& options = {});

// Kernel extraction for a single block window. `window` is row-major with the
// impulse at (impulse_row, impulse_col); exposed for testing.
PsfKernel extract_kernel(std::span<const float> window, int window_height, int window_width,
                         int impulse_row, int impulse_col, int max_support,
                         const ExtractOptions& options = {});

// ---- container I/O ------------------------------------------------------

inline constexpr int kBankFormatVersion = 1;

class BankLoadError : public Error {
 public:
  enum class Reason { kFormat, kVersion, kTruncated, kChecksum };
  BankLoadError(Reason reason, const std::string& what);
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

std::vector<std::uint8_t> serialize_bank(const PsfBank& bank);
PsfBank deserialize_bank(std::span<const std::uint8_t> bytes);

void save_bank(const PsfBank& bank, const std::filesystem::path& path);
PsfBank load_bank(const std::filesystem::path& path);

}  // namespace apsim
