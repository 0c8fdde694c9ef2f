#include "apsim/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "apsim/error.hpp"

namespace apsim {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw IoError(std::string("cannot open ") + path.string() + " (" +
                  (mode[0] == 'r' ? "read" : "write") + ")");
  }
  return f;
}

// Decoded image in file sample order. Samples are widened to 16 bits.
struct Decoded {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<std::uint16_t> samples;
};

class PngReader {
 public:
  explicit PngReader(const std::filesystem::path& path) : path_(path), file_(open_file(path, "rb")) {
    png_byte sig[8];
    if (std::fread(sig, 1, 8, file_.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
      throw IoError(path.string() + " is not a PNG file");
    }
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png_) throw IoError("png_create_read_struct failed");
    info_ = png_create_info_struct(png_);
    if (!info_) {
      png_destroy_read_struct(&png_, nullptr, nullptr);
      throw IoError("png_create_info_struct failed");
    }
  }
  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  // Returns false on a libpng error; out is partially filled in that case.
  bool decode(Decoded& out, bool header_only) {
    std::vector<png_bytep>& rows = rows_;
    if (setjmp(png_jmpbuf(png_))) return false;
    png_init_io(png_, file_.get());
    png_set_sig_bytes(png_, 8);
    png_read_info(png_, info_);
    out.width = static_cast<int>(png_get_image_width(png_, info_));
    out.height = static_cast<int>(png_get_image_height(png_, info_));
    out.bit_depth = png_get_bit_depth(png_, info_);
    const int color_type = png_get_color_type(png_, info_);
    if (header_only) {
      out.channels = png_get_channels(png_, info_);
      return true;
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png_);
    if (color_type == PNG_COLOR_TYPE_GRAY && out.bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png_);
    if (png_get_valid(png_, info_, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png_);
    if (out.bit_depth == 16) png_set_swap(png_);  // host little-endian samples
    png_read_update_info(png_, info_);
    out.bit_depth = png_get_bit_depth(png_, info_);
    out.channels = png_get_channels(png_, info_);
    const std::size_t rowbytes = png_get_rowbytes(png_, info_);
    raw_.assign(rowbytes * out.height, 0);
    rows.resize(out.height);
    for (int r = 0; r < out.height; ++r) rows[r] = raw_.data() + rowbytes * r;
    png_read_image(png_, rows.data());
    png_read_end(png_, nullptr);
    return true;
  }

  void read(Decoded& out, bool header_only = false) {
    if (!decode(out, header_only)) throw IoError("corrupt PNG: " + path_.string());
    if (header_only) return;
    const std::size_t n = static_cast<std::size_t>(out.width) * out.height * out.channels;
    out.samples.resize(n);
    if (out.bit_depth == 16) {
      for (std::size_t i = 0; i < n; ++i) {
        out.samples[i] = static_cast<std::uint16_t>(raw_[2 * i] | (raw_[2 * i + 1] << 8));
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) out.samples[i] = raw_[i];
    }
  }

 private:
  std::filesystem::path path_;
  FilePtr file_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
  std::vector<png_byte> raw_;
  std::vector<png_bytep> rows_;
};

class PngWriter {
 public:
  explicit PngWriter(const std::filesystem::path& path) : path_(path), file_(open_file(path, "wb")) {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png_) throw IoError("png_create_write_struct failed");
    info_ = png_create_info_struct(png_);
    if (!info_) {
      png_destroy_write_struct(&png_, nullptr);
      throw IoError("png_create_info_struct failed");
    }
  }
  ~PngWriter() { png_destroy_write_struct(&png_, &info_); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;

  // bytes holds big-endian samples for 16-bit images.
  void write(int width, int height, int bit_depth, int color_type, std::size_t rowbytes,
             const std::vector<png_byte>& bytes) {
    rows_.resize(height);
    for (int r = 0; r < height; ++r) {
      rows_[r] = const_cast<png_bytep>(bytes.data() + rowbytes * r);
    }
    if (!encode(width, height, bit_depth, color_type)) {
      throw IoError("failed writing PNG " + path_.string());
    }
    if (std::fflush(file_.get()) != 0) throw IoError("failed flushing " + path_.string());
  }

 private:
  bool encode(int width, int height, int bit_depth, int color_type) {
    if (setjmp(png_jmpbuf(png_))) return false;
    png_init_io(png_, file_.get());
    png_set_IHDR(png_, info_, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png_, 6);
    png_write_info(png_, info_);
    png_write_image(png_, rows_.data());
    png_write_end(png_, nullptr);
    return true;
  }

  std::filesystem::path path_;
  FilePtr file_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
  std::vector<png_bytep> rows_;
};

Decoded decode_file(const std::filesystem::path& path) {
  Decoded d;
  PngReader(path).read(d);
  return d;
}

}  // namespace

PngInfo read_png_info(const std::filesystem::path& path) {
  Decoded d;
  PngReader(path).read(d, /*header_only=*/true);
  return {d.width, d.height, d.bit_depth, d.channels};
}

RgbImage read_rgb_png(const std::filesystem::path& path) {
  const Decoded d = decode_file(path);
  RgbImage img(d.width, d.height);
  auto dst = img.data();
  const int shift = d.bit_depth == 16 ? 8 : 0;
  const std::size_t n = img.pixel_count();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint16_t* px = &d.samples[i * d.channels];
    for (int c = 0; c < 3; ++c) {
      const std::uint16_t v = d.channels >= 3 ? px[c] : px[0];
      dst[i * 3 + c] = static_cast<std::uint8_t>(v >> shift);
    }
  }
  return img;
}

PlanarImage read_planar_png(const std::filesystem::path& path) {
  const Decoded d = decode_file(path);
  PlanarImage img(d.width, d.height);
  const float scale = d.bit_depth == 16 ? 255.0f / 65535.0f : 1.0f;
  const std::size_t n = img.pixel_count();
  for (Channel c : kChannels) {
    auto plane = img.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint16_t* px = &d.samples[i * d.channels];
      plane[i] = (d.channels >= 3 ? px[index_of(c)] : px[0]) * scale;
    }
  }
  return img;
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image) {
  const std::size_t rowbytes = static_cast<std::size_t>(image.width()) * 3;
  std::vector<png_byte> bytes(image.data().begin(), image.data().end());
  PngWriter(path).write(image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB, rowbytes, bytes);
}

DepthMap read_depth_png(const std::filesystem::path& path, double depth_scale) {
  const Decoded d = decode_file(path);
  if (d.channels != 1) {
    throw InputError("depth map " + path.string() + " must be single-channel");
  }
  DepthMap depth(d.width, d.height, depth_scale);
  auto values = depth.values();
  const bool widen = d.bit_depth != 16;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = widen ? static_cast<std::uint16_t>(d.samples[i] * 257) : d.samples[i];
  }
  return depth;
}

void write_depth_png(const std::filesystem::path& path, const DepthMap& depth) {
  const auto values = depth.values();
  const std::size_t rowbytes = static_cast<std::size_t>(depth.width()) * 2;
  std::vector<png_byte> bytes(values.size() * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    bytes[2 * i] = static_cast<png_byte>(values[i] >> 8);
    bytes[2 * i + 1] = static_cast<png_byte>(values[i] & 0xff);
  }
  PngWriter(path).write(depth.width(), depth.height(), 16, PNG_COLOR_TYPE_GRAY, rowbytes, bytes);
}

}  // namespace apsim
