#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>

#include "apsim/png_io.hpp"
#include "apsim/psf_bank.hpp"
#include "common.hpp"

namespace apsim::cli {

namespace fs = std::filesystem;

namespace {

std::vector<Channel> parse_channels(const std::vector<std::string>& names) {
  if (names.empty()) return {kChannels.begin(), kChannels.end()};
  std::vector<Channel> out;
  for (const auto& n : names) {
    try {
      out.push_back(parse_channel(n));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

void check_tiling(int height, int width, int block_size) {
  try {
    AxisTiling::make(height, block_size);
    AxisTiling::make(width, block_size);
  } catch (const Error& e) {
    throw UsageError(std::string("invalid --block-size: ") + e.what());
  }
}

struct SynthOptions {
  std::string out_dir;
  int height = 1536;
  int width = 2048;
  int block_size = 51;
  std::vector<std::string> channels;
};

int run_synth(const GlobalOptions& global, const SynthOptions& opt) {
  check_tiling(opt.height, opt.width, opt.block_size);
  const auto channels = parse_channels(opt.channels);
  fs::create_directories(opt.out_dir);
  for (Channel c : channels) {
    ImpulseGridSpec spec{opt.height, opt.width, opt.block_size, c};
    const fs::path path = fs::path(opt.out_dir) / (std::string("impulse_") + channel_letter(c) + ".png");
    write_rgb_png(path, synthesize_impulse_grid(spec));
    log_info(global, "wrote " + path.string());
    std::cout << path.string() << "\n";
  }
  return kExitOk;
}

struct ExtractOptions {
  std::string frames_dir;
  std::string out;
  std::string aperture;
  int block_size = 51;
  std::vector<double> distances_m;
  double background_fraction = 2.0 / 255.0;
};

int run_extract(const GlobalOptions& global, const ExtractOptions& opt) {
  if (opt.block_size <= 0 || opt.block_size % 2 == 0) {
    throw UsageError("--block-size must be a positive odd number");
  }
  if (!(opt.background_fraction >= 0.0 && opt.background_fraction < 1.0)) {
    throw UsageError("--background-fraction must be in [0, 1)");
  }
  DepthPlanSpec plan = DepthPlanSpec::standard();
  if (!opt.distances_m.empty()) plan.distances_m = opt.distances_m;
  try {
    plan.validate();
  } catch (const Error& e) {
    throw UsageError(std::string("invalid --distance list: ") + e.what());
  }

  FrameSet frames;
  for (std::size_t p = 0; p < plan.size(); ++p) {
    for (Channel c : kChannels) {
      const fs::path path = fs::path(opt.frames_dir) / format_number(plan.distances_m[p]) /
                            (std::string(1, channel_letter(c)) + ".png");
      if (!fs::exists(path)) {
        throw InputError("missing response frame for plane " + std::to_string(p) + " (" +
                         format_number(plan.distances_m[p]) + " m) channel " + channel_letter(c) +
                         ": " + path.string());
      }
      frames.emplace(FrameKey{static_cast<int>(p), c}, read_planar_png(path));
    }
    log_info(global, "loaded plane " + format_number(plan.distances_m[p]) + " m");
  }

  apsim::ExtractOptions eo;
  eo.background_fraction = opt.background_fraction;
  const PsfBank bank = extract_bank(frames, plan, opt.block_size, opt.aperture, eo);
  save_bank(bank, opt.out);

  std::cout << "plane distance_m channel kernels mean_height mean_width mean_offset_px max_offset_px\n";
  for (std::size_t p = 0; p < plan.size(); ++p) {
    for (Channel c : kChannels) {
      double sum_h = 0, sum_w = 0, sum_off = 0, max_off = 0;
      int n = 0;
      for (int r = 0; r < bank.block_rows(); ++r) {
        for (int col = 0; col < bank.block_cols(); ++col) {
          const PsfKernel& k = bank.kernel({static_cast<int>(p), c, r, col});
          const double off = std::hypot(k.offset_dx, k.offset_dy);
          sum_h += k.height;
          sum_w += k.width;
          sum_off += off;
          max_off = std::max(max_off, off);
          ++n;
        }
      }
      std::cout << p << " " << format_number(plan.distances_m[p]) << " " << channel_letter(c) << " "
                << n << " " << fixed(sum_h / n, 2) << " " << fixed(sum_w / n, 2) << " "
                << fixed(sum_off / n, 3) << " " << fixed(max_off, 3) << "\n";
    }
  }
  log_info(global, "wrote " + opt.out);
  return kExitOk;
}

}  // namespace

void add_psf_commands(CLI::App& app, const GlobalOptions& global, std::vector<Command>& out) {
  CLI::App* psf = app.add_subcommand("psf", "Impulse grids and PSF kernel banks");
  psf->require_subcommand(1);

  auto so = std::make_shared<SynthOptions>();
  CLI::App* synth = psf->add_subcommand("synth", "Write impulse-grid target images, one per channel");
  synth->add_option("--out", so->out_dir, "Output directory")->required();
  synth->add_option("--height", so->height, "Image height")->capture_default_str();
  synth->add_option("--width", so->width, "Image width")->capture_default_str();
  synth->add_option("--block-size", so->block_size, "Odd block size")->capture_default_str();
  synth->add_option("--channel", so->channels, "Channels R, G, B (default all); repeatable");
  out.push_back({synth, [&global, so] { return run_synth(global, *so); }});

  auto eo = std::make_shared<ExtractOptions>();
  CLI::App* extract =
      psf->add_subcommand("extract", "Measure a kernel bank from <dist_m>/<channel>.png frames");
  extract->add_option("--frames", eo->frames_dir, "Frame directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  extract->add_option("--out", eo->out, "Output bank file")->required();
  extract->add_option("--aperture", eo->aperture, "Aperture name stored in the bank")->required();
  extract->add_option("--block-size", eo->block_size, "Odd block size")->capture_default_str();
  extract->add_option("--distance", eo->distances_m,
                      "Plane distances in meters (default 10..100 step 5); repeatable");
  extract->add_option("--background-fraction", eo->background_fraction,
                      "Threshold relative to the block maximum")
      ->capture_default_str();
  out.push_back({extract, [&global, eo] { return run_extract(global, *eo); }});
}

}  // namespace apsim::cli
