#include <filesystem>
#include <iostream>
#include <memory>

#include "apsim/dataset_io.hpp"
#include "apsim/png_io.hpp"
#include "apsim/replicate.hpp"
#include "common.hpp"

namespace apsim::cli {

namespace fs = std::filesystem;

namespace {

// Exposure compensation for a bank's aperture, 0 dB when the profile does
// not know the aperture.
double profile_gain(const OpticsProfile& profile, const std::string& aperture,
                    const GlobalOptions& global) {
  for (const auto& a : profile.apertures) {
    if (a.name == aperture) return profile.gain_db_of(aperture);
  }
  log_info(global, "aperture '" + aperture + "' not in profile, compensation gain 0 dB");
  return 0.0;
}

std::optional<NoiseModel> load_optional_noise(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_noise_model(path);
}

struct RenderOptions {
  std::string rgb;
  std::string depth;
  std::string bank;
  std::string out;
  std::string noise_model;
  std::string image_id;
  std::string policy = "clamp";
  double gain_db = 0.0;
  std::optional<double> aperture_gain_db;
  double depth_scale = 0.01;
  std::uint64_t seed = 0;
  bool offsets = false;
};

int run_render(const GlobalOptions& global, const RenderOptions& opt) {
  if (!(opt.gain_db >= 0.0)) throw UsageError("--gain must be non-negative");
  if (opt.aperture_gain_db && !(*opt.aperture_gain_db >= 0.0)) {
    throw UsageError("--aperture-gain must be non-negative");
  }
  RenderConfig config;
  config.out_of_range_policy = parse_policy(opt.policy);
  const OpticsProfile profile = load_config(global);
  const PsfBank bank = load_bank(opt.bank);
  const auto noise = load_optional_noise(opt.noise_model);

  config.aperture_name = bank.aperture_name();
  config.gain_db = opt.gain_db;
  config.aperture_gain_db =
      opt.aperture_gain_db ? *opt.aperture_gain_db : profile_gain(profile, bank.aperture_name(), global);
  config.base_seed = opt.seed;
  config.apply_centroid_offset = opt.offsets;
  config.workers = global.workers;

  const RgbImage rgb = read_rgb_png(opt.rgb);
  const DepthMap depth = read_depth_png(opt.depth, opt.depth_scale);
  const std::string id = opt.image_id.empty() ? fs::path(opt.rgb).filename().string() : opt.image_id;
  bool extrapolated = false;
  replica_noise_std(noise, config, &extrapolated);
  if (extrapolated) {
    std::cerr << "warning: noise model extrapolated beyond its measured gain range\n";
  }
  const RgbImage out = render(rgb, depth, bank, noise, config, id);
  if (const fs::path parent = fs::path(opt.out).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  write_rgb_png(opt.out, out);
  log_info(global, "wrote " + opt.out);
  return kExitOk;
}

struct ReplicateCliOptions {
  std::string manifest;
  std::vector<std::string> banks;
  std::string noise_model;
  std::vector<double> gains{0, 30, 40, 48};
  std::string out;
  std::string report_dir;
  std::string policy = "clamp";
  std::uint64_t seed = 0;
  bool offsets = false;
};

int run_replicate(const GlobalOptions& global, const ReplicateCliOptions& opt) {
  for (double g : opt.gains) {
    if (!(g >= 0.0)) throw UsageError("--gain values must be non-negative");
  }
  ReplicateOptions ro;
  ro.out_of_range_policy = parse_policy(opt.policy);
  ro.base_seed = opt.seed;
  ro.apply_centroid_offset = opt.offsets;
  ro.workers = global.workers;

  const OpticsProfile profile = load_config(global);
  std::map<std::string, PsfBank> banks;
  for (const auto& path : opt.banks) {
    PsfBank bank = load_bank(path);
    const std::string name = bank.aperture_name();
    if (name.empty()) throw InputError("bank " + path + " has no aperture name");
    if (banks.count(name)) throw InputError("two banks for aperture '" + name + "'");
    ro.aperture_gain_db[name] = profile_gain(profile, name, global);
    banks.emplace(name, std::move(bank));
  }
  const auto noise = load_optional_noise(opt.noise_model);

  ManifestLoadOptions mo;
  mo.check_files = false;
  const Manifest manifest = load_manifest(opt.manifest, mo);
  log_info(global, "replicating " + std::to_string(manifest.records.size()) + " records");

  const ReplicationReport report = replicate_dataset(manifest, banks, noise, opt.gains, opt.out, ro);
  write_replication_report(report, opt.report_dir.empty() ? opt.out : opt.report_dir);
  std::cout << report.summary();
  if (!report.failures.empty()) {
    std::cerr << "error: replicate: " << report.failures.size() << " replica failures, see report\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace

void add_render_commands(CLI::App& app, const GlobalOptions& global, std::vector<Command>& out) {
  auto ro = std::make_shared<RenderOptions>();
  CLI::App* render_cmd = app.add_subcommand("render", "Render one image through a PSF bank");
  render_cmd->add_option("--rgb", ro->rgb, "8-bit RGB PNG")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--depth", ro->depth, "16-bit depth PNG")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--bank", ro->bank, "PSF bank file")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--out", ro->out, "Output PNG")->required();
  render_cmd->add_option("--noise-model", ro->noise_model, "Noise model JSON")
      ->check(CLI::ExistingFile);
  render_cmd->add_option("--gain", ro->gain_db, "Camera gain in dB (0 = noise-free)")
      ->capture_default_str();
  render_cmd->add_option("--aperture-gain", ro->aperture_gain_db,
                         "Exposure compensation in dB (default from the profile)");
  render_cmd->add_option("--depth-scale", ro->depth_scale, "Meters per depth unit")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  render_cmd->add_option("--seed", ro->seed, "Base noise seed")->capture_default_str();
  render_cmd->add_option("--image-id", ro->image_id, "Seed identity (default: RGB file name)");
  render_cmd->add_option("--out-of-range", ro->policy, "Depths outside the planes: clamp|passthrough")
      ->capture_default_str();
  render_cmd->add_flag("--offsets", ro->offsets, "Apply kernel centroid offsets");
  out.push_back({render_cmd, [&global, ro] { return run_render(global, *ro); }});

  auto rp = std::make_shared<ReplicateCliOptions>();
  CLI::App* rep = app.add_subcommand("replicate", "Render a manifest for every bank and gain level");
  rep->add_option("--manifest", rp->manifest, "Manifest JSON")->required()->check(CLI::ExistingFile);
  rep->add_option("--bank", rp->banks, "PSF bank file, one per aperture; repeatable")
      ->required()
      ->check(CLI::ExistingFile);
  rep->add_option("--noise-model", rp->noise_model, "Noise model JSON")->check(CLI::ExistingFile);
  rep->add_option("--gain", rp->gains, "Camera gain levels in dB; repeatable")
      ->capture_default_str();
  rep->add_option("--out", rp->out, "Output root")->required();
  rep->add_option("--report-dir", rp->report_dir, "Report directory (default: output root)");
  rep->add_option("--seed", rp->seed, "Base noise seed")->capture_default_str();
  rep->add_option("--out-of-range", rp->policy, "Depths outside the planes: clamp|passthrough")
      ->capture_default_str();
  rep->add_flag("--offsets", rp->offsets, "Apply kernel centroid offsets");
  out.push_back({rep, [&global, rp] { return run_replicate(global, *rp); }});
}

}  // namespace apsim::cli
