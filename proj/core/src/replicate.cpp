#include "apsim/replicate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "apsim/parallel.hpp"
#include "apsim/png_io.hpp"

namespace apsim {

using nlohmann::json;
namespace fs = std::filesystem;

std::string gain_directory_name(double gain_db) {
  if (!std::isfinite(gain_db)) throw ConfigError("gain must be finite");
  if (gain_db == std::floor(gain_db) && std::abs(gain_db) < 1e15) {
    return std::to_string(static_cast<long long>(gain_db));
  }
  std::ostringstream ss;
  ss.precision(15);
  ss << gain_db;
  return ss.str();
}

namespace {

struct ImageOutcome {
  std::optional<SkippedEntry> skipped;
  std::vector<FailedEntry> failures;
  std::vector<fs::path> outputs;
  bool extrapolated = false;
};

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string{}));
  }
}

}  // namespace

ReplicationReport replicate_dataset(const Manifest& manifest,
                                    const std::map<std::string, PsfBank>& banks,
                                    const std::optional<NoiseModel>& noise_model,
                                    const std::vector<double>& gains_db,
                                    const fs::path& output_root,
                                    const ReplicateOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (banks.empty()) throw ConfigError("replication needs at least one PSF bank");
  if (gains_db.empty()) throw ConfigError("replication needs at least one gain level");
  std::set<std::string> gain_names;
  for (double g : gains_db) {
    if (!(g >= 0.0)) throw ConfigError("gain levels must be non-negative");
    if (!gain_names.insert(gain_directory_name(g)).second) {
      throw ConfigError("duplicate gain level " + gain_directory_name(g));
    }
  }
  for (const auto& [name, bank] : banks) {
    if (name.empty() || name.find('/') != std::string::npos || name == "." || name == "..") {
      throw ConfigError("aperture name '" + name + "' is not usable as a directory name");
    }
  }
  if (noise_model) noise_model->validate();

  for (const auto& [name, bank] : banks) {
    for (double g : gains_db) ensure_directory(output_root / name / gain_directory_name(g));
  }

  const std::size_t n = manifest.records.size();
  std::vector<ImageOutcome> outcomes(n);

  parallel_for(n, options.workers, [&](std::size_t i) {
    const SceneRecord& rec = manifest.records[i];
    ImageOutcome& out = outcomes[i];
    if (rec.depth_path.empty()) {
      out.skipped = SkippedEntry{rec.id, "no depth map paired with the RGB image"};
      return;
    }
    if (!fs::exists(rec.depth_path)) {
      out.skipped = SkippedEntry{rec.id, "depth map " + rec.depth_path.string() + " not found"};
      return;
    }
    RgbImage rgb;
    DepthMap depth;
    try {
      rgb = read_rgb_png(rec.rgb_path);
      depth = read_depth_png(rec.depth_path, rec.depth_scale);
    } catch (const Error& e) {
      out.failures.push_back({rec.id, {}, std::nullopt, e.kind() + ": " + e.what()});
      return;
    }
    if (rgb.width() != depth.width() || rgb.height() != depth.height()) {
      out.skipped = SkippedEntry{rec.id, "depth map resolution differs from the RGB image"};
      return;
    }
    const std::string seed_id = rec.relative_rgb.generic_string();

    for (const auto& [aperture, bank] : banks) {
      RenderConfig config;
      config.aperture_name = aperture;
      config.base_seed = options.base_seed;
      config.out_of_range_policy = options.out_of_range_policy;
      config.apply_centroid_offset = options.apply_centroid_offset;
      if (auto it = options.aperture_gain_db.find(aperture); it != options.aperture_gain_db.end()) {
        config.aperture_gain_db = it->second;
      }
      // The filtered image does not depend on the gain level, so it is
      // computed once per aperture. The remaining stages match render().
      PlanarImage gained;
      try {
        const PlanarImage filtered = filter_image(rgb, depth, bank, config);
        gained = apply_gain(attenuate_exposure(filtered, config.aperture_gain_db),
                            config.aperture_gain_db);
      } catch (const Error& e) {
        out.failures.push_back({rec.id, aperture, std::nullopt, e.kind() + ": " + e.what()});
        continue;
      }
      for (double g : gains_db) {
        config.gain_db = g;
        bool extrapolated = false;
        const auto stds = replica_noise_std(noise_model, config, &extrapolated);
        out.extrapolated = out.extrapolated || extrapolated;
        const RgbImage replica =
            add_awgn(gained, stds, derive_seed(config.base_seed, seed_id, aperture, g));
        const fs::path rel = fs::path(aperture) / gain_directory_name(g) / rec.relative_rgb;
        ensure_directory((output_root / rel).parent_path());
        write_rgb_png(output_root / rel, replica);
        out.outputs.push_back(rel);
      }
    }
  });

  ReplicationReport report;
  report.dataset_name = manifest.dataset_name;
  report.output_root = output_root;
  report.images_total = n;
  for (const auto& [aperture, bank] : banks) {
    for (double g : gains_db) report.replicas.push_back({aperture, g, 0});
  }
  std::set<fs::path> annotations;
  for (std::size_t i = 0; i < n; ++i) {
    ImageOutcome& o = outcomes[i];
    if (o.skipped) {
      report.skipped.push_back(*o.skipped);
      continue;
    }
    for (auto& f : o.failures) report.failures.push_back(std::move(f));
    for (auto& p : o.outputs) {
      auto it = p.begin();
      const std::string aperture = it->string();
      const std::string gain = (++it)->string();
      for (auto& rc : report.replicas) {
        if (rc.aperture == aperture && gain_directory_name(rc.gain_db) == gain) ++rc.written;
      }
      report.outputs.push_back(std::move(p));
    }
    report.noise_extrapolated = report.noise_extrapolated || o.extrapolated;
    const SceneRecord& rec = manifest.records[i];
    if (!rec.annotation_path.empty() && !o.outputs.empty()) annotations.insert(rec.relative_annotation);
  }

  // Annotation files can be shared between records, so they are copied once
  // per replica tree after rendering.
  for (const fs::path& rel : annotations) {
    const fs::path src = manifest.root / rel;
    if (!fs::exists(src)) {
      report.failures.push_back({{}, {}, std::nullopt, "annotation file " + src.string() + " not found"});
      continue;
    }
    for (const auto& [aperture, bank] : banks) {
      for (double g : gains_db) {
        const fs::path dst = output_root / aperture / gain_directory_name(g) / rel;
        ensure_directory(dst.parent_path());
        std::error_code ec;
        fs::copy_file(src, dst, fs::copy_options::overwrite_existing, ec);
        if (ec) throw IoError("cannot write " + dst.string() + ": " + ec.message());
      }
    }
  }

  std::sort(report.outputs.begin(), report.outputs.end());
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string ReplicationReport::to_json() const {
  json j;
  j["dataset_name"] = dataset_name;
  j["output_root"] = output_root.generic_string();
  j["images_total"] = images_total;
  j["outputs_written"] = outputs.size();
  j["noise_extrapolated"] = noise_extrapolated;
  j["wall_time_s"] = wall_time_s;
  j["replicas"] = json::array();
  for (const auto& r : replicas) {
    j["replicas"].push_back({{"aperture", r.aperture}, {"gain_db", r.gain_db}, {"written", r.written}});
  }
  j["skipped"] = json::array();
  for (const auto& s : skipped) j["skipped"].push_back({{"id", s.record_id}, {"reason", s.reason}});
  j["failures"] = json::array();
  for (const auto& f : failures) {
    json e{{"id", f.record_id}, {"message", f.message}};
    if (!f.aperture.empty()) e["aperture"] = f.aperture;
    if (f.gain_db) e["gain_db"] = *f.gain_db;
    j["failures"].push_back(e);
  }
  j["outputs"] = json::array();
  for (const auto& p : outputs) j["outputs"].push_back(p.generic_string());
  return j.dump(2) + "\n";
}

std::string ReplicationReport::summary() const {
  std::ostringstream ss;
  ss << "dataset: " << (dataset_name.empty() ? "(unnamed)" : dataset_name) << "\n";
  ss << "images: " << images_total << ", skipped: " << skipped.size()
     << ", failures: " << failures.size() << "\n";
  ss << "replicas written: " << outputs.size() << "\n";
  for (const auto& r : replicas) {
    ss << "  " << r.aperture << " @ " << gain_directory_name(r.gain_db) << " dB: " << r.written
       << "\n";
  }
  for (const auto& s : skipped) ss << "skipped " << s.record_id << ": " << s.reason << "\n";
  for (const auto& f : failures) {
    ss << "failed " << (f.record_id.empty() ? "-" : f.record_id);
    if (!f.aperture.empty()) ss << " (" << f.aperture << ")";
    ss << ": " << f.message << "\n";
  }
  if (noise_extrapolated) ss << "warning: noise model extrapolated beyond its measured gain range\n";
  ss.setf(std::ios::fixed);
  ss.precision(2);
  ss << "wall time: " << wall_time_s << " s\n";
  return ss.str();
}

void write_replication_report(const ReplicationReport& report, const fs::path& dir) {
  ensure_directory(dir);
  auto write = [](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("cannot write " + path.string());
  };
  write(dir / "replication_report.json", report.to_json());
  write(dir / "replication_summary.txt", report.summary());
}

}  // namespace apsim
