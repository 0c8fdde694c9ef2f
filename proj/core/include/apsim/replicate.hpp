#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apsim/dataset_io.hpp"
#include "apsim/noise.hpp"
#include "apsim/psf_bank.hpp"
#include "apsim/render.hpp"

namespace apsim {

struct ReplicateOptions {
  std::uint64_t base_seed = 0;
  // Exposure compensation per aperture name; missing names get 0 dB.
  std::map<std::string, double> aperture_gain_db;
  OutOfRangePolicy out_of_range_policy = OutOfRangePolicy::kClampToNearestPlane;
  bool apply_centroid_offset = false;
  // Images rendered concurrently (0 = hardware concurrency).
  unsigned workers = 1;
};

struct ReplicaCount {
  std::string aperture;
  double gain_db = 0.0;
  int written = 0;
};

struct SkippedEntry {
  std::string record_id;
  std::string reason;
};

struct FailedEntry {
  std::string record_id;
  std::string aperture;
  std::optional<double> gain_db;
  std::string message;
};

struct ReplicationReport {
  std::string dataset_name;
  std::filesystem::path output_root;
  std::size_t images_total = 0;
  std::vector<ReplicaCount> replicas;
  std::vector<SkippedEntry> skipped;
  std::vector<FailedEntry> failures;
  std::vector<std::filesystem::path> outputs;  // relative to output_root, sorted
  bool noise_extrapolated = false;
  double wall_time_s = 0.0;

  std::size_t outputs_written() const { return outputs.size(); }
  std::string to_json() const;
  std::string summary() const;
};

// Directory name of a gain level: "12" for integral values, otherwise the
// shortest decimal form ("4.5").
std::string gain_directory_name(double gain_db);

// Renders every record for each (aperture, gain) into
// <output_root>/<aperture>/<gain>/<record rgb path>, copies annotation files
// unchanged into each replica tree and returns the report. Records without a
// readable depth map are skipped; per-image read or render failures are
// reported and the run continues. Failing to write output throws IoError.
ReplicationReport replicate_dataset(const Manifest& manifest,
                                    const std::map<std::string, PsfBank>& banks,
                                    const std::optional<NoiseModel>& noise_model,
                                    const std::vector<double>& gains_db,
                                    const std::filesystem::path& output_root,
                                    const ReplicateOptions& options = {});

// Writes replication_report.json and replication_summary.txt.
void write_replication_report(const ReplicationReport& report, const std::filesystem::path& dir);

}  // namespace apsim
