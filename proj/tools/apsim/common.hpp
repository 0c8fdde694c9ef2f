#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "apsim/profile.hpp"
#include "apsim/render.hpp"

namespace apsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Bad flag values detected before any work starts.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string config_path;
  unsigned workers = 1;
  int verbosity = 0;
};

using Runner = std::function<int()>;

struct Command {
  CLI::App* app = nullptr;
  Runner run;
};

// Built-in profile, overridden by the config file when one is given.
OpticsProfile load_config(const GlobalOptions& global);

OutOfRangePolicy parse_policy(const std::string& text);

// "45" for integral values, otherwise the shortest round-trip decimal.
std::string format_number(double value);
std::string fixed(double value, int decimals);

void log_info(const GlobalOptions& global, const std::string& message);

void add_geometry_command(CLI::App& app, const GlobalOptions& global, std::vector<Command>& out);
void add_psf_commands(CLI::App& app, const GlobalOptions& global, std::vector<Command>& out);
void add_render_commands(CLI::App& app, const GlobalOptions& global, std::vector<Command>& out);
void add_noise_commands(CLI::App& app, const GlobalOptions& global, std::vector<Command>& out);
void add_stats_command(CLI::App& app, const GlobalOptions& global, std::vector<Command>& out);

}  // namespace apsim::cli
