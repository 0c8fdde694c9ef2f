#include "common.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

namespace apsim::cli {

OpticsProfile load_config(const GlobalOptions& global) {
  if (global.config_path.empty()) return OpticsProfile::reference();
  return load_profile(global.config_path);
}

OutOfRangePolicy parse_policy(const std::string& text) {
  if (text == "clamp") return OutOfRangePolicy::kClampToNearestPlane;
  if (text == "passthrough") return OutOfRangePolicy::kPassthrough;
  throw UsageError("--out-of-range must be 'clamp' or 'passthrough'");
}

std::string format_number(double value) {
  if (value == std::floor(value) && std::abs(value) < 1e15) {
    return std::to_string(static_cast<long long>(value));
  }
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

void log_info(const GlobalOptions& global, const std::string& message) {
  if (global.verbosity > 0) std::cerr << message << "\n";
}

}  // namespace apsim::cli
