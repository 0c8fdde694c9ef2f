#include "apsim/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "apsim/csv.hpp"
#include "apsim/error.hpp"

namespace apsim {

void NoiseModel::validate() const {
  if (!(gain_max_db >= gain_min_db)) throw ConfigError("noise model gain range is inverted");
  for (const auto& c : channels) {
    if (!(c.amplitude > 0.0) || !std::isfinite(c.amplitude) || !std::isfinite(c.rate)) {
      throw ConfigError("noise model amplitude must be positive and rate finite");
    }
    if (!std::isfinite(c.amplitude * std::exp(c.rate * gain_max_db)) ||
        !std::isfinite(c.amplitude * std::exp(c.rate * gain_min_db))) {
      throw ConfigError("noise model overflows over its gain range");
    }
  }
}

NoiseModel fit_noise_model(const NoiseMeasurements& measurements) {
  NoiseModel model;
  model.gain_min_db = std::numeric_limits<double>::infinity();
  model.gain_max_db = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < 3; ++c) {
    const auto& pts = measurements[c];
    const char letter = channel_letter(kChannels[c]);
    if (pts.size() < 2) {
      throw FitError(std::string("channel ") + letter + " needs at least 2 measurements");
    }
    double sg = 0, sl = 0;
    for (const auto& m : pts) {
      if (!(m.std_gray > 0.0)) {
        throw FitError(std::string("channel ") + letter + " has a non-positive std");
      }
      sg += m.gain_db;
      sl += std::log(m.std_gray);
      model.gain_min_db = std::min(model.gain_min_db, m.gain_db);
      model.gain_max_db = std::max(model.gain_max_db, m.gain_db);
    }
    const double n = static_cast<double>(pts.size());
    const double mg = sg / n;
    const double ml = sl / n;
    double sgg = 0, sgl = 0;
    for (const auto& m : pts) {
      sgg += (m.gain_db - mg) * (m.gain_db - mg);
      sgl += (m.gain_db - mg) * (std::log(m.std_gray) - ml);
    }
    if (sgg == 0.0) {
      throw FitError(std::string("channel ") + letter + " needs at least 2 distinct gains");
    }
    model.channels[c].rate = sgl / sgg;
    model.channels[c].amplitude = std::exp(ml - model.channels[c].rate * mg);
  }
  model.validate();
  return model;
}

NoiseStd noise_std_for_gain(const NoiseModel& model, double gain_db, Channel channel) {
  const auto& c = model.channels[index_of(channel)];
  return {c.amplitude * std::exp(c.rate * gain_db),
          gain_db < model.gain_min_db || gain_db > model.gain_max_db};
}

NoiseMeasurements read_noise_measurements(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> expected = {"gain_db", "std_r", "std_g", "std_b"};
  if (table.header != expected) {
    throw InputError(path.string() + ": expected header gain_db,std_r,std_g,std_b");
  }
  NoiseMeasurements out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    double values[4];
    for (int k = 0; k < 4; ++k) {
      try {
        std::size_t used = 0;
        values[k] = std::stod(row[k], &used);
        if (used != row[k].size()) throw std::invalid_argument(row[k]);
      } catch (const std::exception&) {
        throw InputError(path.string() + ": row " + std::to_string(i + 1) + " column " +
                         expected[k] + " is not a number");
      }
    }
    for (int c = 0; c < 3; ++c) out[c].push_back({values[0], values[c + 1]});
  }
  return out;
}

std::string noise_model_to_json(const NoiseModel& model) {
  nlohmann::json j;
  for (Channel c : kChannels) {
    const auto& curve = model.channels[index_of(c)];
    j["channels"][std::string(1, channel_letter(c))] = {{"amplitude", curve.amplitude},
                                                        {"rate_per_db", curve.rate}};
  }
  j["valid_gain_range_db"] = {model.gain_min_db, model.gain_max_db};
  return j.dump(2) + "\n";
}

NoiseModel parse_noise_model(const std::string& json_text) {
  NoiseModel model;
  try {
    const auto j = nlohmann::json::parse(json_text);
    for (Channel c : kChannels) {
      const auto& jc = j.at("channels").at(std::string(1, channel_letter(c)));
      model.channels[index_of(c)] = {jc.at("amplitude").get<double>(),
                                     jc.at("rate_per_db").get<double>()};
    }
    model.gain_min_db = j.at("valid_gain_range_db").at(0).get<double>();
    model.gain_max_db = j.at("valid_gain_range_db").at(1).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid noise model: ") + e.what());
  }
  model.validate();
  return model;
}

NoiseModel load_noise_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open noise model " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_noise_model(ss.str());
}

void save_noise_model(const NoiseModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write noise model " + path.string());
  out << noise_model_to_json(model);
}

namespace {

// Box-Muller over 53-bit uniforms from mt19937_64; both engine and transform
// are fully specified, unlike std::normal_distribution.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

RgbImage add_awgn(const PlanarImage& image, const std::array<double, 3>& std_per_channel,
                  std::uint64_t seed) {
  for (double s : std_per_channel) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("noise std must be non-negative");
  }
  RgbImage out(image.width(), image.height());
  auto dst = out.data();
  GaussianSource gauss(seed);
  const std::size_t n = image.pixel_count();
  const std::array<std::span<const float>, 3> planes = {
      image.plane(Channel::kR), image.plane(Channel::kG), image.plane(Channel::kB)};
  const bool silent = std_per_channel[0] == 0.0 && std_per_channel[1] == 0.0 &&
                      std_per_channel[2] == 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      double v = planes[c][i];
      if (!silent) v += std_per_channel[c] * gauss.next();
      v = std::nearbyint(std::clamp(v, 0.0, 255.0));
      dst[i * 3 + c] = static_cast<std::uint8_t>(v);
    }
  }
  return out;
}

}  // namespace apsim
