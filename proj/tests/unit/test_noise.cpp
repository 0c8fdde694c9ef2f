#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "apsim/error.hpp"
#include "apsim/noise.hpp"
#include "oracles.hpp"

using namespace apsim;
using namespace apsim::testing;

namespace {

NoiseMeasurements exact_measurements(double a, double b) {
  NoiseMeasurements m;
  for (auto& ch : m) {
    for (double g : {0.0, 10.0, 20.0, 30.0, 40.0, 48.0}) ch.push_back({g, a * std::exp(b * g)});
  }
  return m;
}

NoiseModel simple_model(double a, double b) {
  NoiseModel m;
  for (auto& ch : m.channels) ch = {a, b};
  m.gain_min_db = 0;
  m.gain_max_db = 48;
  return m;
}

}  // namespace

TEST(NoiseFit, ExactRecovery) {
  const NoiseModel m = fit_noise_model(exact_measurements(0.5, 0.08));
  for (const auto& ch : m.channels) {
    EXPECT_NEAR(ch.amplitude, 0.5, 1e-9);
    EXPECT_NEAR(ch.rate, 0.08, 1e-9);
  }
  EXPECT_DOUBLE_EQ(m.gain_min_db, 0.0);
  EXPECT_DOUBLE_EQ(m.gain_max_db, 48.0);
}

TEST(NoiseFit, JitteredWithinTwoPercent) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  for (int trial = 0; trial < 50; ++trial) {
    NoiseMeasurements m = exact_measurements(0.5, 0.08);
    for (auto& ch : m) {
      for (auto& p : ch) p.std_gray *= 1.0 + jitter(rng);
    }
    const NoiseModel fit = fit_noise_model(m);
    for (const auto& ch : fit.channels) {
      EXPECT_NEAR(ch.amplitude, 0.5, 0.02 * 0.5);
      EXPECT_NEAR(ch.rate, 0.08, 0.02 * 0.08);
    }
  }
}

TEST(NoiseFit, Errors) {
  NoiseMeasurements one;
  for (auto& ch : one) ch.push_back({0, 1});
  EXPECT_THROW(fit_noise_model(one), FitError);
  NoiseMeasurements same_gain;
  for (auto& ch : same_gain) ch = {{10, 1}, {10, 2}};
  EXPECT_THROW(fit_noise_model(same_gain), FitError);
  NoiseMeasurements zero = exact_measurements(0.5, 0.08);
  zero[1][2].std_gray = 0.0;
  EXPECT_THROW(fit_noise_model(zero), FitError);
}

TEST(NoiseStdForGain, Examples) {
  const NoiseModel m = simple_model(0.5, 0.08);
  EXPECT_DOUBLE_EQ(noise_std_for_gain(m, 0, Channel::kR).std_gray, 0.5);
  EXPECT_NEAR(noise_std_for_gain(m, 48, Channel::kG).std_gray, 23.26274, 1e-5);
  EXPECT_FALSE(noise_std_for_gain(m, 48, Channel::kG).extrapolated);
  EXPECT_TRUE(noise_std_for_gain(m, 50, Channel::kG).extrapolated);
  double prev = 0;
  for (double g = 0; g <= 60; g += 0.5) {
    const double s = noise_std_for_gain(m, g, Channel::kB).std_gray;
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(NoiseModelJson, RoundTrip) {
  NoiseModel m = simple_model(0.5, 0.08);
  m.channels[2] = {0.61, 0.0791};
  const NoiseModel back = parse_noise_model(noise_model_to_json(m));
  for (int c = 0; c < 3; ++c) {
    EXPECT_DOUBLE_EQ(back.channels[c].amplitude, m.channels[c].amplitude);
    EXPECT_DOUBLE_EQ(back.channels[c].rate, m.channels[c].rate);
  }
  EXPECT_DOUBLE_EQ(back.gain_max_db, 48);
  EXPECT_THROW(parse_noise_model(R"({"channels": {}})"), ConfigError);
  NoiseModel bad = m;
  bad.channels[0].amplitude = -1;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(NoiseCsv, ReadsWideFormat) {
  TempDir dir;
  const auto path = dir.path() / "m.csv";
  std::ofstream(path) << "gain_db,std_r,std_g,std_b\n0,0.5,0.6,0.7\n48,20,21,22\n";
  const NoiseMeasurements m = read_noise_measurements(path);
  ASSERT_EQ(m[0].size(), 2u);
  EXPECT_DOUBLE_EQ(m[1][1].std_gray, 21.0);
  EXPECT_DOUBLE_EQ(m[2][1].gain_db, 48.0);
  std::ofstream(path) << "gain,std\n0,1\n";
  EXPECT_THROW(read_noise_measurements(path), InputError);
  std::ofstream(path) << "gain_db,std_r,std_g,std_b\n0,abc,1,1\n";
  EXPECT_THROW(read_noise_measurements(path), InputError);
}

TEST(NoiseCsv, ShippedSampleFits) {
  const NoiseModel m =
      fit_noise_model(read_noise_measurements(std::string(APSIM_DATA_DIR) + "/noise_sample.csv"));
  EXPECT_NO_THROW(m.validate());
  for (const auto& ch : m.channels) {
    EXPECT_GT(ch.rate, 0.0);
    EXPECT_GT(ch.amplitude, 0.0);
  }
}

TEST(Awgn, ZeroStdIsRoundAndClamp) {
  PlanarImage img(4, 1);
  img.at(0, 0, Channel::kR) = -3.0f;
  img.at(0, 1, Channel::kR) = 12.4f;
  img.at(0, 2, Channel::kR) = 12.6f;
  img.at(0, 3, Channel::kR) = 300.0f;
  const RgbImage out = add_awgn(img, {0, 0, 0}, 1);
  EXPECT_EQ(out.at(0, 0, Channel::kR), 0);
  EXPECT_EQ(out.at(0, 1, Channel::kR), 12);
  EXPECT_EQ(out.at(0, 2, Channel::kR), 13);
  EXPECT_EQ(out.at(0, 3, Channel::kR), 255);
  EXPECT_EQ(out, img.to_rgb());
}

TEST(Awgn, SampleMomentsOnMillionPixels) {
  const PlanarImage img(1000, 1000, 128.0f);
  const RgbImage out = add_awgn(img, {10.0, 10.0, 10.0}, 2024);
  for (Channel c : kChannels) {
    double sum = 0, sum2 = 0;
    for (int r = 0; r < 1000; ++r) {
      for (int col = 0; col < 1000; ++col) {
        const double v = out.at(r, col, c);
        sum += v;
        sum2 += v * v;
      }
    }
    const double mean = sum / 1e6;
    // Rounding to integers adds variance 1/12.
    const double sd = std::sqrt(sum2 / 1e6 - mean * mean - 1.0 / 12.0);
    EXPECT_NEAR(mean, 128.0, 0.05);
    EXPECT_NEAR(sd, 10.0, 0.05);
  }
}

TEST(Awgn, DeterministicPerSeed) {
  const PlanarImage img(64, 64, 100.0f);
  EXPECT_EQ(add_awgn(img, {3, 4, 5}, 11), add_awgn(img, {3, 4, 5}, 11));
  EXPECT_NE(add_awgn(img, {3, 4, 5}, 11), add_awgn(img, {3, 4, 5}, 12));
  EXPECT_THROW(add_awgn(img, {3, -1, 5}, 11), ConfigError);
}

TEST(Awgn, ChannelsIndependentStd) {
  const PlanarImage img(500, 500, 128.0f);
  const RgbImage out = add_awgn(img, {0.0, 5.0, 20.0}, 3);
  double s[3] = {0, 0, 0};
  for (int r = 0; r < 500; ++r) {
    for (int c = 0; c < 500; ++c) {
      for (Channel ch : kChannels) {
        const double d = out.at(r, c, ch) - 128.0;
        s[index_of(ch)] += d * d;
      }
    }
  }
  EXPECT_EQ(s[0], 0.0);
  EXPECT_NEAR(std::sqrt(s[1] / 250000), 5.0, 0.1);
  EXPECT_NEAR(std::sqrt(s[2] / 250000), 20.0, 0.2);
}
