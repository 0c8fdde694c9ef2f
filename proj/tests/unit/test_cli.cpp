#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "apsim/csv.hpp"
#include "apsim/psf_bank.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string("\"") + APSIM_CLI_PATH + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  RunResult r;
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

fs::path write_test_bank(const fs::path& dir, const std::string& aperture) {
  std::mt19937_64 rng(4);
  const apsim::PsfBank bank =
      apsim::testing::random_bank(rng, aperture, apsim::DepthPlanSpec::standard(), 72, 96, 17, 5);
  const fs::path path = dir / (aperture + ".apsf");
  apsim::save_bank(bank, path);
  return path;
}

}  // namespace

TEST(Cli, HelpAndVersion) {
  const RunResult help = run("--help");
  EXPECT_EQ(help.code, 0);
  for (const char* cmd : {"geometry", "psf", "render", "replicate", "noise", "stats"}) {
    EXPECT_TRUE(contains(help.output, cmd)) << cmd;
  }
  EXPECT_EQ(run("--version").code, 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--bogus").code, 2);
  const RunResult r = run("geometry");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.output, "error: usage:")) << r.output;
  apsim::testing::TempDir dir;
  EXPECT_EQ(run("psf synth --out " + q(dir.path()) + " --block-size 50").code, 2);
  EXPECT_EQ(run("render --rgb " + q(dir.path() / "none.png")).code, 2);
}

TEST(Cli, GeometryPrintsReferenceValues) {
  const RunResult r = run("geometry --object speed_sign --distance 38 --width-px 32 --apertures");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "horizontal_fov_deg: 24.9023")) << r.output;
  EXPECT_TRUE(contains(r.output, "distance_m 38: bbox_width_px 32")) << r.output;
  EXPECT_TRUE(contains(r.output, "plus")) << r.output;
}

TEST(Cli, ConfigFromEnvironment) {
  apsim::testing::TempDir dir;
  std::ofstream(dir.path() / "cfg.json") << R"({"camera": {"focal_length_mm": 8}})";
  const RunResult r = run("--config " + q(dir.path() / "cfg.json") + " geometry --object speed_sign");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "horizontal_fov_deg: 47.6525")) << r.output;
  const std::string env = "APSIM_CONFIG=" + q(dir.path() / "cfg.json") + " ";
  const std::string cmd = env + "\"" + APSIM_CLI_PATH + "\" geometry --object speed_sign";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string out;
  char buf[1024];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  EXPECT_EQ(WEXITSTATUS(pclose(pipe)), 0);
  EXPECT_TRUE(contains(out, "47.6525")) << out;
}

TEST(Cli, PsfSynthAndExtractErrors) {
  apsim::testing::TempDir dir;
  const RunResult synth = run("psf synth --out " + q(dir.path() / "grid") + " --height 102 --width 153");
  ASSERT_EQ(synth.code, 0) << synth.output;
  for (const char* f : {"impulse_R.png", "impulse_G.png", "impulse_B.png"}) {
    EXPECT_TRUE(fs::exists(dir.path() / "grid" / f)) << f;
  }
  fs::create_directories(dir.path() / "frames");
  const RunResult r = run("psf extract --frames " + q(dir.path() / "frames") + " --out " +
                          q(dir.path() / "b.apsf") + " --aperture plus --distance 5");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.output, "error: input:")) << r.output;
  EXPECT_TRUE(contains(r.output, "channel R")) << r.output;
}

TEST(Cli, NoiseFit) {
  apsim::testing::TempDir dir;
  const RunResult r = run("noise fit --measurements " + q(fs::path(APSIM_SOURCE_DATA_DIR) / "noise_sample.csv") +
                          " --out " + q(dir.path() / "noise.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  const json j = json::parse(std::ifstream(dir.path() / "noise.json"));
  EXPECT_TRUE(j.contains("channels")) << j.dump();
  std::ofstream(dir.path() / "bad.csv") << "gain_db,std_r\n1,2\n";
  EXPECT_EQ(run("noise fit --measurements " + q(dir.path() / "bad.csv")).code, 1);
}

TEST(Cli, RenderAndReplicate) {
  apsim::testing::TempDir dir;
  const fs::path manifest = apsim::testing::write_fixture_dataset(dir.path() / "in");
  const fs::path plus = write_test_bank(dir.path(), "plus");
  const fs::path circ = write_test_bank(dir.path(), "circular");
  const RunResult one = run("render --rgb " + q(dir.path() / "in/rgb/scene_0.png") + " --depth " +
                            q(dir.path() / "in/depth/scene_0.png") + " --bank " + q(plus) +
                            " --out " + q(dir.path() / "one.png"));
  ASSERT_EQ(one.code, 0) << one.output;
  EXPECT_TRUE(fs::exists(dir.path() / "one.png"));

  const RunResult rep = run("--workers 2 replicate --manifest " + q(manifest) + " --bank " + q(plus) +
                            " --bank " + q(circ) + " --out " + q(dir.path() / "out"));
  ASSERT_EQ(rep.code, 0) << rep.output;
  EXPECT_TRUE(contains(rep.output, "replicas written: 24")) << rep.output;
  EXPECT_TRUE(fs::exists(dir.path() / "out/circular/48/rgb/scene_1.png"));
  EXPECT_TRUE(fs::exists(dir.path() / "out/replication_report.json"));

  std::ofstream(dir.path() / "broken.apsf") << "APSFBANK garbage";
  const RunResult bad = run("replicate --manifest " + q(manifest) + " --bank " +
                            q(dir.path() / "broken.apsf") + " --out " + q(dir.path() / "o2"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_TRUE(contains(bad.output, "error: bank_")) << bad.output;
}

TEST(Cli, StatsWritesReports) {
  apsim::testing::TempDir dir;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> jitter(-6, 6);
  json gt{{"images", json::array()}, {"annotations", json::array()}};
  for (int i = 0; i < 8; ++i) {
    gt["annotations"].push_back({{"image_id", i}, {"category_id", 20 + (i % 2) * 70},
                                 {"bbox", {10.0 * i, 10, 40, 40}}});
  }
  std::ofstream(dir.path() / "gt.json") << gt.dump();
  json runs{{"confidence_threshold", 0.25}, {"runs", json::array()}};
  for (const char* ap : {"circular", "plus", "vertical_slit", "horizontal_slit"}) {
    for (int fold = 0; fold < 3; ++fold) {
      json dets = json::array();
      for (int i = 0; i < 8; ++i) {
        dets.push_back({{"image_id", i}, {"category_id", 20 + (i % 2) * 70},
                        {"bbox", {10.0 * i + jitter(rng), 10 + jitter(rng), 40, 40}}, {"score", 0.9}});
      }
      const std::string name = std::string(ap) + "_" + std::to_string(fold) + ".json";
      std::ofstream(dir.path() / name) << dets.dump();
      runs["runs"].push_back({{"aperture", ap}, {"gain_db", 30}, {"fold", fold},
                              {"ground_truth", "gt.json"}, {"detections", name}});
    }
  }
  std::ofstream(dir.path() / "runs.json") << runs.dump();
  const RunResult r = run("stats --runs " + q(dir.path() / "runs.json") + " --out-dir " + q(dir.path() / "stats"));
  ASSERT_EQ(r.code, 0) << r.output;
  const apsim::CsvTable welch = apsim::read_csv(dir.path() / "stats/welch_tests.csv");
  int all_rows = 0;
  for (const auto& row : welch.rows) {
    if (row[0] == "all" && row[1] == "all" && row[2] == "aperture") {
      ++all_rows;
      EXPECT_EQ(row[3], "30dB");
    }
  }
  EXPECT_EQ(all_rows, 6);
  const apsim::CsvTable map = apsim::read_csv(dir.path() / "stats/map_report.csv");
  EXPECT_EQ(map.header[5], "weighted_mean");
  EXPECT_TRUE(fs::exists(dir.path() / "stats/map_report.json"));

  runs.erase("confidence_threshold");
  std::ofstream(dir.path() / "runs2.json") << runs.dump();
  EXPECT_EQ(run("stats --runs " + q(dir.path() / "runs2.json") + " --out-dir " + q(dir.path() / "s2")).code, 2);
}
