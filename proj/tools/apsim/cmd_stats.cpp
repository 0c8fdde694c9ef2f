#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "apsim/csv.hpp"
#include "apsim/evaluation.hpp"
#include "common.hpp"

namespace apsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunEntry {
  std::string aperture;
  double gain_db = 0.0;
  int fold = 0;
  fs::path ground_truth;
  fs::path detections;
};

struct RunsFile {
  std::optional<double> confidence_threshold;
  std::optional<double> alpha;
  ClassCatalog catalog = ClassCatalog::reference();
  std::vector<RunEntry> runs;
};

RunsFile load_runs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  RunsFile rf;
  try {
    const json j = json::parse(in);
    if (j.contains("confidence_threshold")) rf.confidence_threshold = j["confidence_threshold"].get<double>();
    if (j.contains("alpha")) rf.alpha = j["alpha"].get<double>();
    if (j.contains("class_catalog")) {
      rf.catalog = load_catalog(path.parent_path() / j["class_catalog"].get<std::string>());
    }
    for (const auto& r : j.at("runs")) {
      RunEntry e;
      e.aperture = r.at("aperture").get<std::string>();
      e.gain_db = r.at("gain_db").get<double>();
      e.fold = r.at("fold").get<int>();
      e.ground_truth = path.parent_path() / r.at("ground_truth").get<std::string>();
      e.detections = path.parent_path() / r.at("detections").get<std::string>();
      rf.runs.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw InputError("invalid runs file " + path.string() + ": " + e.what());
  }
  return rf;
}

// (aperture, gain) cell of one evaluation slice.
using CellKey = std::pair<std::string, double>;

struct SliceLabel {
  EvaluationSlice slice;
  std::string group;
  std::string size;
};

std::vector<SliceLabel> all_slices() {
  std::vector<SliceLabel> out;
  std::vector<std::optional<ClassGroup>> groups{std::nullopt, ClassGroup::kTrafficSign,
                                                ClassGroup::kSpeedSign, ClassGroup::kTrafficLight};
  std::vector<std::optional<SizeClass>> sizes{std::nullopt, SizeClass::kTiny, SizeClass::kSmall,
                                              SizeClass::kMedium, SizeClass::kLarge};
  for (const auto& g : groups) {
    for (const auto& s : sizes) {
      out.push_back({{g, s},
                     g ? std::string(group_name(*g)) : "all",
                     s ? std::string(size_class_name(*s)) : "all"});
    }
  }
  return out;
}

std::string gain_label(double gain_db) { return format_number(gain_db) + "dB"; }

struct StatsOptions {
  std::string runs;
  std::string out_dir;
  std::optional<double> confidence;
  std::optional<double> alpha;
};

int run_stats(const GlobalOptions& global, const StatsOptions& opt) {
  const RunsFile rf = load_runs(opt.runs);
  const auto confidence = opt.confidence ? opt.confidence : rf.confidence_threshold;
  if (!confidence) {
    throw UsageError("a confidence threshold is required (--confidence or confidence_threshold)");
  }
  if (!(*confidence >= 0.0 && *confidence < 1.0)) throw UsageError("--confidence must be in [0, 1)");
  const double alpha = opt.alpha ? *opt.alpha : rf.alpha.value_or(0.05);
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must be in (0, 1)");

  const auto slices = all_slices();
  // folds[slice][cell] -> fold metrics
  std::vector<std::map<CellKey, std::vector<FoldMetric>>> folds(slices.size());
  for (const auto& run : rf.runs) {
    const auto gts = load_coco_ground_truth(run.ground_truth);
    const auto dets = load_coco_detections(run.detections);
    for (std::size_t s = 0; s < slices.size(); ++s) {
      const SliceScore sc = score_slice(dets, gts, rf.catalog, slices[s].slice, *confidence);
      if (!sc.map_value) continue;
      folds[s][{run.aperture, run.gain_db}].push_back(
          {run.fold, *sc.map_value, static_cast<double>(sc.ground_truths)});
    }
    log_info(global, "scored " + run.aperture + " " + gain_label(run.gain_db) + " fold " +
                         std::to_string(run.fold));
  }

  fs::create_directories(opt.out_dir);
  json report = json::array();
  CsvTable map_table;
  map_table.header = {"group", "size", "aperture", "gain_db", "folds", "weighted_mean", "weighted_std"};
  CsvTable welch_table;
  welch_table.header = {"group", "size", "test", "condition", "label_1", "label_2",
                        "t", "nu", "p_value", "reject"};

  for (std::size_t s = 0; s < slices.size(); ++s) {
    const SliceLabel& sl = slices[s];
    // Fold mAP samples keyed by (gain -> aperture) and (aperture -> gain).
    std::map<double, std::map<std::string, std::vector<double>>> by_gain;
    std::map<std::string, std::map<std::string, std::vector<double>>> by_aperture;
    for (const auto& [cell, metrics] : folds[s]) {
      const double total = [&] {
        double t = 0;
        for (const auto& m : metrics) t += m.weight_count;
        return t;
      }();
      json entry{{"group", sl.group}, {"size", sl.size}, {"aperture", cell.first},
                 {"gain_db", cell.second}, {"folds", json::array()}};
      for (const auto& m : metrics) {
        entry["folds"].push_back({{"fold", m.fold_index}, {"map", m.map_value}, {"weight", m.weight_count}});
      }
      std::string mean_text, std_text;
      if (total > 0) {
        const double mean = weighted_mean(metrics);
        entry["weighted_mean"] = mean;
        mean_text = fixed(mean, 6);
        if (metrics.size() >= 2) {
          const double sd = weighted_std(metrics);
          entry["weighted_std"] = sd;
          std_text = fixed(sd, 6);
        }
      }
      report.push_back(entry);
      map_table.rows.push_back({sl.group, sl.size, cell.first, format_number(cell.second),
                                std::to_string(metrics.size()), mean_text, std_text});
      for (const auto& m : metrics) {
        if (m.weight_count <= 0) continue;
        by_gain[cell.second][cell.first].push_back(m.map_value);
        by_aperture[cell.first][gain_label(cell.second)].push_back(m.map_value);
      }
    }

    auto emit = [&](const std::string& test, const std::string& condition,
                    const std::map<std::string, std::vector<double>>& groups) {
      if (groups.size() < 2) return;
      for (const auto& pr : pairwise_tests(groups, alpha)) {
        if (pr.result) {
          welch_table.rows.push_back({sl.group, sl.size, test, condition, pr.label1, pr.label2,
                                      fixed(pr.result->t, 4), fixed(pr.result->nu, 4),
                                      fixed(pr.result->p_two_tailed, 6),
                                      pr.result->reject ? "true" : "false"});
        } else {
          welch_table.rows.push_back({sl.group, sl.size, test, condition, pr.label1, pr.label2,
                                      "", "", "", "error: " + pr.error});
        }
      }
    };
    for (const auto& [gain, groups] : by_gain) emit("aperture", gain_label(gain), groups);
    for (const auto& [aperture, groups] : by_aperture) emit("gain", aperture, groups);
  }

  const fs::path dir(opt.out_dir);
  {
    std::ofstream out(dir / "map_report.json", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "map_report.json").string());
    out << report.dump(2) << "\n";
  }
  export_report(map_table, dir / "map_report.csv");
  export_report(welch_table, dir / "welch_tests.csv");
  std::cout << "runs: " << rf.runs.size() << ", map rows: " << map_table.rows.size()
            << ", welch rows: " << welch_table.rows.size() << "\n";
  return kExitOk;
}

}  // namespace

void add_stats_command(CLI::App& app, const GlobalOptions& global, std::vector<Command>& out) {
  auto opt = std::make_shared<StatsOptions>();
  CLI::App* sub = app.add_subcommand(
      "stats", "K-fold weighted mAP per class group and bbox size, and pairwise Welch tests");
  sub->add_option("--runs", opt->runs, "Runs JSON listing (aperture, gain_db, fold) result files")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out-dir", opt->out_dir, "Directory for map_report.{json,csv} and welch_tests.csv")
      ->required();
  sub->add_option("--confidence", opt->confidence, "Detection confidence threshold (strict >)");
  sub->add_option("--alpha", opt->alpha, "Significance level (default 0.05)");
  out.push_back({sub, [&global, opt] { return run_stats(global, *opt); }});
}

}  // namespace apsim::cli
