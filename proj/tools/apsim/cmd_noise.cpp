#include <iostream>
#include <memory>

#include "apsim/noise.hpp"
#include "common.hpp"

namespace apsim::cli {

namespace {

struct NoiseFitOptions {
  std::string measurements;
  std::string out;
};

int run_noise_fit(const GlobalOptions& global, const NoiseFitOptions& opt) {
  const NoiseModel model = fit_noise_model(read_noise_measurements(opt.measurements));
  if (opt.out.empty()) {
    std::cout << noise_model_to_json(model);
    return kExitOk;
  }
  save_noise_model(model, opt.out);
  for (Channel c : kChannels) {
    const auto& ch = model.channels[index_of(c)];
    std::cout << channel_letter(c) << ": std = " << ch.amplitude << " * exp(" << ch.rate
              << " * gain_db)\n";
  }
  log_info(global, "wrote " + opt.out);
  return kExitOk;
}

}  // namespace

void add_noise_commands(CLI::App& app, const GlobalOptions& global, std::vector<Command>& out) {
  CLI::App* noise = app.add_subcommand("noise", "Sensor noise model");
  noise->require_subcommand(1);
  auto opt = std::make_shared<NoiseFitOptions>();
  CLI::App* fit = noise->add_subcommand("fit", "Fit std = a * exp(b * gain) per channel");
  fit->add_option("--measurements", opt->measurements, "CSV with gain_db,std_r,std_g,std_b")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--out", opt->out, "Output JSON (default: stdout)");
  out.push_back({fit, [&global, opt] { return run_noise_fit(global, *opt); }});
}

}  // namespace apsim::cli
