// apsim: aperture PSF simulation and detection statistics.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error. Failures print a
// single line "error: <kind>: <message>" to stderr.

#include <iostream>

#include "apsim/error.hpp"
#include "common.hpp"

int main(int argc, char** argv) {
  using namespace apsim::cli;

  CLI::App app{"Aperture PSF simulation, dataset replication and detection statistics", "apsim"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--config", global.config_path, "Optics profile JSON (camera, apertures, objects)")
      ->envname("APSIM_CONFIG")
      ->check(CLI::ExistingFile);
  app.add_option("--workers", global.workers, "Worker threads for rendering (0 = all cores)")
      ->capture_default_str();
  app.add_flag("-v,--verbose", global.verbosity, "Progress messages on stderr");
  app.set_version_flag("--version", "apsim 0.1.0");

  std::vector<Command> commands;
  add_geometry_command(app, global, commands);
  add_psf_commands(app, global, commands);
  add_render_commands(app, global, commands);
  add_noise_commands(app, global, commands);
  add_stats_command(app, global, commands);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    for (const auto& cmd : commands) {
      if (cmd.app->parsed()) return cmd.run();
    }
    std::cerr << "error: usage: no subcommand given\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const apsim::Error& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitFailure;
  }
}
