#include "satnls/config.hpp"
#include "satnls/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Saturable NLS solvers: ground states, CNFD/SSFM evolution and convergence studies"};
  app.set_version_flag("--version", satnls::kVersion);

  std::string mode, config, out = "out", ladder_max_h;
  int threads = 1;
  bool allow_large = false;
  app.add_option("mode", mode, "groundstate | evolve-cnfd | evolve-ssfm | compare | convergence-table | mms-study")
      ->required()
      ->check(CLI::IsMember({"groundstate", "evolve-cnfd", "evolve-ssfm", "compare", "convergence-table", "mms-study"}));
  app.add_option("--config", config, "Key-value configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--ladder-max-h", ladder_max_h, "Finest mesh size a ladder may reach, e.g. 0.0625 or 2^-4");
  app.add_option("--threads", threads, "FFT threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--allow-large", allow_large, "Permit mesh sizes below 2^-4");
  CLI11_PARSE(app, argc, argv);

  try {
    satnls::RunControls rc;
    rc.mode = satnls::parse_mode(mode);
    rc.out_dir = out;
    rc.threads = threads;
    rc.allow_large = allow_large;
    if (!ladder_max_h.empty()) rc.ladder_max_h = satnls::parse_real("ladder-max-h", ladder_max_h);
    const satnls::ExperimentConfig cfg = satnls::load_config(config, rc);
    return satnls::run_experiment(cfg, std::cout);
  } catch (const satnls::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
