#include <iostream>

#include "CLI11.hpp"
#include "hforge/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hforge: heavenly-equation, twistor and ALE numerics"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the task described by a JSON config");
  std::string config_path;
  hforge::RunOptions opts;
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", opts.out_dir, "directory for the CSV and report.json");
  run->add_option("--tolerance", opts.tolerance, "override the config tolerance");
  run->add_flag("--quiet", opts.quiet, "print nothing on success");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : hforge::kExitConfig;
  }

  hforge::RunResult r = hforge::run_file(config_path, opts);
  if (r.exit_code == hforge::kExitPass || r.exit_code == hforge::kExitFail) {
    if (!opts.quiet || r.exit_code != hforge::kExitPass) {
      std::cout << r.message << "\n";
      for (const auto& f : r.written) std::cout << "wrote " << f << "\n";
    }
  } else {
    std::cerr << "hforge: " << r.message << "\n";
  }
  return r.exit_code;
}
