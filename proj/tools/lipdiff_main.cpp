#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "lipdiff/parallel.hpp"
#include "lipdiff/scenario.hpp"
#include "lipdiff/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lipdiff — numerical certification of inverse-function-theorem converses"};
  app.set_version_flag("--version", std::string("lipdiff ") + lipdiff::kVersion);
  app.require_subcommand(1);

  std::string scenario_path, out_path, profiles_dir;
  CLI::App* run = app.add_subcommand("run", "run a scenario file and emit a JSON report");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_path, "write the report here instead of stdout");
  run->add_option("--profiles", profiles_dir, "directory for CSV profile exports");

  CLI::App* catalog = app.add_subcommand("catalog", "list built-in maps and pairs");

  CLI11_PARSE(app, argc, argv);

  if (catalog->parsed()) {
    std::cout << lipdiff::cli::catalog_text();
    return 0;
  }

  const lipdiff::cli::RunResult result = lipdiff::cli::run_scenario_file(scenario_path);
  const std::string text = result.envelope.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot open --out file: " << out_path << "\n";
      return 1;
    }
    out << text;
  }
  if (!profiles_dir.empty() && result.exit_code != 1) {
    try {
      lipdiff::cli::emit_profiles(result.envelope, profiles_dir);
    } catch (const std::exception& e) {
      std::cerr << "profile export failed: " << e.what() << "\n";
      return 1;
    }
  }
  return result.exit_code;
}
