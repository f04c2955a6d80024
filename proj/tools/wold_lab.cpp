#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "wold/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wold-lab: Wold-type decompositions of 2-isometries on truncated Dirichlet-type spaces"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario config and write a report");
  std::string config, out;
  wold::RunOptions options;
  std::string format = "json";
  run->add_option("--config", config, "scenario config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "report path")->required();
  run->add_option("--caps-scale", options.caps_scale, "multiply every truncation cap")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", options.seed_offset, "added to every instance seed");
  run->add_option("--tol-scale", options.tol_scale, "multiply every task tolerance")->check(CLI::PositiveNumber);
  run->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--jobs", options.jobs, "tasks run concurrently")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return wold::run_files(config, out, options,
                           format == "csv" ? wold::OutputFormat::csv : wold::OutputFormat::json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
