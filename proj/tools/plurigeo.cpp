#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "plurigeo/scenario.hpp"

int main(int argc, char** argv) {
  using namespace plurigeo;

  CLI::App app{"pluriclosed flow engine"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"identities", "check jet identities on random and family jets"},
      {"flow", "evolve a metric field and write diagnostics"},
      {"static", "static-metric report for a metric field"},
      {"hopf", "verify the Hopf static metric on sample points"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "scenario JSON")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    Scenario sc = load_scenario(config_path);
    if (to_string(sc.command) != command)
      throw Error(ErrorKind::config,
                  "config command '" + to_string(sc.command) + "' does not match '" + command + "'");
    CLI::App* sub = app.get_subcommand(command);
    if (sub->count("--out")) sc.output_dir = out_dir;
    if (sub->count("--seed")) sc.seed = seed;
    sc.check();
    return run_scenario(sc, std::cerr);
  } catch (const Error& e) {
    std::cerr << "plurigeo " << command << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "plurigeo " << command << ": " << e.what() << "\n";
    return exit_numerical;
  }
}
