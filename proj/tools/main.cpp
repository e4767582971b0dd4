#include <string>

#include <CLI11.hpp>

#include "crowdsim/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"crowdsim: class-reputation task assignment and decision simulator"};
  app.require_subcommand(1);

  std::string config, output, matrix_csv, suite;
  int threads = 0, tail = 10;

  CLI::App* run = app.add_subcommand("run", "run a Monte Carlo sweep, write CSV");
  run->add_option("config", config, "JSON config file, - for stdin")->required();
  run->add_option("--output", output, "override the config's output path");
  run->add_option("--threads", threads, "trial threads, 0 = all cores");

  CLI::App* alloc =
      app.add_subcommand("allocate", "print the greedy allocation of one sweep point");
  alloc->add_option("config", config, "JSON config file, - for stdin")->required();
  alloc->add_option("--matrix-csv", matrix_csv, "also write the degree matrix as CSV");
  alloc->add_option("--tail", tail, "trailing greedy steps to print");

  CLI::App* verify =
      app.add_subcommand("verify", "run the numerical property suites");
  verify->add_option("--suite", suite, "run one suite by name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the usage error
    return code == 0 ? crowdsim::kExitOk : crowdsim::kExitConfig;
  }

  if (run->parsed()) return crowdsim::cmd_run(config, output, threads);
  if (alloc->parsed()) return crowdsim::cmd_allocate(config, matrix_csv, tail);
  return crowdsim::cmd_verify(suite);
}
