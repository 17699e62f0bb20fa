#include <CLI11.hpp>
#include <iostream>

#include "qustat_cli/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qustat: quantum U-statistics experiments"};
  std::string config;
  std::string out_dir = "qustat-out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  app.add_option("--config", config, "experiment config (JSON)")->required();
  app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return qustat::cli::run(config, out_dir, seed, threads, std::cerr);
}
