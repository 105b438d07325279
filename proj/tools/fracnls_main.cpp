#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "runner.hpp"

int main(int argc, char** argv) {
  using namespace fracnls;
  CLI::App app{"Pseudospectral fractional NLS solver and variational toolkit"};
  app.set_version_flag("--version", std::string(version));
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "configuration file (section.key = value)")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides io.out)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides task.seed)");
  app.add_flag("--quiet", quiet, "suppress progress output");
  app.require_subcommand(1, 1);
  app.fallthrough();
  for (const char* name : {"check", "ground-state", "evolve", "stability", "probe-scaling", "probe-subadd",
                           "probe-concentration"})
    app.add_subcommand(name);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tool::validation;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  const Task task = *parse_task(name);

  std::ifstream is(config_path);
  if (!is) {
    std::cerr << "error: cannot read " << config_path << "\n";
    return tool::io;
  }
  std::stringstream text;
  text << is.rdbuf();
  std::string body = text.str();
  RunConfig cfg;
  try {
    cfg = parse_config(body, task);
    if (*out_opt) cfg.out = out_dir;
    if (*seed_opt) cfg.seed = seed;
    for (auto& [k, v] : cfg.effective) {
      if (k == "io.out") v = cfg.out;
      if (k == "task.seed") v = std::to_string(cfg.seed);
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return tool::validation;
  }
  return tool::run(task, name, cfg, quiet);
}
