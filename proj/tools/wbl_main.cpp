#include <iostream>

#include <CLI11.hpp>

#include "wbl/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wbl: discrete Willmore surfaces with boundary"};
  app.set_version_flag("--version", std::string("wbl ") + wbl::kVersion);

  wbl::RunOptions opts;
  std::string config, manifest, out_dir = ".";
  unsigned long long seed = 0;
  int jobs = 1;

  std::string names;
  for (const auto& n : wbl::subcommand_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("subcommand", opts.subcommand, "one of: " + names);
  app.add_option("overrides", opts.overrides, "key=value settings for the subcommand section");
  app.add_option("-c,--config", config, "INI-style config file")->check(CLI::ExistingFile);
  app.add_option("-o,--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* jobs_opt = app.add_option("-j,--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--manifest", manifest, "rerun from a manifest.json")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (opts.subcommand.empty() && manifest.empty()) {
    std::cerr << "error: a subcommand or --manifest is required\n" << app.help();
    return 2;
  }
  // A lone key=value lands in the subcommand slot when rerunning from a manifest.
  if (opts.subcommand.find('=') != std::string::npos) {
    opts.overrides.insert(opts.overrides.begin(), opts.subcommand);
    opts.subcommand.clear();
  }
  if (!config.empty()) opts.config = config;
  if (!manifest.empty()) opts.manifest = manifest;
  if (*seed_opt) opts.seed = seed;
  if (*jobs_opt) opts.jobs = jobs;
  opts.out_dir = out_dir;
  return wbl::run(opts, std::cout, std::cerr);
}
