// pompif: simulate, filter and fit POMP epidemic models from a JSON config.
#include <iostream>

#include <CLI11.hpp>

#include "pompif/cli/commands.hpp"
#include "pompif/cli/config.hpp"
#include "pompif/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Likelihood-based inference for partially observed epidemic models"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory (overrides the config)");
  };
  auto* simulate = app.add_subcommand("simulate", "simulate a data set");
  auto* pfilter = app.add_subcommand("pfilter", "replicated particle-filter log-likelihood");
  auto* mif2 = app.add_subcommand("mif2", "multi-start iterated filtering");
  auto* profile = app.add_subcommand("profile", "profile likelihood with an adjusted interval");
  for (auto* sub : {simulate, pfilter, mif2, profile}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    auto cfg = pompif::cli::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (out) cfg.output = *out;
    (void)cfg.master_seed();  // mandatory, fail before any work

    if (simulate->parsed()) pompif::cli::cmd_simulate(cfg);
    if (pfilter->parsed()) pompif::cli::cmd_pfilter(cfg);
    if (mif2->parsed()) pompif::cli::cmd_mif2(cfg);
    if (profile->parsed()) pompif::cli::cmd_profile(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pompif::cli::exit_code_for(e);
  }
  return 0;
}
