// Command line front end: run one experiment config, validate a config, or
// print the experiment catalog. Exit codes: 0 success, 2 hypothesis-unmet or
// nothing-found report, 1 config/tool errors.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "hamlab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hamlab: experiments on compactly supported Hamiltonian dynamics"};
  app.require_subcommand(1);

  std::string run_config;
  std::string out_dir;
  int threads = 1;
  CLI::App* run = app.add_subcommand("run", "execute one experiment config");
  run->add_option("config", run_config, "config file (JSON, // comments allowed)")
      ->required();
  run->add_option("--out", out_dir,
                  "output directory (overrides the config's out_dir)");
  run->add_option("--threads", threads,
                  "worker thread cap; results are identical for any value")
      ->check(CLI::Range(1, 256));

  std::string validate_config_path;
  CLI::App* validate =
      app.add_subcommand("validate", "check a config against its kind's schema");
  validate->add_option("config", validate_config_path, "config file")->required();

  CLI::App* list = app.add_subcommand("list", "print the experiment catalog");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      const auto& catalog = hamlab::experiment_catalog();
      std::printf("%zu experiment kinds\n\n", catalog.size());
      for (const auto& doc : catalog) {
        std::printf("%s\n  %s\n", doc.kind.c_str(), doc.summary.c_str());
        for (const auto& p : doc.params)
          std::printf("    %-20s %s\n", p.name.c_str(), p.doc.c_str());
        std::printf("\n");
      }
      std::printf(
          "shared fields: spec_version (\"1\"), kind, seed (default 2026),\n"
          "out_dir (default runs/<kind>), integrator {dt=1e-3, fp_tol=1e-12,\n"
          "max_fp_iters=50, force_stepping=false}, params (kind block above)\n");
      return 0;
    }
    if (validate->parsed()) {
      auto cfg = hamlab::load_config_file(validate_config_path);
      std::printf("ok: %s validates as kind %s\n", validate_config_path.c_str(),
                  cfg.at("kind").get<std::string>().c_str());
      return 0;
    }
    auto cfg = hamlab::load_config_file(run_config);
    std::string dir =
        out_dir.empty() ? cfg.at("out_dir").get<std::string>() : out_dir;
    auto outcome = hamlab::run_experiment(cfg, dir, threads);
    std::printf("%s\n", outcome.verdict.c_str());
    return outcome.exit_code;
  } catch (const hamlab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
