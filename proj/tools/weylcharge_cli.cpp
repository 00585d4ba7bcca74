// Command-line front end: runs one of the five batch commands on a JSON
// config and writes CSV/JSON artifacts into the output directory.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "weylcharge/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "weylcharge: symbolic-numeric toolkit for the universal algebra of the "
      "electromagnetic field with external charges"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 1;
  double tol_scale = 1.0;

  const char* names[] = {"gauss", "limit", "energy", "weyl", "check"};
  const char* descs[] = {
      "evaluate Gauss-law field readouts for charge/measurement scenarios",
      "trace the large-distance limit of the dipole state",
      "tabulate passive/total energy shifts of the dipole state",
      "reduce Weyl words to normal form and evaluate the vacuum state",
      "run built-in cross-validation checks"};
  for (int i = 0; i < 5; ++i) {
    auto* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", config_path, "JSON run configuration")
        ->required();
    sub->add_option("--out", out_dir, "output directory for artifacts")
        ->required();
    sub->add_option("--threads", threads,
                    "worker thread count (reserved; runs single-threaded)");
    sub->add_option("--tolerance-scale", tol_scale,
                    "multiplier applied to all pass/fail tolerances");
  }

  CLI11_PARSE(app, argc, argv);
  std::string cmd = app.get_subcommands().front()->get_name();

  const char* cache_dir = std::getenv("WEYLCHARGE_CACHE_DIR");
  if (cache_dir && *cache_dir) weylcharge::load_kernel_cache(cache_dir);

  try {
    weylcharge::RunConfig cfg = weylcharge::parse_config(config_path);
    weylcharge::RunResult res = weylcharge::run_command(cmd, cfg, tol_scale);
    weylcharge::write_artifacts(res, out_dir);
    if (cache_dir && *cache_dir) weylcharge::save_kernel_cache(cache_dir);
    if (res.exit_code != 0)
      std::cerr << cmd << ": numeric tolerance violation (see " << out_dir
                << "/" << cmd << ".json)\n";
    return res.exit_code;
  } catch (const weylcharge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  }
}
