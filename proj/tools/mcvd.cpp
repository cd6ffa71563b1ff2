// Command-line front end: mcvd <recipe> [options].
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcvd/mcvd.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Molecular communication via diffusion with drift: simulator and model analysis"};
  std::string recipe_name;
  std::string config_path;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool quick = false;
  bool paper = false;
  std::string out_dir = "out";
  std::size_t workers = 1;
  bool allow_out_of_range = false;
  bool no_cache = false;

  app.add_option("recipe", recipe_name,
                 "cdf-compare | ntx-sweep | velocity-sweep | rmse-heatmap | delta-map | ber-sweep")
      ->required();
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--set", sets, "override a key, e.g. --set distance=4um")
      ->expected(1)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  auto* seed_opt = app.add_option("--seed", seed, "base RNG seed");
  auto* quick_flag = app.add_flag("--quick", quick, "reduced trials and coarse grids (default)");
  app.add_flag("--paper", paper, "full trial counts and grids")->excludes(quick_flag);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--allow-out-of-range", allow_out_of_range,
               "accept parameters outside the validated ranges");
  app.add_flag("--no-cache", no_cache, "recompute channel responses instead of reusing them");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    mcvd::ExperimentRecipe recipe;
    recipe.name = mcvd::parse_recipe_name(recipe_name);
    if (!config_path.empty()) recipe.overrides = mcvd::read_config_file(config_path);
    for (const auto& s : sets) recipe.overrides.push_back(mcvd::parse_override(s));
    if (*seed_opt) recipe.seed = seed;
    recipe.scale = paper ? mcvd::Scale::paper : mcvd::Scale::quick;
    recipe.out_dir = out_dir;
    recipe.workers = workers;
    recipe.allow_out_of_range = allow_out_of_range;
    recipe.use_cache = !no_cache;

    const auto result = mcvd::run_recipe(recipe);
    for (const auto& f : result.files) std::cout << f.string() << "\n";
    return 0;
  } catch (const mcvd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
