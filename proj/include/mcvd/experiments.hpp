#pragma once

// Experiment recipes: each resolves a configuration, runs the
// simulator and models, and writes CSV tables plus a JSON manifest.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mcvd/arrival_models.hpp"
#include "mcvd/config.hpp"
#include "mcvd/config_file.hpp"
#include "mcvd/error_analysis.hpp"
#include "mcvd/heatmap.hpp"
#include "mcvd/io.hpp"
#include "mcvd/metrics.hpp"
#include "mcvd/phi_cache.hpp"
#include "mcvd/rng.hpp"
#include "mcvd/sim_core.hpp"

#ifndef MCVD_VERSION
#define MCVD_VERSION "0.1.0"
#endif

namespace mcvd {

enum class RecipeName { cdf_compare, ntx_sweep, velocity_sweep, rmse_heatmap, delta_map, ber_sweep };

inline constexpr std::pair<RecipeName, std::string_view> kRecipeNames[] = {
    {RecipeName::cdf_compare, "cdf-compare"},     {RecipeName::ntx_sweep, "ntx-sweep"},
    {RecipeName::velocity_sweep, "velocity-sweep"}, {RecipeName::rmse_heatmap, "rmse-heatmap"},
    {RecipeName::delta_map, "delta-map"},         {RecipeName::ber_sweep, "ber-sweep"},
};

constexpr std::string_view to_string(RecipeName name) noexcept {
  for (const auto& [n, s] : kRecipeNames) {
    if (n == name) return s;
  }
  return "?";
}

inline RecipeName parse_recipe_name(std::string_view text) {
  for (const auto& [n, s] : kRecipeNames) {
    if (s == text) return n;
  }
  throw ConfigError("recipe", "unknown recipe '" + std::string(text) +
                                  "' (expected cdf-compare, ntx-sweep, velocity-sweep, "
                                  "rmse-heatmap, delta-map or ber-sweep)");
}

enum class Scale { quick, paper };

struct ExperimentRecipe {
  RecipeName name = RecipeName::delta_map;
  std::vector<KeyValue> overrides;  // config-file entries first, then --set
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  Scale scale = Scale::quick;
  std::size_t workers = 1;
  bool allow_out_of_range = false;
  bool use_cache = true;
  std::filesystem::path cache_dir;  // default: <out_dir>/phi_cache
};

struct RecipeResult {
  ResolvedConfig config;
  std::vector<std::filesystem::path> files;
  io::Json summary;
};

namespace detail {

inline std::vector<double> linspace_step(double first, double last, double step) {
  std::vector<double> out;
  const auto n = static_cast<int>(std::floor((last - first) / step + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(first + step * i);
  return out;
}

inline std::vector<std::int64_t> int_range(std::int64_t first, std::int64_t last,
                                           std::int64_t step) {
  std::vector<std::int64_t> out;
  for (auto v = first; v <= last; v += step) out.push_back(v);
  return out;
}

inline bool overridden(const ExperimentRecipe& r, std::string_view key) {
  for (const auto& kv : r.overrides) {
    if (kv.key == key) return true;
  }
  return false;
}

}  // namespace detail

/// Baseline parameter values plus the per-recipe settings at the given scale.
inline ResolvedConfig default_config(RecipeName name, Scale scale) {
  const bool paper = scale == Scale::paper;
  ResolvedConfig cfg;
  cfg.sim = SimConfig{};  // D = 79.4 um^2/s, r_r = 10 um, dt = 1e-4 s
  cfg.sim.num_trials = paper ? 90000 : 10000;
  cfg.num_probe_molecules = paper ? 4000000 : 1000000;
  cfg.error = ErrorAnalysisConfig{};  // eta = 5, prior 0.5, N0 = 0, N1 = 100
  switch (name) {
    case RecipeName::cdf_compare:
      cfg.sim.num_molecules = 1000;
      cfg.sim.distance = 5.0;
      cfg.sim.set_axial_drift(10.0);
      cfg.sim.symbol_duration = 0.4;
      break;
    case RecipeName::ntx_sweep:
      cfg.sim.distance = 6.0;
      cfg.ntx_values = paper ? std::vector<std::int64_t>{2, 10, 20, 30, 40, 50, 60, 70, 80, 90,
                                                          100, 110, 120, 130, 140, 150, 160, 170,
                                                          180, 190, 200}
                             : std::vector<std::int64_t>{10, 50, 100, 200};
      cfg.velocity_values = {0.0, 10.0};
      break;
    case RecipeName::velocity_sweep:
      cfg.sim.distance = 8.0;
      cfg.sim.num_molecules = 100;
      cfg.velocity_values = paper ? detail::linspace_step(0.0, 10.0, 1.0)
                                  : detail::linspace_step(0.0, 10.0, 2.0);
      break;
    case RecipeName::rmse_heatmap:
      cfg.distance_values = paper ? detail::linspace_step(1.0, 10.0, 1.0)
                                  : std::vector<double>{2.0, 4.0, 6.0, 8.0, 10.0};
      cfg.ntx_values = paper ? detail::int_range(2, 200, 2) : detail::int_range(10, 200, 10);
      cfg.velocity_values = {0.0, 10.0};
      break;
    case RecipeName::delta_map:
      cfg.distance_values = detail::linspace_step(1.0, 10.0, 1.0);
      cfg.ntx_values = detail::int_range(2, 200, 2);
      cfg.velocity_values = {0.0, 10.0};
      cfg.num_probe_molecules = paper ? 1000000 : 200000;
      break;
    case RecipeName::ber_sweep:
      cfg.sim.distance = 4.0;
      cfg.sim.num_slots = cfg.error.eta + 1;
      cfg.velocity_values = {0.0, 10.0};
      cfg.num_bits = paper ? 1000000 : 20000;
      break;
  }
  return cfg;
}

/// Resolves defaults, config file entries and overrides into a validated config.
inline ResolvedConfig resolve_recipe_config(const ExperimentRecipe& recipe) {
  std::vector<KeyValue> input = recipe.overrides;
  if (recipe.seed) input.push_back({"rng_seed", std::to_string(*recipe.seed), 0});
  ResolvedConfig cfg = validate_config(input, default_config(recipe.name, recipe.scale),
                                       recipe.allow_out_of_range);
  // BER memory depth drives the simulated horizon unless set explicitly.
  if (recipe.name == RecipeName::ber_sweep && !detail::overridden(recipe, "num_slots")) {
    cfg.sim.num_slots = cfg.error.eta + 1;
  }
  return cfg;
}

inline io::Json to_json(const ResolvedConfig& c) {
  const auto& s = c.sim;
  return io::Json{
      {"diffusion_coefficient", s.diffusion_coefficient},
      {"receiver_radius", s.receiver_radius},
      {"distance", s.distance},
      {"drift_velocity", {s.drift_velocity.x, s.drift_velocity.y, s.drift_velocity.z}},
      {"time_step", s.time_step},
      {"symbol_duration", s.symbol_duration},
      {"num_slots", s.num_slots},
      {"num_molecules", s.num_molecules},
      {"num_trials", s.num_trials},
      {"rng_seed", s.rng_seed},
      {"far_field_skip", s.far_field_skip},
      {"bridge_correction", s.bridge_correction},
      {"eta", c.error.eta},
      {"threshold_range", c.error.resolved_thresholds()},
      {"bit_prior", c.error.bit_prior},
      {"amounts", {c.error.amount_zero, c.error.amount_one}},
      {"num_probe_molecules", c.num_probe_molecules},
      {"num_bits", c.num_bits},
      {"ntx_values", c.ntx_values},
      {"velocity_values", c.velocity_values},
      {"distance_values", c.distance_values},
  };
}

namespace detail {

class RecipeContext {
 public:
  RecipeContext(const ExperimentRecipe& recipe, ResolvedConfig cfg)
      : recipe_(recipe),
        cfg_(std::move(cfg)),
        cache_(recipe.use_cache ? (recipe.cache_dir.empty() ? recipe.out_dir / "phi_cache"
                                                            : recipe.cache_dir)
                                : std::filesystem::path{},
               !recipe.use_cache) {}

  const ResolvedConfig& cfg() const noexcept { return cfg_; }
  std::size_t workers() const noexcept { return recipe_.workers; }
  PhiCache& cache() noexcept { return cache_; }

  /// Common metadata block; excludes anything run-dependent (workers, time).
  io::CsvTable table(std::vector<std::string> columns) const {
    io::CsvTable t(std::move(columns));
    t.add_meta("recipe", std::string(to_string(recipe_.name)));
    t.add_meta("scale", recipe_.scale == Scale::paper ? "paper" : "quick");
    t.add_meta("rng_seed", std::to_string(cfg_.sim.rng_seed));
    t.add_meta("version", MCVD_VERSION);
    return t;
  }

  void write(const std::string& name, const io::CsvTable& t) {
    const auto path = recipe_.out_dir / name;
    t.write(path);
    files_.push_back(path);
  }

  std::vector<std::filesystem::path>& files() noexcept { return files_; }

 private:
  const ExperimentRecipe& recipe_;
  ResolvedConfig cfg_;
  PhiCache cache_;
  std::vector<std::filesystem::path> files_;
};

inline std::string tag_for(double v) {
  return io::format_number(v);
}

inline io::Json run_cdf_compare(RecipeContext& ctx) {
  SimConfig sim = ctx.cfg().sim;
  sim.num_slots = 1;
  const ChannelResponse phi = ctx.cache().get(sim, ctx.cfg().num_probe_molecules, ctx.workers());
  const auto trials = simulate_trials(sim, ctx.workers());
  const auto emp = empirical_cdf(slot_samples(trials, 0), sim.num_molecules);
  const EmissionHistory history{{sim.num_molecules}};
  const ChannelResponse channel{{phi.phi.front()}};

  auto combined = ctx.table({"x", "empirical", "binomial", "poisson", "gaussian"});
  combined.add_meta("phi1", io::format_number(channel.phi[0]));
  std::vector<CountCdf> cdfs;
  for (ModelKind kind : kAllModels) cdfs.push_back(model_cdf(kind, history, channel));
  for (std::int64_t x = 0; x <= sim.num_molecules; ++x) {
    combined.add_row(x, emp(x), cdfs[0](x), cdfs[1](x), cdfs[2](x));
  }
  ctx.write("cdf_compare.csv", combined);

  auto emp_table = ctx.table({"x", "F"});
  emp_table.add_meta("model", "empirical");
  emp_table.add_meta("num_trials", std::to_string(emp.num_trials));
  for (std::int64_t x = 0; x <= sim.num_molecules; ++x) emp_table.add_row(x, emp(x));
  ctx.write("cdf_empirical.csv", emp_table);
  for (const auto& cdf : cdfs) {
    ctx.write("cdf_" + std::string(to_string(cdf.kind())) + ".csv", io::cdf_table(cdf));
  }
  ctx.write("phi.csv", io::channel_table(phi));

  const auto sim_values = emp.values();
  io::Json rmse;
  for (const auto& cdf : cdfs) {
    rmse[std::string(to_string(cdf.kind()))] =
        mcvd::rmse(sim_values, std::vector<double>(cdf.values().begin(), cdf.values().end()));
  }
  return io::Json{{"phi1", channel.phi[0]}, {"rmse", rmse}};
}

inline io::Json run_ntx_sweep(RecipeContext& ctx) {
  auto table = ctx.table({"v_um_s", "ntx", "phi1", "rmse_binomial", "rmse_poisson",
                          "rmse_gaussian", "delta_analytic"});
  io::Json points = io::Json::array();
  const auto& cfg = ctx.cfg();
  for (std::size_t iv = 0; iv < cfg.velocity_values.size(); ++iv) {
    for (std::size_t in = 0; in < cfg.ntx_values.size(); ++in) {
      SimConfig sim = cfg.sim;
      sim.num_slots = 1;
      sim.set_axial_drift(cfg.velocity_values[iv]);
      sim.num_molecules = cfg.ntx_values[in];
      sim.rng_seed = derive_seed(cfg.sim.rng_seed, iv * 1000 + in);
      SimConfig probe = sim;
      probe.rng_seed = derive_seed(cfg.sim.rng_seed, iv);  // one phi per velocity
      const double phi1 =
          ctx.cache().get(probe, cfg.num_probe_molecules, ctx.workers()).phi.front();
      const auto trials = simulate_trials(sim, ctx.workers());
      const auto report = score_models(empirical_cdf(slot_samples(trials), sim.num_molecules),
                                       EmissionHistory{{sim.num_molecules}},
                                       ChannelResponse{{phi1}}, sim);
      const double delta = delta_boundary(sim.num_molecules, phi1);
      table.add_row(cfg.velocity_values[iv], sim.num_molecules, phi1, report.binomial,
                    report.poisson, report.gaussian, delta);
      points.push_back({{"v_um_s", cfg.velocity_values[iv]},
                        {"ntx", sim.num_molecules},
                        {"phi1", phi1},
                        {"rmse_binomial", report.binomial},
                        {"rmse_poisson", report.poisson},
                        {"rmse_gaussian", report.gaussian}});
    }
  }
  ctx.write("ntx_sweep.csv", table);
  return io::Json{{"points", points}};
}

/// Interpolated v where rmse_gauss - rmse_poisson first turns negative.
inline std::optional<double> crossover(const std::vector<double>& v, const std::vector<double>& diff) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (diff[i] >= 0.0 && diff[i + 1] < 0.0) {
      return v[i] + (v[i + 1] - v[i]) * diff[i] / (diff[i] - diff[i + 1]);
    }
  }
  return std::nullopt;
}

inline io::Json run_velocity_sweep(RecipeContext& ctx) {
  auto table = ctx.table({"v_um_s", "phi1", "rmse_binomial", "rmse_poisson", "rmse_gaussian",
                          "delta_analytic"});
  const auto& cfg = ctx.cfg();
  std::vector<double> diffs;
  io::Json points = io::Json::array();
  for (std::size_t iv = 0; iv < cfg.velocity_values.size(); ++iv) {
    SimConfig sim = cfg.sim;
    sim.num_slots = 1;
    sim.set_axial_drift(cfg.velocity_values[iv]);
    sim.rng_seed = derive_seed(cfg.sim.rng_seed, iv);
    const double phi1 = ctx.cache().get(sim, cfg.num_probe_molecules, ctx.workers()).phi.front();
    const auto trials = simulate_trials(sim, ctx.workers());
    const auto report = score_models(empirical_cdf(slot_samples(trials), sim.num_molecules),
                                     EmissionHistory{{sim.num_molecules}},
                                     ChannelResponse{{phi1}}, sim);
    const double delta = delta_boundary(sim.num_molecules, phi1);
    table.add_row(cfg.velocity_values[iv], phi1, report.binomial, report.poisson, report.gaussian,
                  delta);
    diffs.push_back(report.gaussian - report.poisson);
    points.push_back({{"v_um_s", cfg.velocity_values[iv]},
                      {"phi1", phi1},
                      {"rmse_binomial", report.binomial},
                      {"rmse_poisson", report.poisson},
                      {"rmse_gaussian", report.gaussian}});
  }
  ctx.write("velocity_sweep.csv", table);
  const auto cross = crossover(cfg.velocity_values, diffs);
  return io::Json{{"points", points},
                  {"crossover_v_um_s", cross ? io::Json(*cross) : io::Json(nullptr)}};
}

inline PhiLookup phi_lookup(RecipeContext& ctx, const SimConfig& base) {
  return [&ctx, base](double d) -> std::optional<double> {
    SimConfig sim = base;
    sim.distance = d;
    sim.num_slots = 1;
    return ctx.cache().get(sim, ctx.cfg().num_probe_molecules, ctx.workers()).phi.front();
  };
}

inline io::Json run_heatmap(RecipeContext& ctx, bool simulate) {
  const auto& cfg = ctx.cfg();
  io::Json per_velocity = io::Json::array();
  for (std::size_t iv = 0; iv < cfg.velocity_values.size(); ++iv) {
    const double v = cfg.velocity_values[iv];
    SimConfig base = cfg.sim;
    base.set_axial_drift(v);
    base.num_slots = 1;
    base.rng_seed = derive_seed(cfg.sim.rng_seed, iv);
    const Heatmap map = heatmap_grid(cfg.distance_values, cfg.ntx_values, base,
                                     phi_lookup(ctx, base), {simulate, ctx.workers()});
    const std::string stem = (simulate ? "heatmap_v" : "delta_map_v") + tag_for(v);
    auto table = io::heatmap_table(map);
    auto with_meta = ctx.table({"d_um", "ntx", "rmse_gauss", "rmse_poisson", "rmse_binom",
                                "delta_analytic", "sim_difference"});
    with_meta.add_meta("drift_velocity_um_s", tag_for(v));
    for (const auto& c : map.cells) {
      with_meta.add_row(c.d_um, c.ntx, c.rmse_gauss, c.rmse_poisson, c.rmse_binom,
                        c.delta_analytic, c.sim_difference);
    }
    ctx.write(stem + ".csv", with_meta);

    const auto analytic = zero_contour(map, &HeatmapCell::delta_analytic);
    auto contour = ctx.table({"ntx", "d_um"});
    contour.add_meta("series", "delta_analytic");
    for (const auto& p : analytic) contour.add_row(p.ntx, p.d_um);
    ctx.write(stem + "_contour_analytic.csv", contour);

    io::Json entry{{"v_um_s", v},
                   {"poisson_region_cells_analytic",
                    poisson_region_size(map, &HeatmapCell::delta_analytic)},
                   {"contour_points_analytic", analytic.size()}};
    if (simulate) {
      const auto sim_contour = zero_contour(map, &HeatmapCell::sim_difference);
      auto t = ctx.table({"ntx", "d_um"});
      t.add_meta("series", "sim_difference");
      for (const auto& p : sim_contour) t.add_row(p.ntx, p.d_um);
      ctx.write(stem + "_contour_sim.csv", t);
      std::size_t agree = 0;
      for (const auto& c : map.cells) {
        agree += (c.delta_analytic > 0.0) == (c.sim_difference > 0.0);
      }
      entry["poisson_region_cells_sim"] = poisson_region_size(map, &HeatmapCell::sim_difference);
      entry["sign_agreement"] = static_cast<double>(agree) / static_cast<double>(map.cells.size());
    }
    per_velocity.push_back(entry);
  }
  return io::Json{{"velocities", per_velocity}};
}

inline io::Json run_ber_sweep(RecipeContext& ctx) {
  const auto& cfg = ctx.cfg();
  io::Json per_velocity = io::Json::array();
  for (std::size_t iv = 0; iv < cfg.velocity_values.size(); ++iv) {
    const double v = cfg.velocity_values[iv];
    SimConfig sim = cfg.sim;
    sim.set_axial_drift(v);
    sim.rng_seed = derive_seed(cfg.sim.rng_seed, iv);
    const ChannelResponse phi = ctx.cache().get(sim, cfg.num_probe_molecules, ctx.workers());
    BerCurve curve = simulate_ber(cfg.error, sim, cfg.num_bits, ctx.workers());
    add_model_curves(curve, cfg.error, phi);

    auto table = ctx.table({"threshold", "pe_binomial", "pe_poisson", "pe_gaussian", "pe_sim",
                            "pe_sim_ci_low", "pe_sim_ci_high"});
    table.add_meta("drift_velocity_um_s", tag_for(v));
    table.add_meta("scored_bits", std::to_string(curve.scored_bits));
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
      table.add_row(curve.thresholds[i], curve.pe_binomial[i], curve.pe_poisson[i],
                    curve.pe_gaussian[i], curve.pe_sim[i], curve.pe_sim_ci_low[i],
                    curve.pe_sim_ci_high[i]);
    }
    ctx.write("ber_v" + tag_for(v) + ".csv", table);

    io::Json optimal;
    for (auto s : {BerSeries::binomial, BerSeries::poisson, BerSeries::gaussian,
                   BerSeries::simulation}) {
      optimal[std::string(to_string(s))] = optimal_threshold(curve, s);
    }
    per_velocity.push_back({{"v_um_s", v}, {"phi", phi.phi}, {"optimal_threshold", optimal}});
  }
  return io::Json{{"velocities", per_velocity}};
}

}  // namespace detail

/// Runs a recipe and writes its outputs plus manifest.json into recipe.out_dir.
inline RecipeResult run_recipe(const ExperimentRecipe& recipe) {
  const auto start = std::chrono::steady_clock::now();
  ResolvedConfig cfg = resolve_recipe_config(recipe);
  std::error_code ec;
  std::filesystem::create_directories(recipe.out_dir, ec);
  if (ec || !std::filesystem::is_directory(recipe.out_dir)) {
    throw ConfigError("--out", "cannot create output directory '" + recipe.out_dir.string() + "'");
  }
  {
    const auto probe = recipe.out_dir / ".write_probe";
    std::ofstream f(probe);
    if (!f) {
      throw ConfigError("--out", "output directory '" + recipe.out_dir.string() +
                                     "' is not writable");
    }
    f.close();
    std::filesystem::remove(probe, ec);
  }

  detail::RecipeContext ctx(recipe, cfg);
  io::Json summary;
  switch (recipe.name) {
    case RecipeName::cdf_compare: summary = detail::run_cdf_compare(ctx); break;
    case RecipeName::ntx_sweep: summary = detail::run_ntx_sweep(ctx); break;
    case RecipeName::velocity_sweep: summary = detail::run_velocity_sweep(ctx); break;
    case RecipeName::rmse_heatmap: summary = detail::run_heatmap(ctx, true); break;
    case RecipeName::delta_map: summary = detail::run_heatmap(ctx, false); break;
    case RecipeName::ber_sweep: summary = detail::run_ber_sweep(ctx); break;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  io::Json outputs = io::Json::array();
  for (const auto& f : ctx.files()) outputs.push_back(f.filename().string());
  const io::Json manifest{
      {"recipe", to_string(recipe.name)},
      {"scale", recipe.scale == Scale::paper ? "paper" : "quick"},
      {"code_version", MCVD_VERSION},
      {"seed", cfg.sim.rng_seed},
      {"workers", recipe.workers},
      {"wall_time_s", wall},
      {"resolved_config", to_json(cfg)},
      {"phi_cache", {{"hits", ctx.cache().hits()}, {"misses", ctx.cache().misses()}}},
      {"outputs", outputs},
      {"summary", summary},
  };
  const auto manifest_path = recipe.out_dir / "manifest.json";
  io::write_json(manifest_path, manifest);

  RecipeResult result{std::move(cfg), ctx.files(), summary};
  result.files.push_back(manifest_path);
  return result;
}

}  // namespace mcvd
