#pragma once

// Distance x N^Tx grids of the Gaussian-vs-Poisson RMSE gap, analytic and
// simulated, and their zero-level boundary.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mcvd/arrival_models.hpp"
#include "mcvd/config.hpp"
#include "mcvd/metrics.hpp"
#include "mcvd/sim_core.hpp"

namespace mcvd {

struct HeatmapCell {
  double d_um = 0.0;
  std::int64_t ntx = 0;
  double phi1 = 0.0;
  double delta_analytic = 0.0;
  // Simulation columns; NaN when the grid was built analytically only.
  double rmse_gauss = std::numeric_limits<double>::quiet_NaN();
  double rmse_poisson = std::numeric_limits<double>::quiet_NaN();
  double rmse_binom = std::numeric_limits<double>::quiet_NaN();
  double sim_difference = std::numeric_limits<double>::quiet_NaN();
};

/// Cells are ordered by (d, ntx), d-major.
struct Heatmap {
  std::vector<double> d_values;
  std::vector<std::int64_t> ntx_values;
  std::vector<HeatmapCell> cells;
  bool simulated = false;

  const HeatmapCell& at(std::size_t d_index, std::size_t ntx_index) const {
    return cells[d_index * ntx_values.size() + ntx_index];
  }
};

/// phi_1 for a distance, or nullopt if unavailable.
using PhiLookup = std::function<std::optional<double>(double d_um)>;

struct HeatmapOptions {
  bool simulate = false;
  std::size_t workers = 1;
};

/// Builds the grid. With options.simulate, each d row draws cfg.num_trials
/// emissions of max(ntx_values) molecules (seeded per row from cfg.rng_seed)
/// and scores every ntx on the leading molecules of those trials.
inline Heatmap heatmap_grid(const std::vector<double>& d_values,
                            const std::vector<std::int64_t>& ntx_values,
                            const SimConfig& cfg_template, const PhiLookup& phi_for,
                            const HeatmapOptions& options = {}) {
  if (d_values.empty() || ntx_values.empty()) throw ConfigError("grid", "empty heatmap axis");
  Heatmap map;
  map.d_values = d_values;
  map.ntx_values = ntx_values;
  map.simulated = options.simulate;
  map.cells.reserve(d_values.size() * ntx_values.size());

  for (std::size_t i = 0; i < d_values.size(); ++i) {
    const double d = d_values[i];
    const auto phi = phi_for(d);
    if (!phi || !(*phi > 0.0 && *phi < 1.0)) {
      std::ostringstream msg;
      msg << "no usable phi_1 for grid point d = " << d << " um";
      throw DomainError(msg.str());
    }
    const ChannelResponse channel{{*phi}};

    std::vector<std::vector<std::int64_t>> counts;
    if (options.simulate) {
      SimConfig cfg = cfg_template;
      cfg.distance = d;
      cfg.num_slots = 1;
      cfg.rng_seed = derive_seed(cfg_template.rng_seed, i);
      counts = prefix_slot_counts(cfg, ntx_values, options.workers);
    }

    for (std::size_t j = 0; j < ntx_values.size(); ++j) {
      HeatmapCell cell;
      cell.d_um = d;
      cell.ntx = ntx_values[j];
      cell.phi1 = *phi;
      cell.delta_analytic = delta_boundary(cell.ntx, *phi);
      if (options.simulate) {
        std::vector<std::int64_t> samples;
        samples.reserve(counts.size());
        for (const auto& row : counts) samples.push_back(row[j]);
        const auto report =
            score_models(empirical_cdf(samples, cell.ntx), EmissionHistory{{cell.ntx}}, channel);
        cell.rmse_gauss = report.gaussian;
        cell.rmse_poisson = report.poisson;
        cell.rmse_binom = report.binomial;
        cell.sim_difference = report.gaussian - report.poisson;
      }
      map.cells.push_back(cell);
    }
  }
  return map;
}

struct ContourPoint {
  std::int64_t ntx = 0;
  double d_um = 0.0;

  friend bool operator==(const ContourPoint&, const ContourPoint&) = default;
};

using CellField = double HeatmapCell::*;

/// Zero-level crossings of a field along the distance axis, one scan per
/// ntx column, linearly interpolated. Ordered by ntx, then d.
inline std::vector<ContourPoint> zero_contour(const Heatmap& map, CellField field) {
  std::vector<ContourPoint> out;
  for (std::size_t j = 0; j < map.ntx_values.size(); ++j) {
    for (std::size_t i = 0; i + 1 < map.d_values.size(); ++i) {
      const double a = map.at(i, j).*field;
      const double b = map.at(i + 1, j).*field;
      if (std::isnan(a) || std::isnan(b)) continue;
      const double da = map.d_values[i];
      const double db = map.d_values[i + 1];
      if (a == 0.0) {
        out.push_back({map.ntx_values[j], da});
      } else if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
        out.push_back({map.ntx_values[j], da + (db - da) * a / (a - b)});
      }
    }
    const std::size_t last = map.d_values.size() - 1;
    if (map.at(last, j).*field == 0.0) out.push_back({map.ntx_values[j], map.d_values[last]});
  }
  return out;
}

/// Number of cells where the field is positive (the Poisson model is closer).
inline std::size_t poisson_region_size(const Heatmap& map, CellField field) {
  std::size_t n = 0;
  for (const auto& c : map.cells) n += (c.*field > 0.0);
  return n;
}

}  // namespace mcvd
