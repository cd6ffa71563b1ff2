#pragma once

// CSV and JSON writers. CSV files open with a '#'-prefixed metadata block
// followed by a header row; numbers are printed with a fixed format so equal
// inputs give byte-identical files.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mcvd/arrival_models.hpp"
#include "mcvd/error_analysis.hpp"
#include "mcvd/heatmap.hpp"
#include "mcvd/metrics.hpp"
#include "mcvd/sim_core.hpp"

namespace mcvd::io {

using Json = nlohmann::ordered_json;

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_number(std::int64_t v) { return std::to_string(v); }

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_meta(const std::string& key, const std::string& value) {
    meta_.emplace_back(key, value);
  }

  template <typename... Cells>
  void add_row(const Cells&... cells) {
    std::vector<std::string> row;
    row.reserve(sizeof...(Cells));
    (row.push_back(cell(cells)), ...);
    if (row.size() != columns_.size()) throw std::logic_error("csv row width mismatch");
    rows_.push_back(std::move(row));
  }

  std::string str() const {
    std::string out;
    for (const auto& [k, v] : meta_) out += "# " + k + ": " + v + "\n";
    out += join(columns_);
    for (const auto& r : rows_) out += join(r);
    return out;
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << str();
    if (!f) throw std::runtime_error("failed writing " + path.string());
  }

  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return format_number(v); }
  template <typename Int>
    requires std::is_integral_v<Int>
  static std::string cell(Int v) {
    return std::to_string(v);
  }

  static std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    return line + "\n";
  }

  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
};

inline void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << doc.dump(2) << "\n";
}

inline CsvTable histogram_table(const HitHistogram& h) {
  CsvTable t({"slot_index", "count"});
  t.add_meta("total_emitted", std::to_string(h.total_emitted));
  t.add_meta("unabsorbed", std::to_string(h.unabsorbed));
  for (std::size_t i = 0; i < h.slot_counts.size(); ++i) t.add_row(i + 1, h.slot_counts[i]);
  return t;
}

inline CsvTable channel_table(const ChannelResponse& r) {
  CsvTable t({"slot_index", "phi"});
  for (std::size_t i = 0; i < r.phi.size(); ++i) t.add_row(i + 1, r.phi[i]);
  return t;
}

inline Json to_json(const HitHistogram& h) {
  return Json{{"slot_counts", h.slot_counts},
              {"total_emitted", h.total_emitted},
              {"unabsorbed", h.unabsorbed}};
}

inline Json to_json(const ChannelResponse& r) { return Json{{"phi", r.phi}}; }

/// (x, F(x)) over the full integer support.
inline CsvTable cdf_table(const CountCdf& cdf) {
  CsvTable t({"x", "F"});
  t.add_meta("model", std::string(to_string(cdf.kind())));
  t.add_meta("mean", format_number(cdf.mean()));
  t.add_meta("variance", format_number(cdf.variance()));
  const auto v = cdf.values();
  for (std::size_t x = 0; x < v.size(); ++x) t.add_row(x, v[x]);
  return t;
}

inline CsvTable heatmap_table(const Heatmap& map) {
  CsvTable t({"d_um", "ntx", "rmse_gauss", "rmse_poisson", "rmse_binom", "delta_analytic",
              "sim_difference"});
  for (const auto& c : map.cells) {
    t.add_row(c.d_um, c.ntx, c.rmse_gauss, c.rmse_poisson, c.rmse_binom, c.delta_analytic,
              c.sim_difference);
  }
  return t;
}

inline CsvTable contour_table(const std::vector<ContourPoint>& points) {
  CsvTable t({"ntx", "d_um"});
  for (const auto& p : points) t.add_row(p.ntx, p.d_um);
  return t;
}

inline CsvTable ber_table(const BerCurve& curve) {
  CsvTable t({"threshold", "pe_binomial", "pe_poisson", "pe_gaussian", "pe_sim", "pe_sim_ci_low",
              "pe_sim_ci_high"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto get = [&](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : nan; };
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    t.add_row(curve.thresholds[i], get(curve.pe_binomial, i), get(curve.pe_poisson, i),
              get(curve.pe_gaussian, i), get(curve.pe_sim, i), get(curve.pe_sim_ci_low, i),
              get(curve.pe_sim_ci_high, i));
  }
  return t;
}

}  // namespace mcvd::io
