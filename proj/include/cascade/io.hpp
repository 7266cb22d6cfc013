#pragma once

// CSV and report output. Fixed dialect for byte reproducibility: comma
// separated, '.' decimal point, %.12g for dataset values, %.17g for matrix
// exports, '#'-prefixed metadata lines before the header row.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascade/config_io.hpp"
#include "cascade/entanglement.hpp"
#include "cascade/lyapunov.hpp"
#include "cascade/network.hpp"
#include "cascade/oracle.hpp"

namespace cascade {

inline std::string format_number(double v, int precision) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

inline json layout_manifest(const ModeLayout& layout) {
  json out;
  out["modes"] = json::array();
  for (const Mode& m : layout.modes()) out["modes"].push_back(m.label());
  out["quadratures"] = layout.quadrature_labels();
  return out;
}

/// Row-major full-precision matrix export with the layout manifest in
/// '#' comment lines.
inline void write_matrix_csv(std::ostream& os, const MatrixXd& m, const ModeLayout& layout,
                             const std::vector<std::string>& metadata = {}) {
  for (const auto& line : metadata) os << "# " << line << "\n";
  os << "# layout: " << layout_manifest(layout).dump() << "\n";
  const auto labels = layout.quadrature_labels();
  for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? "," : "") << labels[i];
  os << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      os << (c ? "," : "") << format_number(m(r, c), 17);
    os << "\n";
  }
}

inline void write_matrix_csv_file(const std::string& path, const MatrixXd& m,
                                  const ModeLayout& layout,
                                  const std::vector<std::string>& metadata = {}) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open output file '" + path + "'");
  write_matrix_csv(os, m, layout, metadata);
}

inline json entanglement_report_to_json(const EntanglementReport& report) {
  json out;
  out["modes"] = report.mode_labels;
  out["pairs"] = json::array();
  for (const auto& p : report.pairs)
    out["pairs"].push_back({{"mode_i", report.mode_labels[p.mode_i]},
                            {"mode_j", report.mode_labels[p.mode_j]},
                            {"log_negativity", p.log_neg},
                            {"zeta", p.zeta}});
  out["symplectic_eigenvalues"] = report.symplectic_spectrum;
  out["ppt_witnesses"] = json::array();
  for (std::size_t l = 0; l < report.ppt_witnesses.size(); ++l)
    out["ppt_witnesses"].push_back({{"transposed_mode", report.mode_labels[l]},
                                    {"negative_eigenvalues", report.ppt_witnesses[l]}});
  out["genuine_multipartite"] = report.genuine_multipartite;
  return out;
}

inline void write_comparison_csv(std::ostream& os, const ComparisonReport& report,
                                 const ModeLayout& layout) {
  os << "# z-scores (estimate - reference) / standard error\n";
  write_matrix_csv(os, report.z, layout);
}

}  // namespace cascade
