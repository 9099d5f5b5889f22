#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cec/engine.hpp"
#include "cec/families.hpp"
#include "cec/image.hpp"

namespace cec {

inline constexpr const char* kReportSchema = "cec-report/1";

struct ParsedFamily {
  FamilySpec spec;
  std::string text;
  std::vector<std::string> warnings;
};

/// `full` | `diag` | `spherical` | `fixed-radius:<r>` |
/// `fixed-eigs:<λ1>,...,<λN>` | `fixed-cov:@<path>`. Throws ConfigError naming
/// the offending token. fixed-eigs values are sorted descending, with a
/// warning when that reorders them.
ParsedFamily parse_family_spec(const std::string& text);

/// `<spec>:<count>`, the count being the text after the last colon.
struct ParsedPoolEntry {
  ParsedFamily family;
  std::size_t count = 0;
};
ParsedPoolEntry parse_pool_entry(const std::string& text);

struct InputDescriptor {
  std::string path;
  std::string kind;  // "csv", "png", "pgm", or "memory"
  std::size_t points = 0;
  std::size_t dim = 0;
  std::optional<std::size_t> width, height;
  std::optional<std::string> threshold;  // as requested, e.g. "otsu" or "fixed:128"
  std::optional<int> threshold_applied;
  std::optional<std::string> polarity;
};

struct ReportCluster {
  std::size_t family_index = 0;
  std::string family;
  std::size_t count = 0;
  double weight = 0.0;
  double cross_entropy = 0.0;
  Vector mean;
  SymMatrix covariance;
  Vector eigenvalues;  // descending
  /// Degrees from +x toward +y of the principal eigenvector; 2-D only.
  std::optional<double> orientation_deg;
};

/// Values are rounded to 9 significant digits on construction so the JSON
/// and SVG renderings agree exactly.
struct RunReport {
  InputDescriptor input;
  std::vector<std::string> family_texts;
  EngineConfig config;
  std::vector<ReportCluster> clusters;
  double final_energy = 0.0;
  int sweeps_used = 0;
  int best_restart = 0;
  std::vector<double> restart_energies;
  std::vector<double> energy_trace;
  std::vector<std::string> warnings;
  std::optional<double> timing_ms;
};

/// Rounds to 9 significant digits.
double round_sig9(double v);

RunReport make_report(const ClusteringResult& result, const EngineConfig& config,
                      std::span<const std::string> family_texts, InputDescriptor input);

std::string report_to_json(const RunReport& report);

struct SvgOptions {
  /// Optional point layer, colored by label.
  const PointCloud* points = nullptr;
  std::span<const int> labels;
  /// When given, the canvas is the mask's pixel grid.
  const BinaryMask* mask = nullptr;
};

/// SVG 1.1 overlay: one ellipse per cluster centered at its mean with
/// semi-axes 2√λ along the eigenvectors. Throws UnsupportedDimensionForSvg
/// unless the data are 2-D.
std::string render_svg(const RunReport& report, const SvgOptions& options = {});

/// Fixed 12-color palette cycled by cluster index.
const char* palette_color(std::size_t index) noexcept;

}  // namespace cec
