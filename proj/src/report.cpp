#include "cec/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "cec/error.hpp"
#include "cec/io.hpp"

namespace cec {

namespace {

[[noreturn]] void config_error(const std::string& token, const std::string& why) {
  throw Error(ErrorKind::ConfigError, "'" + token + "': " + why);
}

double parse_number(std::string_view tok) {
  double v = 0.0;
  std::string_view s = tok;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    config_error(std::string(tok), "malformed number");
  }
  return v;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Family specs

ParsedFamily parse_family_spec(const std::string& text) {
  ParsedFamily out;
  out.text = text;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  const bool has_arg = colon != std::string::npos;

  auto no_arg = [&](FamilySpec spec) {
    if (has_arg) config_error(text, "family '" + head + "' takes no argument");
    out.spec = std::move(spec);
  };

  if (head == "full") {
    no_arg(family::Full{});
  } else if (head == "diag") {
    no_arg(family::Diagonal{});
  } else if (head == "spherical") {
    no_arg(family::Spherical{});
  } else if (head == "fixed-radius") {
    if (!has_arg || arg.empty()) config_error(text, "fixed-radius needs a value");
    const double r = parse_number(arg);
    if (!(r > 0.0)) config_error(arg, "radius must be positive");
    out.spec = make_fixed_radius(r);
  } else if (head == "fixed-eigs") {
    if (!has_arg || arg.empty()) config_error(text, "fixed-eigs needs a comma-separated list");
    Vector lambdas;
    std::size_t start = 0;
    while (true) {
      const auto comma = arg.find(',', start);
      const std::string tok = arg.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const double l = parse_number(tok);
      if (!(l > 0.0)) config_error(tok, "eigenvalues must be positive");
      lambdas.push_back(l);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!std::is_sorted(lambdas.begin(), lambdas.end(), std::greater<>())) {
      std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
      out.warnings.push_back("fixed-eigs values reordered to descending order");
    }
    out.spec = make_fixed_eigenvalues(std::move(lambdas));
  } else if (head == "fixed-cov") {
    if (!has_arg || arg.size() < 2 || arg.front() != '@') config_error(text, "fixed-cov expects @<path>");
    try {
      out.spec = make_fixed_covariance(load_matrix_file(arg.substr(1)));
    } catch (const Error& e) {
      config_error(arg, e.what());
    }
  } else {
    config_error(head, "unknown family");
  }
  return out;
}

ParsedPoolEntry parse_pool_entry(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 == text.size()) {
    config_error(text, "expected <family>:<count>");
  }
  const std::string count_text = text.substr(colon + 1);
  long long count = 0;
  const auto res = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
  if (res.ec != std::errc() || res.ptr != count_text.data() + count_text.size()) {
    config_error(count_text, "cluster count is not an integer");
  }
  if (count < 1) config_error(count_text, "cluster count must be at least 1");
  ParsedPoolEntry entry;
  entry.family = parse_family_spec(text.substr(0, colon));
  entry.count = static_cast<std::size_t>(count);
  return entry;
}

// ---------------------------------------------------------------------------
// Report

double round_sig9(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  return std::strtod(fmt(v).c_str(), nullptr);
}

RunReport make_report(const ClusteringResult& result, const EngineConfig& config,
                      std::span<const std::string> family_texts, InputDescriptor input) {
  RunReport rep;
  rep.input = std::move(input);
  rep.family_texts.assign(family_texts.begin(), family_texts.end());
  rep.config = config;
  rep.final_energy = round_sig9(result.final_energy);
  rep.sweeps_used = result.sweeps_used;
  rep.best_restart = result.best_restart;
  for (double e : result.restart_energies) rep.restart_energies.push_back(round_sig9(e));
  for (double e : result.energy_trace) rep.energy_trace.push_back(round_sig9(e));
  rep.warnings = result.warnings;

  for (const auto& fc : result.clusters) {
    ReportCluster c;
    c.family_index = fc.family_index;
    c.family = family_name(config.family_pool.at(fc.family_index).family);
    c.count = fc.count;
    c.weight = round_sig9(fc.weight);
    c.cross_entropy = round_sig9(fc.cross_entropy);
    for (double m : fc.gaussian.mean) c.mean.push_back(round_sig9(m));
    const SymMatrix& cov = fc.gaussian.covariance;
    const std::size_t n = cov.dim();
    c.covariance = SymMatrix(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) c.covariance.set(i, j, round_sig9(cov(i, j)));
    const EigenDecomp ed = eigh(cov);
    for (double l : ed.values) c.eigenvalues.push_back(round_sig9(l));
    if (n == 2) {
      const Vector v = ed.vector(0);
      double deg = std::atan2(v[1], v[0]) * 180.0 / std::numbers::pi;
      if (deg <= -90.0) deg += 180.0;
      if (deg > 90.0) deg -= 180.0;
      c.orientation_deg = round_sig9(deg);
    }
    rep.clusters.push_back(std::move(c));
  }
  return rep;
}

std::string report_to_json(const RunReport& rep) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = kReportSchema;

  ordered_json in;
  in["path"] = rep.input.path;
  in["kind"] = rep.input.kind;
  in["points"] = rep.input.points;
  in["dim"] = rep.input.dim;
  if (rep.input.width) in["width"] = *rep.input.width;
  if (rep.input.height) in["height"] = *rep.input.height;
  if (rep.input.threshold) in["threshold"] = *rep.input.threshold;
  if (rep.input.threshold_applied) in["threshold_applied"] = *rep.input.threshold_applied;
  if (rep.input.polarity) in["polarity"] = *rep.input.polarity;
  j["input"] = in;

  ordered_json cfg;
  ordered_json fams = ordered_json::array();
  for (std::size_t f = 0; f < rep.config.family_pool.size(); ++f) {
    ordered_json fe;
    fe["spec"] = f < rep.family_texts.size() ? rep.family_texts[f] : family_name(rep.config.family_pool[f].family);
    fe["family"] = family_name(rep.config.family_pool[f].family);
    fe["initial_clusters"] = rep.config.family_pool[f].initial_clusters;
    fams.push_back(fe);
  }
  cfg["families"] = fams;
  cfg["seed"] = rep.config.seed;
  cfg["min_weight"] = rep.config.min_weight;
  cfg["removal"] = rep.config.removal == Removal::Online ? "online" : "sweep";
  cfg["max_sweeps"] = rep.config.max_sweeps;
  cfg["restarts"] = rep.config.restarts;
  cfg["epsilon"] = rep.config.epsilon;
  if (rep.config.min_cluster_size) {
    cfg["min_cluster_size"] = *rep.config.min_cluster_size;
  } else {
    cfg["min_cluster_size"] = nullptr;
  }
  j["config"] = cfg;

  ordered_json clusters = ordered_json::array();
  for (std::size_t k = 0; k < rep.clusters.size(); ++k) {
    const auto& c = rep.clusters[k];
    ordered_json cj;
    cj["id"] = k;
    cj["family"] = c.family;
    cj["family_index"] = c.family_index;
    cj["count"] = c.count;
    cj["weight"] = c.weight;
    cj["cross_entropy"] = c.cross_entropy;
    cj["mean"] = c.mean;
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < c.covariance.dim(); ++i) {
      std::vector<double> row(c.covariance.dim());
      for (std::size_t jj = 0; jj < row.size(); ++jj) row[jj] = c.covariance(i, jj);
      rows.push_back(row);
    }
    cj["covariance"] = rows;
    cj["eigenvalues"] = c.eigenvalues;
    if (c.orientation_deg) {
      cj["orientation_deg"] = *c.orientation_deg;
    } else {
      cj["orientation_deg"] = nullptr;
    }
    clusters.push_back(cj);
  }
  j["clusters"] = clusters;
  j["final_energy"] = rep.final_energy;
  j["sweeps_used"] = rep.sweeps_used;
  j["best_restart"] = rep.best_restart;
  j["restart_energies"] = rep.restart_energies;
  j["energy_trace"] = rep.energy_trace;
  j["warnings"] = rep.warnings;
  if (rep.timing_ms) j["timing_ms"] = *rep.timing_ms;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// SVG

const char* palette_color(std::size_t index) noexcept {
  static constexpr const char* kPalette[12] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                               "#bcbd22", "#17becf", "#393b79", "#ad494a"};
  return kPalette[index % 12];
}

std::string render_svg(const RunReport& rep, const SvgOptions& opt) {
  const std::size_t dim = rep.input.dim != 0 ? rep.input.dim
                          : opt.points     ? opt.points->dim()
                                           : 2;
  if (dim != 2) {
    throw Error(ErrorKind::UnsupportedDimensionForSvg,
                "SVG overlay needs 2-D data, got dimension " + std::to_string(dim));
  }

  struct Shape {
    double cx, cy, rx, ry, angle;
  };
  std::vector<Shape> shapes;
  for (const auto& c : rep.clusters) {
    shapes.push_back({c.mean[0], c.mean[1], 2.0 * std::sqrt(std::max(0.0, c.eigenvalues[0])),
                      2.0 * std::sqrt(std::max(0.0, c.eigenvalues[1])), c.orientation_deg.value_or(0.0)});
  }

  double min_x = 0.0, min_y = 0.0, width = 1.0, height = 1.0;
  double dot = 0.5;
  if (opt.mask) {
    width = static_cast<double>(std::max<std::size_t>(opt.mask->width, 1));
    height = static_cast<double>(std::max<std::size_t>(opt.mask->height, 1));
  } else {
    double lo_x = std::numeric_limits<double>::infinity(), lo_y = lo_x;
    double hi_x = -lo_x, hi_y = -lo_x;
    auto grow = [&](double x, double y) {
      lo_x = std::min(lo_x, x);
      lo_y = std::min(lo_y, y);
      hi_x = std::max(hi_x, x);
      hi_y = std::max(hi_y, y);
    };
    if (opt.points) {
      for (std::size_t i = 0; i < opt.points->size(); ++i) grow((*opt.points)[i][0], (*opt.points)[i][1]);
    }
    for (const auto& s : shapes) {
      const double r = std::max(s.rx, s.ry);
      grow(s.cx - r, s.cy - r);
      grow(s.cx + r, s.cy + r);
    }
    if (lo_x <= hi_x) {
      const double extent = std::max({hi_x - lo_x, hi_y - lo_y, 1e-9});
      const double margin = 0.05 * extent;
      min_x = lo_x - margin;
      min_y = lo_y - margin;
      width = hi_x - lo_x + 2 * margin;
      height = hi_y - lo_y + 2 * margin;
      dot = 0.004 * extent;
    }
  }
  const double stroke = std::max(width, height) / 400.0;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" viewBox=\"" << fmt(min_x) << ' ' << fmt(min_y) << ' ' << fmt(width) << ' '
      << fmt(height) << "\">\n";
  out << "  <rect x=\"" << fmt(min_x) << "\" y=\"" << fmt(min_y) << "\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" fill=\"white\"/>\n";

  if (opt.points && opt.labels.size() == opt.points->size()) {
    std::vector<std::vector<std::size_t>> groups(rep.clusters.size() + 1);
    for (std::size_t i = 0; i < opt.labels.size(); ++i) {
      const int l = opt.labels[i];
      groups[l >= 0 && static_cast<std::size_t>(l) < rep.clusters.size() ? static_cast<std::size_t>(l)
                                                                            : rep.clusters.size()]
          .push_back(i);
    }
    out << "  <g id=\"points\" stroke=\"none\">\n";
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (groups[g].empty()) continue;
      out << "    <g fill=\"" << (g < rep.clusters.size() ? palette_color(g) : "#000000") << "\">\n";
      for (std::size_t i : groups[g]) {
        const auto p = (*opt.points)[i];
        out << "      <circle cx=\"" << fmt(p[0]) << "\" cy=\"" << fmt(p[1]) << "\" r=\"" << fmt(dot)
            << "\"/>\n";
      }
      out << "    </g>\n";
    }
    out << "  </g>\n";
  }

  out << "  <g id=\"ellipses\" fill=\"none\" stroke-width=\"" << fmt(stroke) << "\">\n";
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    const Shape& s = shapes[k];
    out << "    <ellipse id=\"cluster-" << k << "\" cx=\"" << fmt(s.cx) << "\" cy=\"" << fmt(s.cy) << "\" rx=\""
        << fmt(s.rx) << "\" ry=\"" << fmt(s.ry) << "\" transform=\"rotate(" << fmt(s.angle) << ' ' << fmt(s.cx)
        << ' ' << fmt(s.cy) << ")\" stroke=\"" << palette_color(k) << "\"/>\n";
  }
  out << "  </g>\n</svg>\n";
  return out.str();
}

}  // namespace cec
