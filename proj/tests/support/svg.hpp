#pragma once

// Minimal reader for the ellipses in a rendered overlay.

#include <regex>
#include <string>
#include <vector>

namespace cec::testing {

struct SvgEllipse {
  std::string id;
  double cx, cy, rx, ry, angle;
  std::string rx_text, ry_text;
};

inline std::vector<SvgEllipse> svg_ellipses(const std::string& svg) {
  static const std::regex re(
      R"re(<ellipse id="([^"]*)" cx="([^"]*)" cy="([^"]*)" rx="([^"]*)" ry="([^"]*)" transform="rotate\(([^ ]*) [^)]*\)")re");
  std::vector<SvgEllipse> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.push_back({m[1], std::stod(m[2]), std::stod(m[3]), std::stod(m[4]), std::stod(m[5]), std::stod(m[6]),
                   m[4], m[5]});
  }
  return out;
}

}  // namespace cec::testing
