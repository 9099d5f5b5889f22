#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cec/linalg.hpp"

namespace cec {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(std::size_t x, std::size_t y) const noexcept { return pixels[y * width + x]; }
};

/// Which side of the threshold counts as foreground.
enum class Polarity { Dark, Bright };

struct Threshold {
  enum class Method { Otsu, Fixed };
  Method method = Method::Otsu;
  int value = 128;  // used by Fixed

  static Threshold otsu() { return {Method::Otsu, 0}; }
  static Threshold fixed(int t) { return {Method::Fixed, t}; }
};

struct BinaryMask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> bits;  // row-major, 1 = foreground
  Polarity foreground = Polarity::Dark;
  /// Threshold actually applied (the Otsu result when Otsu was requested).
  int threshold = 0;

  bool at(std::size_t x, std::size_t y) const noexcept { return bits[y * width + x] != 0; }
  std::size_t foreground_count() const noexcept;
};

/// Otsu's threshold t: gray levels <= t form the lower class. When several
/// levels maximize the between-class variance the middle of that run is
/// returned. Throws ConstantImage for a single-valued image.
int otsu_threshold(const GrayImage& image);

/// Fixed(t): Bright marks v > t, Dark marks v < t. Otsu: Bright marks v > t,
/// Dark marks v <= t, with t from otsu_threshold. Throws EmptyInput for an
/// empty image and ConfigError for t outside 0..255.
BinaryMask binarize(const GrayImage& image, Threshold threshold, Polarity polarity);

/// Clears foreground pixels with no foreground 8-neighbour.
BinaryMask despeckle(const BinaryMask& mask);

/// One point (x + 0.5, y + 0.5) per foreground pixel in row-major order; y
/// grows downward.
PointCloud mask_to_points(const BinaryMask& mask);

}  // namespace cec
