#include "cec/image.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "cec/error.hpp"

namespace cec {

std::size_t BinaryMask::foreground_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

int otsu_threshold(const GrayImage& image) {
  if (image.pixels.empty()) throw Error(ErrorKind::EmptyInput, "empty image");
  std::array<double, 256> hist{};
  for (auto v : image.pixels) hist[v] += 1.0;
  const double total = static_cast<double>(image.pixels.size());
  if (std::count_if(hist.begin(), hist.end(), [](double h) { return h > 0.0; }) < 2) {
    throw Error(ErrorKind::ConstantImage, "image is constant; Otsu needs two gray levels, use a fixed threshold");
  }

  double sum_all = 0.0;
  for (int v = 0; v < 256; ++v) sum_all += v * hist[v];

  std::array<double, 256> between{};
  double w0 = 0.0;
  double sum0 = 0.0;
  double best = -1.0;
  for (int t = 0; t < 256; ++t) {
    w0 += hist[t];
    sum0 += t * hist[t];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) {
      between[t] = -1.0;
      continue;
    }
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    between[t] = w0 * w1 * (m0 - m1) * (m0 - m1);
    best = std::max(best, between[t]);
  }
  // Middle of the first run of maximizers; a run appears when the histogram
  // has empty bins between the classes.
  const double tol = 1e-12 * best;
  int first = 0;
  while (between[first] < best - tol) ++first;
  int last = first;
  while (last + 1 < 256 && between[last + 1] >= best - tol) ++last;
  return (first + last) / 2;
}

BinaryMask binarize(const GrayImage& image, Threshold threshold, Polarity polarity) {
  if (image.pixels.empty() || image.width * image.height != image.pixels.size()) {
    throw Error(ErrorKind::EmptyInput, "empty or malformed image");
  }
  BinaryMask mask;
  mask.width = image.width;
  mask.height = image.height;
  mask.foreground = polarity;
  mask.bits.resize(image.pixels.size());

  if (threshold.method == Threshold::Method::Fixed) {
    const int t = threshold.value;
    if (t < 0 || t > 255) throw Error(ErrorKind::ConfigError, "threshold must be in 0..255, got " + std::to_string(t));
    mask.threshold = t;
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
      const int v = image.pixels[i];
      mask.bits[i] = polarity == Polarity::Bright ? v > t : v < t;
    }
  } else {
    const int t = otsu_threshold(image);
    mask.threshold = t;
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
      const int v = image.pixels[i];
      mask.bits[i] = polarity == Polarity::Bright ? v > t : v <= t;
    }
  }
  return mask;
}

BinaryMask despeckle(const BinaryMask& mask) {
  BinaryMask out = mask;
  const auto w = static_cast<long>(mask.width);
  const auto h = static_cast<long>(mask.height);
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      if (!mask.bits[y * w + x]) continue;
      bool has_neighbour = false;
      for (long dy = -1; dy <= 1 && !has_neighbour; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const long nx = x + dx;
          const long ny = y + dy;
          if (nx >= 0 && ny >= 0 && nx < w && ny < h && mask.bits[ny * w + nx]) {
            has_neighbour = true;
            break;
          }
        }
      }
      if (!has_neighbour) out.bits[y * w + x] = 0;
    }
  }
  return out;
}

PointCloud mask_to_points(const BinaryMask& mask) {
  std::vector<double> coords;
  coords.reserve(2 * mask.foreground_count());
  for (std::size_t y = 0; y < mask.height; ++y) {
    for (std::size_t x = 0; x < mask.width; ++x) {
      if (!mask.bits[y * mask.width + x]) continue;
      coords.push_back(static_cast<double>(x) + 0.5);
      coords.push_back(static_cast<double>(y) + 0.5);
    }
  }
  return PointCloud(2, std::move(coords));
}

}  // namespace cec
