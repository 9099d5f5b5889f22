#include "cec/io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string_view>
#include <vector>

#include "cec/error.hpp"

namespace cec {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorKind::IoError, "cannot open '" + path + "': " + std::strerror(errno));
  return f;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint8_t luma(unsigned r, unsigned g, unsigned b) {
  const double y = 0.2126 * r + 0.7152 * g + 0.0722 * b;
  return static_cast<std::uint8_t>(std::lround(std::min(255.0, y)));
}

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) *err = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

// Splits on commas, or on whitespace when the line has no comma.
std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  if (line.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) out.push_back(line.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

bool parse_row(std::string_view line, std::vector<double>& row) {
  row.clear();
  for (auto field : split_fields(line)) {
    double v = 0.0;
    if (!parse_double(field, v)) return false;
    row.push_back(v);
  }
  return !row.empty();
}

}  // namespace

GrayImage load_png(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw Error(ErrorKind::IoError, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  GrayImage img;
  std::vector<std::uint8_t> rgb;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::IoError, "cannot decode PNG '" + path + "': " + err);
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
  }
  png_read_update_info(png, info);

  img.width = png_get_image_width(png, info);
  img.height = png_get_image_height(png, info);
  const std::size_t channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  rgb.resize(stride * img.height);
  rows.resize(img.height);
  for (std::size_t y = 0; y < img.height; ++y) rows[y] = rgb.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  img.pixels.resize(img.width * img.height);
  for (std::size_t y = 0; y < img.height; ++y) {
    const std::uint8_t* row = rows[y];
    for (std::size_t x = 0; x < img.width; ++x) {
      const std::uint8_t* px = row + x * channels;
      img.pixels[y * img.width + x] = channels >= 3 ? luma(px[0], px[1], px[2]) : px[0];
    }
  }
  return img;
}

void save_png(const GrayImage& image, const std::string& path) {
  FilePtr f = open_file(path, "wb");
  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw Error(ErrorKind::IoError, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::IoError, "cannot encode PNG '" + path + "': " + err);
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixels.data() + y * image.width));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

GrayImage load_pgm(const std::string& path) {
  const std::string data = read_text(path);
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return data.substr(start, pos - start);
  };
  if (next_token() != "P5") throw Error(ErrorKind::IoError, "'" + path + "' is not a binary PGM (P5)");
  long w = 0, h = 0, maxval = 0;
  try {
    w = std::stol(next_token());
    h = std::stol(next_token());
    maxval = std::stol(next_token());
  } catch (const std::exception&) {
    throw Error(ErrorKind::IoError, "malformed PGM header in '" + path + "'");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
    throw Error(ErrorKind::IoError, "malformed PGM header in '" + path + "'");
  }
  ++pos;  // single whitespace after maxval
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (data.size() < pos + n * bpp) throw Error(ErrorKind::IoError, "truncated PGM '" + path + "'");
  GrayImage img{static_cast<std::size_t>(w), static_cast<std::size_t>(h), std::vector<std::uint8_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    unsigned v = static_cast<unsigned char>(data[pos + i * bpp]);
    if (bpp == 2) v = (v << 8) | static_cast<unsigned char>(data[pos + i * bpp + 1]);
    img.pixels[i] = maxval == 255 ? static_cast<std::uint8_t>(v)
                                  : static_cast<std::uint8_t>(std::lround(255.0 * v / static_cast<double>(maxval)));
  }
  return img;
}

void save_pgm(const GrayImage& image, const std::string& path) {
  FilePtr f = open_file(path, "wb");
  std::fprintf(f.get(), "P5\n%zu %zu\n255\n", image.width, image.height);
  if (std::fwrite(image.pixels.data(), 1, image.pixels.size(), f.get()) != image.pixels.size()) {
    throw Error(ErrorKind::IoError, "short write to '" + path + "'");
  }
}

GrayImage load_image(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  unsigned char sig[8] = {};
  const std::size_t got = std::fread(sig, 1, sizeof sig, f.get());
  f.reset();
  if (got == 8 && png_sig_cmp(sig, 0, 8) == 0) return load_png(path);
  if (got >= 2 && sig[0] == 'P' && sig[1] == '5') return load_pgm(path);
  throw Error(ErrorKind::IoError, "'" + path + "' is neither PNG nor binary PGM");
}

PointCloud parse_csv_points(const std::string& text) {
  PointCloud cloud;
  std::vector<double> row;
  std::size_t line_no = 0;
  bool first_content = true;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    const bool ok = parse_row(t, row);
    if (!ok) {
      if (first_content) {
        first_content = false;
        continue;  // header
      }
      throw Error(ErrorKind::IoError, "CSV line " + std::to_string(line_no) + ": not a numeric row");
    }
    first_content = false;
    if (!cloud.empty() && row.size() != cloud.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "CSV line " + std::to_string(line_no) + ": expected " +
                                                    std::to_string(cloud.dim()) + " columns, got " +
                                                    std::to_string(row.size()));
    }
    cloud.push_back(row);
  }
  return cloud;
}

PointCloud load_csv_points(const std::string& path) { return parse_csv_points(read_text(path)); }

void save_csv_points(const PointCloud& points, const std::string& path) {
  FilePtr f = open_file(path, "wb");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    for (std::size_t k = 0; k < p.size(); ++k) std::fprintf(f.get(), k ? ",%.17g" : "%.17g", p[k]);
    std::fputc('\n', f.get());
  }
}

SymMatrix load_matrix_file(const std::string& path) {
  const std::string text = read_text(path);
  std::istringstream in(text);
  std::string line;
  std::vector<double> entries;
  std::vector<double> row;
  std::size_t rows = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!parse_row(t, row)) throw Error(ErrorKind::ConfigError, "matrix file '" + path + "': bad row '" + std::string(t) + "'");
    if (rows == 0) cols = row.size();
    if (row.size() != cols) throw Error(ErrorKind::ConfigError, "matrix file '" + path + "': ragged rows");
    entries.insert(entries.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0 || rows != cols) {
    throw Error(ErrorKind::ConfigError, "matrix file '" + path + "' must hold a square matrix");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = i + 1; j < rows; ++j) {
      const double a = entries[i * rows + j];
      const double b = entries[j * rows + i];
      if (std::abs(a - b) > 1e-9 * (1.0 + std::abs(a) + std::abs(b))) {
        throw Error(ErrorKind::ConfigError, "matrix file '" + path + "' is not symmetric");
      }
    }
  }
  return SymMatrix::from_rows(rows, entries);
}

}  // namespace cec
