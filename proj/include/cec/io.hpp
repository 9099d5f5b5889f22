#pragma once

#include <string>

#include "cec/image.hpp"
#include "cec/linalg.hpp"

namespace cec {

/// 8-bit gray or RGB(A) PNG. Color is reduced to luma
/// 0.2126 R + 0.7152 G + 0.0722 B; alpha is ignored.
GrayImage load_png(const std::string& path);
/// Binary PGM (P5), maxval up to 65535 (rescaled to 8 bits).
GrayImage load_pgm(const std::string& path);
/// PNG or PGM, chosen by the file signature.
GrayImage load_image(const std::string& path);

void save_png(const GrayImage& image, const std::string& path);
void save_pgm(const GrayImage& image, const std::string& path);

/// One `x,y[,z...]` row per point. A first line that does not parse as
/// numbers is taken as a header. Blank lines are skipped.
PointCloud load_csv_points(const std::string& path);
PointCloud parse_csv_points(const std::string& text);
void save_csv_points(const PointCloud& points, const std::string& path);

/// Square matrix, one row per line, entries separated by commas or
/// whitespace. Lines starting with '#' are comments.
SymMatrix load_matrix_file(const std::string& path);

}  // namespace cec
