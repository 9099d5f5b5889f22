#include "cec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cec/error.hpp"

namespace cec {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidMatrix: return "InvalidMatrix";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyCluster: return "EmptyCluster";
    case ErrorKind::DegenerateCluster: return "DegenerateCluster";
    case ErrorKind::InvalidSpectrum: return "InvalidSpectrum";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::ConstantImage: return "ConstantImage";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UnsupportedDimensionForSvg: return "UnsupportedDimensionForSvg";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix SymMatrix::from_rows(std::size_t dim, std::span<const double> row_major) {
  if (row_major.size() != dim * dim) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(dim * dim) + " entries, got " +
                    std::to_string(row_major.size()));
  }
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m.data_[i * dim + i] = row_major[i * dim + i];
    for (std::size_t j = i + 1; j < dim; ++j) {
      m.set(i, j, 0.5 * (row_major[i * dim + j] + row_major[j * dim + i]));
    }
  }
  return m;
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.data_[i * dim + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.data_[i * diag.size() + i] = diag[i];
  return m;
}

double SymMatrix::trace() const noexcept {
  double t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += data_[i * dim_ + i];
  return t;
}

double SymMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool SymMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void SymMatrix::add_outer(std::span<const double> v, double alpha) noexcept {
  for (std::size_t i = 0; i < dim_; ++i) {
    const double vi = alpha * v[i];
    data_[i * dim_ + i] += vi * v[i];
    for (std::size_t j = i + 1; j < dim_; ++j) {
      const double x = data_[i * dim_ + j] + vi * v[j];
      data_[i * dim_ + j] = x;
      data_[j * dim_ + i] = x;
    }
  }
}

void SymMatrix::add_identity(double alpha) noexcept {
  for (std::size_t i = 0; i < dim_; ++i) data_[i * dim_ + i] += alpha;
}

SymMatrix SymMatrix::scaled(double alpha) const {
  SymMatrix m = *this;
  for (double& v : m.data_) v *= alpha;
  return m;
}

// ---------------------------------------------------------------------------
// Eigen decomposition

Vector EigenDecomp::vector(std::size_t j) const {
  Vector v(dim);
  for (std::size_t i = 0; i < dim; ++i) v[i] = vectors[i * dim + j];
  return v;
}

SymMatrix EigenDecomp::reconstruct() const { return reconstruct_with(values); }

SymMatrix EigenDecomp::reconstruct_with(std::span<const double> replacement) const {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        s += vectors[i * dim + k] * replacement[k] * vectors[j * dim + k];
      }
      m.set(i, j, s);
    }
  }
  return m;
}

EigenDecomp eigh(const SymMatrix& m) {
  if (!m.all_finite()) throw Error(ErrorKind::InvalidMatrix, "matrix has non-finite entries");
  const std::size_t n = m.dim();
  std::vector<double> a(m.row_major().begin(), m.row_major().end());
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a[i * n + j] * a[i * n + j];
    return std::sqrt(s);
  };
  const double tol = 1e-12 * m.frobenius_norm();

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });

  EigenDecomp out;
  out.dim = n;
  out.values.resize(n);
  out.vectors.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.values[j] = a[src * n + src];
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = v[i * n + src];
      if (std::abs(c) > 1e-14) {
        sign = c > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + j] = sign * v[i * n + src];
  }
  return out;
}

namespace {

// Lower-triangular Cholesky factor, row-major. Returns false if a pivot is
// not strictly positive.
bool cholesky(const SymMatrix& m, std::vector<double>& l) {
  const std::size_t n = m.dim();
  l.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
  return true;
}

}  // namespace

bool log_det_pd(const SymMatrix& m, double& out) {
  const std::size_t n = m.dim();
  if (n == 2) {
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1);
    if (!(m(0, 0) > 0.0) || !(det > 0.0)) return false;
    out = std::log(det);
    return true;
  }
  std::vector<double> l;
  if (!cholesky(m, l)) return false;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::log(l[i * n + i]);
  out = 2.0 * s;
  return true;
}

SymMatrix inverse_pd(const SymMatrix& m) {
  const std::size_t n = m.dim();
  std::vector<double> l;
  if (!cholesky(m, l)) throw Error(ErrorKind::InvalidMatrix, "matrix is not positive definite");
  // Invert L column by column, then inv(m) = inv(L)ᵀ inv(L).
  std::vector<double> li(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    li[j * n + j] = 1.0 / l[j * n + j];
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = j; k < i; ++k) s -= l[i * n + k] * li[k * n + j];
      li[i * n + j] = s / l[i * n + i];
    }
  }
  SymMatrix inv(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = j; k < n; ++k) s += li[k * n + i] * li[k * n + j];
      inv.set(i, j, s);
    }
  }
  return inv;
}

double trace_product(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "trace_product dimension mismatch");
  double s = 0.0;
  const auto x = a.row_major();
  const auto y = b.row_major();
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

// ---------------------------------------------------------------------------
// PointCloud

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0 && !coords_.empty()) throw Error(ErrorKind::DimensionMismatch, "zero-dimensional points");
  if (dim_ != 0 && coords_.size() % dim_ != 0) {
    throw Error(ErrorKind::DimensionMismatch, "coordinate count is not a multiple of the dimension");
  }
}

void PointCloud::push_back(std::span<const double> p) {
  if (dim_ == 0 && coords_.empty()) dim_ = p.size();
  if (p.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "point dimension mismatch");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

// ---------------------------------------------------------------------------
// ClusterStats

SymMatrix ClusterStats::covariance() const {
  if (count_ == 0) return SymMatrix(dim());
  return scatter_.scaled(1.0 / static_cast<double>(count_));
}

void ClusterStats::add(std::span<const double> x) {
  if (x.size() != dim()) throw Error(ErrorKind::DimensionMismatch, "point dimension mismatch");
  const std::size_t n = count_;
  const double n1 = static_cast<double>(n + 1);
  Vector d(x.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = x[i] - mean_[i];
    mean_[i] += d[i] / n1;
  }
  scatter_.add_outer(d, static_cast<double>(n) / n1);
  count_ = n + 1;
}

void ClusterStats::remove(std::span<const double> x) {
  if (count_ == 0) throw Error(ErrorKind::EmptyCluster, "remove_point on empty stats");
  if (x.size() != dim()) throw Error(ErrorKind::DimensionMismatch, "point dimension mismatch");
  if (count_ == 1) {
    *this = ClusterStats(dim());
    return;
  }
  const double n = static_cast<double>(count_);
  const double n1 = n - 1.0;
  Vector d(x.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = x[i] - mean_[i];
    mean_[i] -= d[i] / n1;
  }
  scatter_.add_outer(d, -n / n1);
  count_ -= 1;
}

ClusterStats ClusterStats::from_moments(std::size_t count, Vector mean, SymMatrix scatter) {
  if (mean.size() != scatter.dim()) throw Error(ErrorKind::DimensionMismatch, "mean/scatter dimension mismatch");
  ClusterStats s(mean.size());
  if (count == 0) return s;
  s.count_ = count;
  s.mean_ = std::move(mean);
  s.scatter_ = std::move(scatter);
  return s;
}

namespace {

template <class Get>
ClusterStats batch_stats(std::size_t dim, std::size_t n, Get get) {
  if (n == 0) return ClusterStats(dim);
  Vector mean(dim, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = get(k);
    if (p.size() != dim) throw Error(ErrorKind::DimensionMismatch, "point dimension mismatch");
    for (std::size_t i = 0; i < dim; ++i) mean[i] += p[i];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  SymMatrix scatter(dim);
  Vector d(dim);
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = get(k);
    for (std::size_t i = 0; i < dim; ++i) d[i] = p[i] - mean[i];
    scatter.add_outer(d, 1.0);
  }
  return ClusterStats::from_moments(n, std::move(mean), std::move(scatter));
}

}  // namespace

ClusterStats stats_from_points(std::span<const Vector> points) {
  if (points.empty()) return ClusterStats();
  return batch_stats(points.front().size(), points.size(),
                     [&](std::size_t k) { return std::span<const double>(points[k]); });
}

ClusterStats stats_from_points(const PointCloud& points) {
  if (points.empty()) return ClusterStats();
  return batch_stats(points.dim(), points.size(), [&](std::size_t k) { return points[k]; });
}

ClusterStats stats_from_points(const PointCloud& points, std::span<const std::size_t> subset) {
  return batch_stats(points.dim(), subset.size(), [&](std::size_t k) { return points[subset[k]]; });
}

ClusterStats add_point(ClusterStats s, std::span<const double> x) {
  s.add(x);
  return s;
}

ClusterStats remove_point(ClusterStats s, std::span<const double> x) {
  s.remove(x);
  return s;
}

}  // namespace cec
