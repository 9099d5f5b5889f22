#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cec {

using Vector = std::vector<double>;

/// Dense symmetric matrix. Both triangles are stored and every write goes to
/// (i, j) and (j, i), so symmetry holds bitwise.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

  /// Builds from row-major entries; the result is the symmetric part
  /// (A + Aᵀ)/2 so nearly-symmetric input is accepted.
  static SymMatrix from_rows(std::size_t dim, std::span<const double> row_major);
  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double v) noexcept {
    data_[i * dim_ + j] = v;
    data_[j * dim_ + i] = v;
  }
  std::span<const double> row_major() const noexcept { return data_; }

  double trace() const noexcept;
  double frobenius_norm() const noexcept;
  bool all_finite() const noexcept;

  /// this += alpha * v vᵀ
  void add_outer(std::span<const double> v, double alpha) noexcept;
  void add_identity(double alpha) noexcept;
  SymMatrix scaled(double alpha) const;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Eigenvalues sorted descending. Column j of the row-major `vectors` matrix
/// is the unit eigenvector for values[j]; its first nonzero component is
/// positive.
struct EigenDecomp {
  Vector values;
  std::vector<double> vectors;
  std::size_t dim = 0;

  Vector vector(std::size_t j) const;
  /// V diag(values) Vᵀ
  SymMatrix reconstruct() const;
  /// V diag(replacement) Vᵀ
  SymMatrix reconstruct_with(std::span<const double> replacement) const;
};

/// Cyclic Jacobi eigensolver. Throws InvalidMatrix on non-finite entries.
EigenDecomp eigh(const SymMatrix& m);

/// Cholesky-based log-determinant. Returns false when `m` is not positive
/// definite.
bool log_det_pd(const SymMatrix& m, double& out);

/// Inverse of a positive-definite matrix via Cholesky. Throws InvalidMatrix
/// when `m` is not positive definite.
SymMatrix inverse_pd(const SymMatrix& m);

/// tr(A B) for symmetric A, B.
double trace_product(const SymMatrix& a, const SymMatrix& b);

/// Dense point storage: `count` points of dimension `dim`, row-major.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return size() == 0; }
  std::span<const double> operator[](std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  void push_back(std::span<const double> p);

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

/// Running count, mean and unnormalized scatter Σ(x-m)(x-m)ᵀ of a point
/// multiset. A zero count carries all-zero mean and scatter.
class ClusterStats {
 public:
  ClusterStats() = default;
  explicit ClusterStats(std::size_t dim) : mean_(dim, 0.0), scatter_(dim) {}

  /// Throws DimensionMismatch when mean and scatter disagree.
  static ClusterStats from_moments(std::size_t count, Vector mean, SymMatrix scatter);

  std::size_t dim() const noexcept { return mean_.size(); }
  std::size_t count() const noexcept { return count_; }
  const Vector& mean() const noexcept { return mean_; }
  const SymMatrix& scatter() const noexcept { return scatter_; }
  /// Population covariance scatter/count; the zero matrix when empty.
  SymMatrix covariance() const;

  /// Welford-style rank-one update.
  void add(std::span<const double> x);
  /// Rank-one downdate; throws EmptyCluster when count is 0.
  void remove(std::span<const double> x);

 private:
  std::size_t count_ = 0;
  Vector mean_;
  SymMatrix scatter_;
};

/// Two-pass batch statistics. Empty input yields a zero-count sentinel of
/// dimension 0.
ClusterStats stats_from_points(std::span<const Vector> points);
ClusterStats stats_from_points(const PointCloud& points);
ClusterStats stats_from_points(const PointCloud& points, std::span<const std::size_t> subset);

ClusterStats add_point(ClusterStats s, std::span<const double> x);
ClusterStats remove_point(ClusterStats s, std::span<const double> x);

}  // namespace cec
