#include "cec/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cec/error.hpp"

namespace cec {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2π)

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dim(const FamilySpec& spec, std::size_t n) {
  const std::size_t d = family_dim(spec);
  if (d != 0 && d != n) {
    throw Error(ErrorKind::DimensionMismatch, family_name(spec) + " family has dimension " +
                                                  std::to_string(d) + " but data have dimension " +
                                                  std::to_string(n));
  }
}

SymMatrix regularized(const SymMatrix& cov, double epsilon) {
  SymMatrix m = cov;
  if (epsilon != 0.0) m.add_identity(epsilon);
  return m;
}

[[noreturn]] void degenerate(const FamilySpec& spec, const char* what) {
  throw Error(ErrorKind::DegenerateCluster, family_name(spec) + " family: " + what);
}

}  // namespace

FamilySpec make_fixed_covariance(SymMatrix sigma) {
  if (sigma.dim() == 0) throw Error(ErrorKind::ConfigError, "fixed covariance must be at least 1x1");
  if (!sigma.all_finite()) throw Error(ErrorKind::InvalidMatrix, "fixed covariance has non-finite entries");
  family::FixedCovariance f;
  if (!log_det_pd(sigma, f.log_det)) {
    throw Error(ErrorKind::InvalidMatrix, "fixed covariance is not positive definite");
  }
  f.inverse = inverse_pd(sigma);
  f.sigma = std::move(sigma);
  return f;
}

FamilySpec make_fixed_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw Error(ErrorKind::ConfigError, "fixed radius must be positive, got " + std::to_string(r));
  }
  return family::FixedRadius{r};
}

FamilySpec make_fixed_eigenvalues(Vector lambdas) {
  if (lambdas.empty()) throw Error(ErrorKind::InvalidSpectrum, "fixed eigenvalues: empty spectrum");
  for (double l : lambdas) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw Error(ErrorKind::InvalidSpectrum, "fixed eigenvalues must be positive, got " + std::to_string(l));
    }
  }
  if (!std::is_sorted(lambdas.begin(), lambdas.end(), std::greater<>())) {
    throw Error(ErrorKind::InvalidSpectrum, "fixed eigenvalues must be sorted descending");
  }
  return family::FixedEigenvalues{std::move(lambdas)};
}

std::string family_name(const FamilySpec& spec) {
  return std::visit(overloaded{
                        [](const family::FixedCovariance&) { return std::string("fixed-cov"); },
                        [](const family::FixedRadius&) { return std::string("fixed-radius"); },
                        [](const family::Spherical&) { return std::string("spherical"); },
                        [](const family::Diagonal&) { return std::string("diag"); },
                        [](const family::Full&) { return std::string("full"); },
                        [](const family::FixedEigenvalues&) { return std::string("fixed-eigs"); },
                    },
                    spec);
}

bool needs_regularization(const FamilySpec& spec) noexcept {
  return std::holds_alternative<family::Spherical>(spec) ||
         std::holds_alternative<family::Diagonal>(spec) || std::holds_alternative<family::Full>(spec);
}

std::size_t family_dim(const FamilySpec& spec) noexcept {
  if (const auto* f = std::get_if<family::FixedCovariance>(&spec)) return f->sigma.dim();
  if (const auto* f = std::get_if<family::FixedEigenvalues>(&spec)) return f->lambdas.size();
  return 0;
}

double gaussian_cross_entropy(const SymMatrix& sigma, const SymMatrix& cov) {
  if (sigma.dim() != cov.dim()) throw Error(ErrorKind::DimensionMismatch, "covariance dimension mismatch");
  double ld = 0.0;
  if (!log_det_pd(sigma, ld)) throw Error(ErrorKind::InvalidMatrix, "coding covariance is not positive definite");
  const double n = static_cast<double>(sigma.dim());
  return 0.5 * n * kLog2Pi + 0.5 * trace_product(inverse_pd(sigma), cov) + 0.5 * ld;
}

double cross_entropy(const FamilySpec& spec, const SymMatrix& cov, double epsilon) {
  const std::size_t dim = cov.dim();
  check_dim(spec, dim);
  const double n = static_cast<double>(dim);

  return std::visit(
      overloaded{
          [&](const family::FixedCovariance& f) {
            return 0.5 * n * kLog2Pi + 0.5 * trace_product(f.inverse, cov) + 0.5 * f.log_det;
          },
          [&](const family::FixedRadius& f) {
            return 0.5 * n * kLog2Pi + cov.trace() / (2.0 * f.r) + 0.5 * n * std::log(f.r);
          },
          [&](const family::Spherical&) {
            const double tr = cov.trace() + n * epsilon;
            if (!(tr > 0.0)) degenerate(spec, "zero trace covariance");
            return 0.5 * n * (kLog2Pi + 1.0 - std::log(n)) + 0.5 * n * std::log(tr);
          },
          [&](const family::Diagonal&) {
            double log_det = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
              const double d = cov(i, i) + epsilon;
              if (!(d > 0.0)) degenerate(spec, "zero variance along a coordinate axis");
              log_det += std::log(d);
            }
            return 0.5 * n * (kLog2Pi + 1.0) + 0.5 * log_det;
          },
          [&](const family::Full&) {
            double log_det = 0.0;
            if (!log_det_pd(regularized(cov, epsilon), log_det)) degenerate(spec, "singular covariance");
            return 0.5 * n * (kLog2Pi + 1.0) + 0.5 * log_det;
          },
          [&](const family::FixedEigenvalues& f) {
            const EigenDecomp ed = eigh(cov);
            double ratio = 0.0;
            double log_det = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
              ratio += ed.values[i] / f.lambdas[i];
              log_det += std::log(f.lambdas[i]);
            }
            return 0.5 * n * kLog2Pi + 0.5 * ratio + 0.5 * log_det;
          },
      },
      spec);
}

double cross_entropy(const FamilySpec& spec, const ClusterStats& stats, double epsilon) {
  if (stats.count() == 0) throw Error(ErrorKind::EmptyCluster, "cross-entropy of an empty cluster");
  return cross_entropy(spec, stats.covariance(), epsilon);
}

FittedGaussian best_fit(const FamilySpec& spec, const ClusterStats& stats, double epsilon) {
  if (stats.count() == 0) throw Error(ErrorKind::EmptyCluster, "best fit of an empty cluster");
  const std::size_t dim = stats.dim();
  check_dim(spec, dim);
  const SymMatrix cov = stats.covariance();

  SymMatrix fitted = std::visit(
      overloaded{
          [&](const family::FixedCovariance& f) { return f.sigma; },
          [&](const family::FixedRadius& f) { return SymMatrix::identity(dim).scaled(f.r); },
          [&](const family::Spherical&) {
            const double tr = cov.trace() + static_cast<double>(dim) * epsilon;
            if (!(tr > 0.0)) degenerate(spec, "zero trace covariance");
            return SymMatrix::identity(dim).scaled(tr / static_cast<double>(dim));
          },
          [&](const family::Diagonal&) {
            Vector d(dim);
            for (std::size_t i = 0; i < dim; ++i) {
              d[i] = cov(i, i) + epsilon;
              if (!(d[i] > 0.0)) degenerate(spec, "zero variance along a coordinate axis");
            }
            return SymMatrix::diagonal(d);
          },
          [&](const family::Full&) {
            SymMatrix r = regularized(cov, epsilon);
            double ld = 0.0;
            if (!log_det_pd(r, ld)) degenerate(spec, "singular covariance");
            return r;
          },
          [&](const family::FixedEigenvalues& f) { return eigh(cov).reconstruct_with(f.lambdas); },
      },
      spec);
  return FittedGaussian{stats.mean(), std::move(fitted)};
}

double min_trace_product(std::span<const double> lambdas_ascending, const SymMatrix& b) {
  if (lambdas_ascending.size() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "spectrum length does not match matrix dimension");
  }
  for (std::size_t i = 0; i < lambdas_ascending.size(); ++i) {
    if (!(lambdas_ascending[i] >= 0.0)) {
      throw Error(ErrorKind::InvalidSpectrum, "spectrum entries must be nonnegative");
    }
    if (i > 0 && lambdas_ascending[i] < lambdas_ascending[i - 1]) {
      throw Error(ErrorKind::InvalidSpectrum, "spectrum must be sorted ascending");
    }
  }
  const EigenDecomp ed = eigh(b);
  double s = 0.0;
  for (std::size_t i = 0; i < lambdas_ascending.size(); ++i) s += lambdas_ascending[i] * ed.values[i];
  return s;
}

}  // namespace cec
