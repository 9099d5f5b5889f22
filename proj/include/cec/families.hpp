#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>

#include "cec/linalg.hpp"

namespace cec {

/// Default covariance regularization added to Σ_μ for the Full, Diagonal and
/// Spherical families.
inline constexpr double kDefaultEpsilon = 1e-6;

namespace family {

/// Gaussians with one prescribed covariance. Build with
/// make_fixed_covariance so the inverse and log-determinant are filled in.
struct FixedCovariance {
  SymMatrix sigma;
  SymMatrix inverse;
  double log_det = 0.0;
};
/// Gaussians with covariance r·I.
struct FixedRadius {
  double r;
};
/// Covariance proportional to the identity, any scale.
struct Spherical {};
/// Diagonal covariance.
struct Diagonal {};
/// Unconstrained covariance.
struct Full {};
/// Covariance with a prescribed spectrum (sorted descending) and free
/// orientation.
struct FixedEigenvalues {
  Vector lambdas;
};

}  // namespace family

using FamilySpec = std::variant<family::FixedCovariance, family::FixedRadius, family::Spherical,
                                family::Diagonal, family::Full, family::FixedEigenvalues>;

/// Validating constructors; throw ConfigError / InvalidSpectrum / InvalidMatrix.
FamilySpec make_fixed_covariance(SymMatrix sigma);
FamilySpec make_fixed_radius(double r);
FamilySpec make_fixed_eigenvalues(Vector lambdas_descending);

/// Short identifier: "full", "diag", "spherical", "fixed-radius",
/// "fixed-eigs", "fixed-cov".
std::string family_name(const FamilySpec& spec);

/// True for families whose cross-entropy diverges on a singular Σ_μ and
/// which therefore get ε·I regularization and a minimum cluster size of N+1.
bool needs_regularization(const FamilySpec& spec) noexcept;

/// Dimension the family is tied to, or 0 when it adapts to the data.
std::size_t family_dim(const FamilySpec& spec) noexcept;

struct FittedGaussian {
  Vector mean;
  SymMatrix covariance;
};

/// H×(μ‖F) in nats for a measure with covariance `cov`. `epsilon` is added to
/// the diagonal of `cov` for the families that need it.
double cross_entropy(const FamilySpec& spec, const SymMatrix& cov, double epsilon = kDefaultEpsilon);
double cross_entropy(const FamilySpec& spec, const ClusterStats& stats,
                     double epsilon = kDefaultEpsilon);

/// Minimizer of the cross-entropy within the family.
FittedGaussian best_fit(const FamilySpec& spec, const ClusterStats& stats,
                        double epsilon = kDefaultEpsilon);

/// H×(μ‖N(m_μ, Σ)) = (N/2)ln 2π + ½tr(Σ⁻¹Σ_μ) + ½ln det Σ.
double gaussian_cross_entropy(const SymMatrix& sigma, const SymMatrix& cov);

/// min over symmetric A with spectrum `lambdas_ascending` of tr(A b): the
/// ascending λ paired with the descending eigenvalues of b.
double min_trace_product(std::span<const double> lambdas_ascending, const SymMatrix& b);

}  // namespace cec
