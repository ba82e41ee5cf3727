#pragma once

#include <cstddef>
#include <string_view>

#include "ouint/matkit.hpp"
#include "ouint/ou_core.hpp"

namespace ouint {

struct GaussianLaw {
  Vector mean;
  Matrix cov;
};

enum class Verdict { kExists, kNotExists, kIndeterminateColumnSpan };

std::string_view to_string(Verdict v);

struct StationarityVerdict {
  Verdict verdict = Verdict::kIndeterminateColumnSpan;
  std::size_t controllability_rank = 0;
  bool sigma_full_column_span = false;
  bool b_stable = false;
};

/// Rank of [σ | Bσ | … | B^{p-1}σ].
std::size_t controllability_rank(const Matrix& b, const Matrix& sigma);

/// With σ spanning ℝ^p a stationary law exists iff B is stable; otherwise
/// the verdict is IndeterminateColumnSpan.
StationarityVerdict stationary_exists(const OuModel& model);

/// Mean A and covariance Γ solving σσᵀ + BΓ + ΓBᵀ = 0. Throws
/// NoStationaryDistribution unless the verdict is Exists.
GaussianLaw stationary_distribution(const OuModel& model);

/// Composite Simpson rule for ∫₀^T e^{sB}σσᵀe^{sBᵀ} ds on n panels (each
/// panel holds one midpoint, so 2n+1 nodes). Throws NoStationaryDistribution
/// if B is not stable.
Matrix gamma_by_quadrature(const OuModel& model, double horizon, std::size_t panels);

/// Default horizon 40/|spectral abscissa| and 2000 panels.
Matrix gamma_by_quadrature(const OuModel& model);

enum class ClosedFormTarget { kX2, kX3 };

/// Closed-form stationary law of the two surviving coordinates after X²:=c or
/// X³:=c in the three-dimensional model with σ = I and upper-triangular B
/// with negative diagonal. Throws PreconditionViolated otherwise.
GaussianLaw triangular_closed_forms(const Matrix& b, const Vector& level, double c,
                                     ClosedFormTarget which);

}  // namespace ouint
