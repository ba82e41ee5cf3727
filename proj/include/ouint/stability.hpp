#pragma once

// Eigenvalue-free stability analysis. A matrix B is declared stable when
// B X + X Bᵀ = -I has a positive definite solution; the spectral abscissa is
// located by bisection over shifted stability tests.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ouint/matkit.hpp"

namespace ouint {

inline constexpr double kDefaultAbscissaTol = 1e-9;
inline constexpr std::size_t kDefaultSubsetBudget = std::size_t{1} << 14;

enum class Classification { kStable, kSemistableNotStable, kUnstable };

std::string_view to_string(Classification c);

struct StabilityCertificate {
  bool stable = false;
  /// Symmetric positive definite solution of B X + X Bᵀ = -I when stable.
  std::optional<Matrix> lyapunov;
};

struct StabilityReport {
  Classification classification = Classification::kUnstable;
  double spectral_abscissa = 0.0;
  std::optional<Matrix> certificate;  // present iff kStable
};

/// Lyapunov + Cholesky stability test. A singular Kronecker system (some
/// λᵢ + λⱼ = 0) counts as not stable.
StabilityCertificate is_stable(const Matrix& b);

/// Maximum real part of the eigenvalues of B to within `tol`.
double spectral_abscissa(const Matrix& b, double tol = kDefaultAbscissaTol);

/// Stable iff abscissa < -tol, SemistableNotStable iff |abscissa| <= tol.
StabilityReport classify(const Matrix& b, double tol = kDefaultAbscissaTol);

struct ScreenEntry {
  std::vector<std::size_t> removed;  // 1-based, ascending
  StabilityReport report;
};

struct SubmatrixScreen {
  /// First entry is B itself (nothing removed); then removal sets by size,
  /// lexicographic within a size.
  std::vector<ScreenEntry> entries;
  bool all_proper_principal_submatrices_stable = true;
  bool used_symmetric_fast_path = false;
};

/// Classifies every principal submatrix obtained by removing between 1 and
/// `max_size_removed` indices (capped at p-1). Throws TooLarge when the number
/// of submatrices exceeds `budget`.
SubmatrixScreen screen_principal_submatrices(const Matrix& b,
                                             std::size_t max_size_removed,
                                             std::size_t budget = kDefaultSubsetBudget,
                                             double tol = kDefaultAbscissaTol);

/// True iff every dᵢ > 0 and -(B D + D Bᵀ) passes Cholesky.
bool verify_diagonal_certificate(const Matrix& b, const Vector& d);

/// Randomized search for a positive diagonal D with B D + D Bᵀ negative
/// definite, using at most `budget` evaluations. Returns a D only if it
/// verifies; nullopt proves nothing.
std::optional<Vector> diagonal_lyapunov_certificate(const Matrix& b,
                                                    std::size_t budget,
                                                    std::uint64_t seed);

}  // namespace ouint
