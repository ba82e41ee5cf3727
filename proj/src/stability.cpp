#include "ouint/stability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "ouint/rng.hpp"

namespace ouint {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::kStable: return "Stable";
    case Classification::kSemistableNotStable: return "SemistableNotStable";
    case Classification::kUnstable: return "Unstable";
  }
  return "Unknown";
}

namespace {

struct Interval {
  double lo;
  double hi;
};

// Real parts of the eigenvalues lie inside the union of Gershgorin discs.
Interval gershgorin_real_bounds(const Matrix& b) {
  Interval r{INFINITY, -INFINITY};
  for (std::size_t i = 0; i < b.rows(); ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < b.cols(); ++j)
      if (j != i) radius += std::abs(b(i, j));
    r.lo = std::min(r.lo, b(i, i) - radius);
    r.hi = std::max(r.hi, b(i, i) + radius);
  }
  return r;
}

Matrix shifted(const Matrix& b, double s) {
  Matrix m = b;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) -= s;
  return m;
}

// Smallest s in [bounds] at which `accepts(s)` flips to true, to width tol.
double bisect(Interval bounds, double tol, const std::function<bool(double)>& accepts) {
  double lo = bounds.lo - tol;
  double hi = bounds.hi + tol;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (accepts(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

Classification classification_of(double abscissa, double tol) {
  if (abscissa < -tol) return Classification::kStable;
  if (abscissa <= tol) return Classification::kSemistableNotStable;
  return Classification::kUnstable;
}

bool is_symmetric(const Matrix& b) {
  const double tol = 1e-12 * b.max_abs();
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = i + 1; j < b.cols(); ++j)
      if (std::abs(b(i, j) - b(j, i)) > tol) return false;
  return true;
}

// Symmetric S: largest eigenvalue via Cholesky of sI - S, and X = -S⁻¹/2.
StabilityReport classify_symmetric(const Matrix& s, double tol) {
  const Matrix sym = s.symmetrized();
  StabilityReport report;
  report.spectral_abscissa =
      bisect(gershgorin_real_bounds(sym), tol, [&](double shift) {
        return try_cholesky(-1.0 * shifted(sym, shift)).has_value();
      });
  report.classification = classification_of(report.spectral_abscissa, tol);
  if (report.classification == Classification::kStable)
    report.certificate =
        (-0.5 * solve_linear(sym, Matrix::identity(sym.rows()))).symmetrized();
  return report;
}

// Calls visit(indices) for each k-subset of {0..n-1} in lexicographic order.
void for_each_subset(std::size_t n, std::size_t k,
                     const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    visit(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

StabilityCertificate is_stable(const Matrix& b) {
  if (!b.is_square()) throw Error(ErrorCode::kDimensionMismatch, "B must be square");
  StabilityCertificate out;
  Matrix x;
  try {
    x = solve_continuous_lyapunov(b, Matrix::identity(b.rows()));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularMatrix) throw;
    return out;
  }
  if (!x.all_finite() || !try_cholesky(x)) return out;
  out.stable = true;
  out.lyapunov = std::move(x);
  return out;
}

double spectral_abscissa(const Matrix& b, double tol) {
  if (!b.is_square()) throw Error(ErrorCode::kDimensionMismatch, "B must be square");
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");
  return bisect(gershgorin_real_bounds(b), tol,
                [&](double s) { return is_stable(shifted(b, s)).stable; });
}

StabilityReport classify(const Matrix& b, double tol) {
  StabilityReport report;
  report.spectral_abscissa = spectral_abscissa(b, tol);
  report.classification = classification_of(report.spectral_abscissa, tol);
  if (report.classification == Classification::kStable)
    report.certificate = is_stable(b).lyapunov;
  return report;
}

SubmatrixScreen screen_principal_submatrices(const Matrix& b,
                                             std::size_t max_size_removed,
                                             std::size_t budget, double tol) {
  if (!b.is_square()) throw Error(ErrorCode::kDimensionMismatch, "B must be square");
  const std::size_t p = b.rows();
  const std::size_t k_max = std::min(max_size_removed, p - 1);
  double count = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) count += binomial(p, k);
  if (count > static_cast<double>(budget))
    throw Error(ErrorCode::kTooLarge,
                "screen would classify " + std::to_string(static_cast<long long>(count)) +
                    " submatrices, budget is " + std::to_string(budget));

  SubmatrixScreen screen;
  // Inclusion principle: every principal submatrix of a symmetric stable
  // matrix is stable, so the Lyapunov test is skipped entirely.
  screen.used_symmetric_fast_path = is_symmetric(b) && is_stable(b).stable;
  auto report_for = [&](const Matrix& s) {
    return screen.used_symmetric_fast_path ? classify_symmetric(s, tol) : classify(s, tol);
  };

  screen.entries.push_back({{}, report_for(b)});
  for (std::size_t k = 1; k <= k_max; ++k) {
    for_each_subset(p, k, [&](const std::vector<std::size_t>& removed) {
      ScreenEntry entry;
      for (std::size_t i : removed) entry.removed.push_back(i + 1);
      entry.report = report_for(principal_submatrix(b, removed));
      if (entry.report.classification != Classification::kStable)
        screen.all_proper_principal_submatrices_stable = false;
      screen.entries.push_back(std::move(entry));
    });
  }
  return screen;
}

// ---------------------------------------------------------------------------
// Diagonal Lyapunov certificates

namespace {

// B D + D Bᵀ, exactly symmetric.
Matrix diagonal_lyapunov_form(const Matrix& b, const Vector& d) {
  Matrix bd = b;
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) bd(i, j) *= d[j];
  return bd + bd.transpose();
}

// Smallest eigenvalue of -(B D + D Bᵀ), D normalized to max entry 1. Negative
// score means the form is negative definite.
double certificate_score(const Matrix& b, const std::vector<double>& log_d) {
  const double top = *std::max_element(log_d.begin(), log_d.end());
  Vector d(log_d.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::exp(log_d[i] - top);
  const Matrix m = -1.0 * diagonal_lyapunov_form(b, d);
  const Interval g = gershgorin_real_bounds(m);
  const double width = std::max(1e-12, 1e-10 * std::max(std::abs(g.lo), std::abs(g.hi)));
  // λ_min(M) is the largest λ with M - λI positive definite.
  const double lambda_min = -bisect({-g.hi, -g.lo}, width, [&](double neg_lambda) {
    return try_cholesky(shifted(m, -neg_lambda)).has_value();
  });
  return -lambda_min;
}

}  // namespace

bool verify_diagonal_certificate(const Matrix& b, const Vector& d) {
  if (!b.is_square() || d.size() != b.rows())
    throw Error(ErrorCode::kDimensionMismatch, "D must match B");
  for (double x : d)
    if (!(x > 0.0) || !std::isfinite(x)) return false;
  return try_cholesky(-1.0 * diagonal_lyapunov_form(b, d)).has_value();
}

std::optional<Vector> diagonal_lyapunov_certificate(const Matrix& b, std::size_t budget,
                                                    std::uint64_t seed) {
  if (!b.is_square()) throw Error(ErrorCode::kDimensionMismatch, "B must be square");
  if (budget < 1) throw Error(ErrorCode::kInvalidArgument, "budget must be at least 1");
  const std::size_t p = b.rows();
  RngStream rng(seed, 0);
  std::size_t evaluations = 0;

  auto to_vector = [](const std::vector<double>& log_d) {
    Vector d(log_d.size());
    const double top = *std::max_element(log_d.begin(), log_d.end());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::exp(log_d[i] - top);
    return d;
  };
  auto evaluate = [&](const std::vector<double>& log_d, double& score) {
    ++evaluations;
    score = certificate_score(b, log_d);
    return score < 0.0 && verify_diagonal_certificate(b, to_vector(log_d));
  };

  for (std::size_t restart = 0; evaluations < budget; ++restart) {
    std::vector<double> log_d(p, 0.0);
    if (restart > 0)
      for (double& x : log_d) x = rng.uniform(-3.0, 3.0);
    double best;
    if (evaluate(log_d, best)) return to_vector(log_d);

    double step = 1.0;
    while (step > 1e-3 && evaluations < budget) {
      bool improved = false;
      for (std::size_t i = 0; i < p && evaluations < budget; ++i) {
        for (double dir : {step, -step}) {
          if (evaluations >= budget) break;
          std::vector<double> trial = log_d;
          trial[i] += dir;
          double score;
          const bool found = evaluate(trial, score);
          if (found) return to_vector(trial);
          if (score < best) {
            best = score;
            log_d = std::move(trial);
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
  }
  return std::nullopt;
}

}  // namespace ouint
