#include "ouint/stationary.hpp"

#include <cmath>

#include "ouint/stability.hpp"

namespace ouint {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kExists: return "Exists";
    case Verdict::kNotExists: return "NotExists";
    case Verdict::kIndeterminateColumnSpan: return "IndeterminateColumnSpan";
  }
  return "Unknown";
}

std::size_t controllability_rank(const Matrix& b, const Matrix& sigma) {
  if (!b.is_square() || sigma.rows() != b.rows())
    throw Error(ErrorCode::kDimensionMismatch, "B must be p x p and sigma p x d");
  const std::size_t p = b.rows();
  const std::size_t d = sigma.cols();
  Matrix blocks(p, p * d);
  Matrix power = sigma;
  for (std::size_t k = 0; k < p; ++k) {
    blocks.set_block(0, k * d, power);
    if (k + 1 < p) power = b * power;
  }
  return rank(blocks);
}

StationarityVerdict stationary_exists(const OuModel& model) {
  StationarityVerdict v;
  v.controllability_rank = controllability_rank(model.speed(), model.sigma());
  v.sigma_full_column_span = rank(model.sigma()) == model.p();
  v.b_stable = is_stable(model.speed()).stable;
  if (!v.sigma_full_column_span)
    v.verdict = Verdict::kIndeterminateColumnSpan;
  else
    v.verdict = v.b_stable ? Verdict::kExists : Verdict::kNotExists;
  return v;
}

GaussianLaw stationary_distribution(const OuModel& model) {
  const StationarityVerdict v = stationary_exists(model);
  if (v.verdict != Verdict::kExists)
    throw Error(ErrorCode::kNoStationaryDistribution,
                std::string("stationarity verdict is ") + std::string(to_string(v.verdict)));
  const Matrix& sigma = model.sigma();
  const Matrix noise = (sigma * sigma.transpose()).symmetrized();
  // B stable means B invertible, so Bμ = BA gives μ = A.
  return {model.level(), solve_continuous_lyapunov(model.speed(), noise)};
}

Matrix gamma_by_quadrature(const OuModel& model, double horizon, std::size_t panels) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "T must be positive");
  if (panels < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 panels");
  if (!is_stable(model.speed()).stable)
    throw Error(ErrorCode::kNoStationaryDistribution, "B is not stable");

  const Matrix& sigma = model.sigma();
  const Matrix noise = sigma * sigma.transpose();
  const std::size_t nodes = 2 * panels;  // subintervals
  const double h = horizon / static_cast<double>(nodes);
  const Matrix step = expm(h * model.speed());

  Matrix acc(model.p(), model.p());
  Matrix flow = Matrix::identity(model.p());  // e^{s_k B}
  for (std::size_t k = 0; k <= nodes; ++k) {
    const double weight = (k == 0 || k == nodes) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += weight * (flow * noise * flow.transpose());
    flow = step * flow;
  }
  return ((h / 3.0) * acc).symmetrized();
}

Matrix gamma_by_quadrature(const OuModel& model) {
  const double abscissa = spectral_abscissa(model.speed());
  if (!(abscissa < 0.0))
    throw Error(ErrorCode::kNoStationaryDistribution, "B is not stable");
  return gamma_by_quadrature(model, 40.0 / std::abs(abscissa), 2000);
}

// ---------------------------------------------------------------------------

namespace {

// Stationary covariance for the reduced 2×2 speed [[u, v], [0, w]] with σ = I:
// -1/(2u) - v²/(2uw(u+w)),  v/(2w(u+w)),  -1/(2w).
Matrix triangular_pair_covariance(double u, double v, double w) {
  Matrix cov(2, 2);
  cov(0, 0) = -1.0 / (2.0 * u) - v * v / (2.0 * u * w * (u + w));
  cov(0, 1) = cov(1, 0) = v / (2.0 * w * (u + w));
  cov(1, 1) = -1.0 / (2.0 * w);
  return cov;
}

}  // namespace

GaussianLaw triangular_closed_forms(const Matrix& b, const Vector& level, double c,
                                     ClosedFormTarget which) {
  if (b.rows() != 3 || b.cols() != 3 || level.size() != 3)
    throw Error(ErrorCode::kPreconditionViolated, "expects a 3x3 B and a length-3 A");
  if (b(1, 0) != 0.0 || b(2, 0) != 0.0 || b(2, 1) != 0.0)
    throw Error(ErrorCode::kPreconditionViolated, "B must be upper triangular");
  if (!(b(0, 0) < 0.0 && b(1, 1) < 0.0 && b(2, 2) < 0.0))
    throw Error(ErrorCode::kPreconditionViolated, "diagonal of B must be negative");

  const double b11 = b(0, 0), b12 = b(0, 1), b13 = b(0, 2);
  const double b22 = b(1, 1), b23 = b(1, 2), b33 = b(2, 2);
  const double a1 = level[0], a2 = level[1], a3 = level[2];

  GaussianLaw law;
  if (which == ClosedFormTarget::kX2) {
    law.mean = Vector{a1 - (b12 / b11) * (c - a2), a3};
    law.cov = triangular_pair_covariance(b11, b13, b33);
  } else {
    law.mean = Vector{a1 - (b13 / b11 - (b12 * b23) / (b11 * b22)) * (c - a3),
                      a2 - (b23 / b22) * (c - a3)};
    law.cov = triangular_pair_covariance(b11, b12, b22);
  }
  return law;
}

}  // namespace ouint
