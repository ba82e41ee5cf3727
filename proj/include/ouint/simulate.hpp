#pragma once

// Path generation: law-exact Gaussian transitions for OU models, the Euler
// scheme for OU and general SDEs, and coupled original/intervened runs that
// share Brownian increments.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ouint/matkit.hpp"
#include "ouint/ou_core.hpp"
#include "ouint/rng.hpp"

namespace ouint {

class TimeGrid {
 public:
  /// Throws EmptyGrid when `times` is empty, InvalidArgument when it does not
  /// start at 0 or is not finite, NonPositiveSteps when not strictly increasing.
  explicit TimeGrid(std::vector<double> times);
  /// steps+1 equally spaced points on [0, horizon].
  static TimeGrid uniform(double horizon, std::size_t steps);

  std::size_t size() const noexcept { return times_.size(); }
  double operator[](std::size_t k) const { return times_[k]; }
  const std::vector<double>& times() const noexcept { return times_; }

 private:
  std::vector<double> times_;
};

/// values[(path * grid.size() + k) * p + i] is coordinate i of path `path` at
/// time index k.
class PathBundle {
 public:
  PathBundle(TimeGrid grid, std::size_t n_paths, std::vector<std::string> labels);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::size_t n_paths() const noexcept { return n_paths_; }
  std::size_t dim() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& values() const noexcept { return values_; }

  std::span<double> state(std::size_t path, std::size_t k) {
    return {values_.data() + (path * grid_.size() + k) * dim(), dim()};
  }
  std::span<const double> state(std::size_t path, std::size_t k) const {
    return {values_.data() + (path * grid_.size() + k) * dim(), dim()};
  }

  friend bool operator==(const PathBundle&, const PathBundle&) = default;

 private:
  TimeGrid grid_;
  std::size_t n_paths_;
  std::vector<std::string> labels_;
  std::vector<double> values_;
};

inline bool operator==(const TimeGrid& a, const TimeGrid& b) {
  return a.times() == b.times();
}

/// X_t | X_0 = x ~ N(F x + g, Q).
struct Transition {
  Matrix F;
  Vector g;
  Matrix Q;
};

/// F = e^{tB}, g = (I - F)A, Q = ∫₀ᵗ e^{sB}σσᵀe^{sBᵀ} ds from the block
/// exponential of [[B, σσᵀ], [0, -Bᵀ]].
Transition exact_transition(const OuModel& model, double t);

enum class Method { kExact, kEuler };

/// Path i draws from RngStream(seed, i).
PathBundle simulate_paths(const OuModel& model, const TimeGrid& grid,
                          std::size_t n_paths, std::uint64_t seed, Method method);

/// Euler scheme X_{k+1} = X_k + a(X_k) (Δt, ΔW₁, …, ΔW_{d-1}).
PathBundle simulate_paths(const GeneralSde& sde, const TimeGrid& grid,
                          std::size_t n_paths, std::uint64_t seed,
                          std::vector<std::string> labels = {});

struct CoupledPaths {
  PathBundle original;    // X by Euler
  PathBundle difference;  // Y - X with Y lifted to p coordinates
};

/// Drives the original and the intervened model with the same increments.
CoupledPaths coupled_intervention_diff(const OuModel& model, const Intervention& iv,
                                       const TimeGrid& grid, std::size_t n_paths,
                                       std::uint64_t seed);

struct PathStats {
  Vector mean;
  Matrix cov;  // unbiased
  Vector standard_error;  // sqrt(diag(cov) / n_paths)
};

/// Cross-path statistics at grid index `at`. Throws IndexOutOfRange, and
/// InvalidArgument when fewer than two paths exist.
PathStats path_stats(const PathBundle& bundle, std::size_t at);

}  // namespace ouint
