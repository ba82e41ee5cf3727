#include "ouint/simulate.hpp"

#include <cmath>
#include <map>

namespace ouint {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.empty()) throw Error(ErrorCode::kEmptyGrid, "time grid has no points");
  if (times_.front() != 0.0)
    throw Error(ErrorCode::kInvalidArgument, "time grid must start at 0");
  for (std::size_t k = 0; k < times_.size(); ++k) {
    if (!std::isfinite(times_[k]))
      throw Error(ErrorCode::kInvalidArgument, "time grid entries must be finite");
    if (k > 0 && !(times_[k] > times_[k - 1]))
      throw Error(ErrorCode::kNonPositiveSteps, "time grid must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
  if (steps < 1) throw Error(ErrorCode::kEmptyGrid, "need at least one step");
  if (!(horizon > 0.0)) throw Error(ErrorCode::kNonPositiveSteps, "horizon must be positive");
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k)
    t[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
  return TimeGrid(std::move(t));
}

PathBundle::PathBundle(TimeGrid grid, std::size_t n_paths, std::vector<std::string> labels)
    : grid_(std::move(grid)),
      n_paths_(n_paths),
      labels_(std::move(labels)),
      values_(n_paths_ * grid_.size() * labels_.size(), 0.0) {}

// ---------------------------------------------------------------------------

Transition exact_transition(const OuModel& model, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::kInvalidArgument, "t must be positive");
  const std::size_t p = model.p();
  const Matrix& b = model.speed();
  const Matrix noise = model.sigma() * model.sigma().transpose();

  Matrix block(2 * p, 2 * p);
  block.set_block(0, 0, b);
  block.set_block(0, p, noise);
  block.set_block(p, p, -1.0 * b.transpose());

  // E₁₂E₁₁ᵀ cancels catastrophically once ‖tC‖ is large (E₂₂ grows like
  // e^{-tBᵀ}), so the block exponential is taken over t/2^k and the result
  // doubled with Q(2s) = F(s)Q(s)F(s)ᵀ + Q(s).
  int doublings = 0;
  const double norm = t * block.norm_one();
  if (norm > 1.0) doublings = static_cast<int>(std::ceil(std::log2(norm)));
  const double tau = std::ldexp(t, -doublings);

  const Matrix e = expm(tau * block);
  Matrix f = e.block(0, 0, p, p);
  Matrix q = (e.block(0, p, p, p) * f.transpose()).symmetrized();
  for (int k = 0; k < doublings; ++k) {
    q = (f * q * f.transpose() + q).symmetrized();
    f = f * f;
  }

  Vector g = model.level() - f * model.level();
  return {std::move(f), std::move(g), std::move(q)};
}

namespace {

void euler_ou_step(const OuModel& model, std::span<const double> x, std::span<double> next,
                   double dt, std::span<const double> dw) {
  const Matrix& b = model.speed();
  const Matrix& sigma = model.sigma();
  const Vector& level = model.level();
  for (std::size_t i = 0; i < model.p(); ++i) {
    double drift = 0.0;
    for (std::size_t j = 0; j < model.p(); ++j) drift += b(i, j) * (x[j] - level[j]);
    double diffusion = 0.0;
    for (std::size_t l = 0; l < model.d(); ++l) diffusion += sigma(i, l) * dw[l];
    next[i] = x[i] + drift * dt + diffusion;
  }
}

void draw_increments(RngStream& rng, double dt, std::span<double> dw) {
  const double scale = std::sqrt(dt);
  for (double& w : dw) w = scale * rng.normal();
}

}  // namespace

PathBundle simulate_paths(const OuModel& model, const TimeGrid& grid, std::size_t n_paths,
                          std::uint64_t seed, Method method) {
  if (n_paths < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one path");
  const std::size_t p = model.p();
  PathBundle bundle(grid, n_paths, model.labels());

  // One (F, g, Q) per distinct step length.
  struct Step {
    Transition transition;
    Matrix factor;
  };
  std::vector<const Step*> steps;
  std::map<double, Step> cache;
  if (method == Method::kExact) {
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double dt = grid[k] - grid[k - 1];
      auto it = cache.find(dt);
      if (it == cache.end()) {
        Transition tr = exact_transition(model, dt);
        Matrix factor = psd_factor(tr.Q);
        it = cache.emplace(dt, Step{std::move(tr), std::move(factor)}).first;
      }
      steps.push_back(&it->second);
    }
  }

  std::vector<double> dw(model.d());
  Vector z(p);
  for (std::size_t path = 0; path < n_paths; ++path) {
    RngStream rng(seed, path);
    auto start = bundle.state(path, 0);
    std::copy(model.x0().begin(), model.x0().end(), start.begin());
    for (std::size_t k = 1; k < grid.size(); ++k) {
      auto x = bundle.state(path, k - 1);
      auto next = bundle.state(path, k);
      if (method == Method::kEuler) {
        const double dt = grid[k] - grid[k - 1];
        draw_increments(rng, dt, dw);
        euler_ou_step(model, x, next, dt, dw);
      } else {
        const Step& step = *steps[k - 1];
        for (std::size_t i = 0; i < p; ++i) z[i] = rng.normal();
        const Matrix& f = step.transition.F;
        const Matrix& l = step.factor;
        for (std::size_t i = 0; i < p; ++i) {
          double v = step.transition.g[i];
          for (std::size_t j = 0; j < p; ++j) v += f(i, j) * x[j];
          for (std::size_t j = 0; j <= i; ++j) v += l(i, j) * z[j];
          next[i] = v;
        }
      }
    }
  }
  return bundle;
}

PathBundle simulate_paths(const GeneralSde& sde, const TimeGrid& grid, std::size_t n_paths,
                          std::uint64_t seed, std::vector<std::string> labels) {
  if (n_paths < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one path");
  if (sde.p < 1 || sde.d < 1 || sde.x0.size() != sde.p || !sde.coefficient)
    throw Error(ErrorCode::kDimensionMismatch, "general SDE is not well formed");
  if (labels.empty()) labels = default_labels(sde.p);
  PathBundle bundle(grid, n_paths, std::move(labels));

  std::vector<double> dz(sde.d);
  for (std::size_t path = 0; path < n_paths; ++path) {
    RngStream rng(seed, path);
    auto start = bundle.state(path, 0);
    std::copy(sde.x0.begin(), sde.x0.end(), start.begin());
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double dt = grid[k] - grid[k - 1];
      dz[0] = dt;
      draw_increments(rng, dt, std::span<double>(dz).subspan(1));
      auto x = bundle.state(path, k - 1);
      const Matrix a = sde.coefficient(Vector(std::vector<double>(x.begin(), x.end())));
      if (a.rows() != sde.p || a.cols() != sde.d)
        throw Error(ErrorCode::kDimensionMismatch, "coefficient returned the wrong shape");
      auto next = bundle.state(path, k);
      for (std::size_t i = 0; i < sde.p; ++i) {
        double v = 0.0;
        for (std::size_t l = 0; l < sde.d; ++l) v += a(i, l) * dz[l];
        next[i] = x[i] + v;
      }
    }
  }
  return bundle;
}

CoupledPaths coupled_intervention_diff(const OuModel& model, const Intervention& iv,
                                       const TimeGrid& grid, std::size_t n_paths,
                                       std::uint64_t seed) {
  if (n_paths < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one path");
  const IntervenedModel reduced = intervene_ou(model, iv);
  const std::size_t p = model.p();
  const std::size_t q = reduced.model.p();

  CoupledPaths out{PathBundle(grid, n_paths, model.labels()),
                   PathBundle(grid, n_paths, model.labels())};
  std::vector<double> dw(model.d());
  std::vector<double> y(q), y_next(q);
  for (std::size_t path = 0; path < n_paths; ++path) {
    RngStream rng(seed, path);
    auto x0 = out.original.state(path, 0);
    std::copy(model.x0().begin(), model.x0().end(), x0.begin());
    std::copy(reduced.model.x0().begin(), reduced.model.x0().end(), y.begin());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (k > 0) {
        const double dt = grid[k] - grid[k - 1];
        draw_increments(rng, dt, dw);
        euler_ou_step(model, out.original.state(path, k - 1), out.original.state(path, k),
                      dt, dw);
        euler_ou_step(reduced.model, y, y_next, dt, dw);
        std::swap(y, y_next);
      }
      const Vector lifted = reduced.record.lift(y);
      auto x = out.original.state(path, k);
      auto diff = out.difference.state(path, k);
      for (std::size_t i = 0; i < p; ++i) diff[i] = lifted[i] - x[i];
    }
  }
  return out;
}

PathStats path_stats(const PathBundle& bundle, std::size_t at) {
  if (at >= bundle.grid().size())
    throw Error(ErrorCode::kIndexOutOfRange, "time index outside the grid");
  const std::size_t n = bundle.n_paths();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "path_stats needs at least two paths");
  const std::size_t p = bundle.dim();

  PathStats stats{Vector(p), Matrix(p, p), Vector(p)};
  for (std::size_t path = 0; path < n; ++path) {
    auto x = bundle.state(path, at);
    for (std::size_t i = 0; i < p; ++i) stats.mean[i] += x[i];
  }
  stats.mean *= 1.0 / static_cast<double>(n);
  for (std::size_t path = 0; path < n; ++path) {
    auto x = bundle.state(path, at);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j)
        stats.cov(i, j) += (x[i] - stats.mean[i]) * (x[j] - stats.mean[j]);
  }
  stats.cov *= 1.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < p; ++i)
    stats.standard_error[i] = std::sqrt(stats.cov(i, i) / static_cast<double>(n));
  return stats;
}

}  // namespace ouint
