#include "ouint/ou_core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace ouint {

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

template <typename T>
std::vector<T> without(const std::vector<T>& v, std::size_t idx) {
  std::vector<T> out;
  out.reserve(v.size() - 1);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i != idx) out.push_back(v[i]);
  return out;
}

Vector without(const Vector& v, std::size_t idx) {
  return Vector(without(v.values(), idx));
}

Matrix without_row(const Matrix& m, std::size_t idx) {
  Matrix out(m.rows() - 1, m.cols());
  for (std::size_t i = 0, r = 0; i < m.rows(); ++i) {
    if (i == idx) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out(r, j) = m(i, j);
    ++r;
  }
  return out;
}

std::size_t checked_index(std::size_t m, std::size_t p) {
  if (m < 1 || m > p)
    throw Error(ErrorCode::kBadCoordinate,
                "coordinate " + std::to_string(m) + " outside 1.." + std::to_string(p));
  return m - 1;
}

// Applies X^{idx+1} := c to the current model; no record bookkeeping.
OuModel reduce(const OuModel& model, std::size_t idx, double c) {
  require(model.p() >= 2, ErrorCode::kPreconditionViolated,
          "cannot intervene on a one-dimensional model");
  const Matrix& b = model.speed();
  const std::size_t removed[] = {idx};
  Matrix reduced_speed = principal_submatrix(b, removed);

  const double shift = c - model.level()[idx];
  Vector beta(model.p() - 1);
  for (std::size_t i = 0, r = 0; i < model.p(); ++i) {
    if (i == idx) continue;
    beta[r++] = b(i, idx) * shift;
  }

  Vector correction;
  try {
    correction = solve_linear(reduced_speed, beta);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularMatrix) throw;
    throw Error(ErrorCode::kSingularReducedMatrix,
                "speed matrix with coordinate " + model.labels()[idx] +
                    " removed is not invertible");
  }
  Vector level = without(model.level(), idx) - correction;

  return OuModel(without(model.x0(), idx), std::move(level),
                 std::move(reduced_speed), without_row(model.sigma(), idx),
                 without(model.labels(), idx));
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> default_labels(std::size_t p) {
  std::vector<std::string> labels;
  labels.reserve(p);
  for (std::size_t i = 1; i <= p; ++i) labels.push_back("X" + std::to_string(i));
  return labels;
}

OuModel::OuModel(Vector x0, Vector level, Matrix speed, Matrix sigma,
                 std::vector<std::string> labels)
    : x0_(std::move(x0)),
      level_(std::move(level)),
      speed_(std::move(speed)),
      sigma_(std::move(sigma)),
      labels_(std::move(labels)) {
  const std::size_t p = x0_.size();
  require(p >= 1, ErrorCode::kDimensionMismatch, "state dimension must be at least 1");
  require(level_.size() == p, ErrorCode::kDimensionMismatch, "A must have length p");
  require(speed_.rows() == p && speed_.cols() == p, ErrorCode::kDimensionMismatch,
          "B must be p x p");
  require(sigma_.rows() == p && sigma_.cols() >= 1, ErrorCode::kDimensionMismatch,
          "sigma must be p x d with d >= 1");
  require(x0_.all_finite() && level_.all_finite() && speed_.all_finite() &&
              sigma_.all_finite(),
          ErrorCode::kNonFiniteEntry, "model entries must be finite");
  if (labels_.empty()) labels_ = default_labels(p);
  require(labels_.size() == p, ErrorCode::kDimensionMismatch,
          "labels must have length p");
  require(std::set<std::string>(labels_.begin(), labels_.end()).size() == p,
          ErrorCode::kInvalidArgument, "labels must be distinct");
}

Vector OuModel::drift(const Vector& x) const { return speed_ * (x - level_); }

OuModel new_ou_model(std::size_t p, std::size_t d, Vector x0, Vector level,
                     Matrix speed, Matrix sigma, std::vector<std::string> labels) {
  require(p >= 1 && d >= 1, ErrorCode::kDimensionMismatch, "p and d must be positive");
  require(x0.size() == p, ErrorCode::kDimensionMismatch, "x0 must have length p");
  require(sigma.cols() == d, ErrorCode::kDimensionMismatch, "sigma must have d columns");
  return OuModel(std::move(x0), std::move(level), std::move(speed), std::move(sigma),
                 std::move(labels));
}

// ---------------------------------------------------------------------------
// InterventionRecord

InterventionRecord::InterventionRecord(std::vector<std::string> original_labels)
    : original_labels_(std::move(original_labels)) {
  const std::size_t n = original_labels_.size();
  surviving_.resize(n);
  reduced_of_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    surviving_[i] = i;
    reduced_of_[i] = i;
  }
}

InterventionRecord::InterventionRecord(std::vector<std::string> original_labels,
                                       std::vector<FixedCoordinate> fixed)
    : InterventionRecord(std::move(original_labels)) {
  for (const auto& f : fixed) {
    auto it = std::find(original_labels_.begin(), original_labels_.end(), f.label);
    require(it != original_labels_.end(), ErrorCode::kInvalidArgument,
            "fixed label '" + f.label + "' is not an original label");
    const auto idx = static_cast<std::size_t>(it - original_labels_.begin());
    require(!is_fixed(idx), ErrorCode::kInvalidArgument,
            "label '" + f.label + "' fixed twice");
    pin(idx, f.value);
  }
}

std::optional<std::size_t> InterventionRecord::to_reduced(std::size_t original) const {
  return reduced_of_.at(original);
}

void InterventionRecord::pin(std::size_t original, double value) {
  require(original < original_labels_.size(), ErrorCode::kBadCoordinate,
          "original coordinate out of range");
  if (is_fixed(original))
    throw Error(ErrorCode::kDuplicateIntervention,
                "coordinate " + original_labels_[original] + " is already fixed");
  fixed_.push_back({original_labels_[original], value});
  surviving_.erase(std::find(surviving_.begin(), surviving_.end(), original));
  std::fill(reduced_of_.begin(), reduced_of_.end(), std::nullopt);
  for (std::size_t r = 0; r < surviving_.size(); ++r) reduced_of_[surviving_[r]] = r;
}

Vector InterventionRecord::lift(std::span<const double> reduced) const {
  require(reduced.size() == surviving_.size(), ErrorCode::kDimensionMismatch,
          "reduced state has the wrong length");
  Vector full(original_labels_.size());
  for (std::size_t r = 0; r < surviving_.size(); ++r) full[surviving_[r]] = reduced[r];
  for (const auto& f : fixed_) {
    auto it = std::find(original_labels_.begin(), original_labels_.end(), f.label);
    full[static_cast<std::size_t>(it - original_labels_.begin())] = f.value;
  }
  return full;
}

// ---------------------------------------------------------------------------

IntervenedModel intervene_ou(const OuModel& model, const Intervention& iv) {
  const std::size_t idx = checked_index(iv.m, model.p());
  InterventionRecord record(model.labels());
  OuModel reduced = reduce(model, idx, iv.c);
  record.pin(idx, iv.c);
  return {std::move(reduced), std::move(record)};
}

IntervenedModel intervene_seq(const OuModel& model, std::span<const Intervention> ivs,
                              std::optional<InterventionRecord> record) {
  InterventionRecord rec = record ? *std::move(record) : InterventionRecord(model.labels());
  require(rec.surviving().size() == model.p(), ErrorCode::kDimensionMismatch,
          "record does not match the model dimension");
  OuModel current = model;
  for (std::size_t stage = 0; stage < ivs.size(); ++stage) {
    try {
      const std::size_t original =
          checked_index(ivs[stage].m, rec.original_labels().size());
      const auto reduced_idx = rec.to_reduced(original);
      if (!reduced_idx)
        throw Error(ErrorCode::kDuplicateIntervention,
                    "coordinate " + rec.original_labels()[original] + " is already fixed");
      current = reduce(current, *reduced_idx, ivs[stage].c);
      rec.pin(original, ivs[stage].c);
    } catch (const Error& e) {
      throw Error(e.code(), "stage " + std::to_string(stage) + ": " + e.detail(),
                  static_cast<int>(stage));
    }
  }
  return {std::move(current), std::move(rec)};
}

// ---------------------------------------------------------------------------

DependenceGraph dependence_graph(const OuModel& model, double tol) {
  DependenceGraph g;
  g.labels = model.labels();
  const Matrix& b = model.speed();
  for (std::size_t i = 0; i < model.p(); ++i)
    for (std::size_t j = 0; j < model.p(); ++j)
      if (std::abs(b(i, j)) > tol) g.edges.emplace_back(j, i);
  return g;
}

std::string to_dot(const DependenceGraph& graph) {
  std::ostringstream os;
  os << "digraph G {\n";
  for (const auto& label : graph.labels) os << "  \"" << label << "\";\n";
  for (const auto& [from, to] : graph.edges)
    os << "  \"" << graph.labels[from] << "\" -> \"" << graph.labels[to] << "\";\n";
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------

GeneralSde general_from_ou(const OuModel& model) {
  GeneralSde sde;
  sde.p = model.p();
  sde.d = model.d() + 1;
  sde.x0 = model.x0();
  sde.coefficient = [model](const Vector& x) {
    Matrix a(model.p(), model.d() + 1);
    const Vector drift = model.drift(x);
    for (std::size_t i = 0; i < model.p(); ++i) {
      a(i, 0) = drift[i];
      for (std::size_t k = 0; k < model.d(); ++k) a(i, k + 1) = model.sigma()(i, k);
    }
    return a;
  };
  return sde;
}

GeneralSde intervene_general(const GeneralSde& sde, const Intervention& iv) {
  const std::size_t idx = checked_index(iv.m, sde.p);
  require(sde.p >= 2, ErrorCode::kPreconditionViolated,
          "cannot intervene on a one-dimensional SDE");
  GeneralSde out;
  out.p = sde.p - 1;
  out.d = sde.d;
  out.x0 = without(sde.x0, idx);
  out.coefficient = [inner = sde.coefficient, idx, c = iv.c](const Vector& y) {
    Vector x(y.size() + 1);
    for (std::size_t i = 0, r = 0; i < x.size(); ++i) x[i] = (i == idx) ? c : y[r++];
    return without_row(inner(x), idx);
  };
  return out;
}

}  // namespace ouint
