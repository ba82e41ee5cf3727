#pragma once

// Ornstein-Uhlenbeck models dX = B(X - A)dt + σ dW and the substitution
// semantics of an intervention X^m := c.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ouint/matkit.hpp"

namespace ouint {

/// Validated OU model. `level` is the mean reversion level A, `speed` the
/// mean reversion speed B and `sigma` the p×d diffusion matrix.
class OuModel {
 public:
  /// Throws DimensionMismatch or NonFiniteEntry. Empty `labels` become
  /// "X1".."Xp".
  OuModel(Vector x0, Vector level, Matrix speed, Matrix sigma,
          std::vector<std::string> labels = {});

  std::size_t p() const noexcept { return x0_.size(); }
  std::size_t d() const noexcept { return sigma_.cols(); }
  const Vector& x0() const noexcept { return x0_; }
  const Vector& level() const noexcept { return level_; }
  const Matrix& speed() const noexcept { return speed_; }
  const Matrix& sigma() const noexcept { return sigma_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// B(x - A).
  Vector drift(const Vector& x) const;

 private:
  Vector x0_;
  Vector level_;
  Matrix speed_;
  Matrix sigma_;
  std::vector<std::string> labels_;
};

/// Checks the declared dimensions p and d against the arrays.
OuModel new_ou_model(std::size_t p, std::size_t d, Vector x0, Vector level,
                     Matrix speed, Matrix sigma,
                     std::vector<std::string> labels = {});

std::vector<std::string> default_labels(std::size_t p);

/// X^m := c with a 1-based coordinate m.
struct Intervention {
  std::size_t m = 1;
  double c = 0.0;
};

struct FixedCoordinate {
  std::string label;
  double value = 0.0;
  friend bool operator==(const FixedCoordinate&, const FixedCoordinate&) = default;
};

/// Tracks how a reduced model's coordinates relate to the model it came from.
/// All indices are 0-based.
class InterventionRecord {
 public:
  InterventionRecord() = default;
  explicit InterventionRecord(std::vector<std::string> original_labels);
  /// Rebuilds a record from its serialized parts; throws InvalidArgument when
  /// the parts are inconsistent.
  InterventionRecord(std::vector<std::string> original_labels,
                     std::vector<FixedCoordinate> fixed);

  const std::vector<std::string>& original_labels() const noexcept {
    return original_labels_;
  }
  const std::vector<FixedCoordinate>& fixed() const noexcept { return fixed_; }
  /// Original index of each reduced coordinate, in order.
  const std::vector<std::size_t>& surviving() const noexcept { return surviving_; }

  std::size_t to_original(std::size_t reduced) const { return surviving_.at(reduced); }
  std::optional<std::size_t> to_reduced(std::size_t original) const;
  bool is_fixed(std::size_t original) const { return !to_reduced(original); }

  /// Pins original coordinate `original` (must still be surviving).
  void pin(std::size_t original, double value);

  /// Original-coordinate state with pinned values inserted.
  Vector lift(std::span<const double> reduced) const;

  friend bool operator==(const InterventionRecord&, const InterventionRecord&) = default;

 private:
  std::vector<std::string> original_labels_;
  std::vector<FixedCoordinate> fixed_;
  std::vector<std::size_t> surviving_;
  std::vector<std::optional<std::size_t>> reduced_of_;
};

struct IntervenedModel {
  OuModel model;
  InterventionRecord record;
};

/// Reduced model of dimension p-1: speed B̃ (row/column m removed), diffusion
/// σ with row m removed, level α - B̃⁻¹β with βᵢ = b_im (c - a_m).
/// Throws BadCoordinate or SingularReducedMatrix.
IntervenedModel intervene_ou(const OuModel& model, const Intervention& iv);

/// Left-to-right fold of intervene_ou. Coordinates are interpreted against
/// the record's original labels; pass no record to start from `model`.
IntervenedModel intervene_seq(const OuModel& model,
                              std::span<const Intervention> ivs,
                              std::optional<InterventionRecord> record = std::nullopt);

struct DependenceGraph {
  std::vector<std::string> labels;
  /// (from, to) pairs, 0-based; entry b_ij yields edge j -> i. Row-major order.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  friend bool operator==(const DependenceGraph&, const DependenceGraph&) = default;
};

DependenceGraph dependence_graph(const OuModel& model, double tol = 0.0);

/// Graphviz rendering: node declarations in label order, then edges.
std::string to_dot(const DependenceGraph& graph);

/// dXᵢ = Σⱼ a_ij(X) dZʲ with Z = (t, W¹, …, W^{d-1}): column 0 of the
/// coefficient is the drift, the remaining d-1 columns the diffusion.
struct GeneralSde {
  using Coefficient = std::function<Matrix(const Vector&)>;

  std::size_t p = 0;
  std::size_t d = 0;
  Coefficient coefficient;
  Vector x0;
};

/// a(x) = [B(x - A) | σ], so d = model.d() + 1.
GeneralSde general_from_ou(const OuModel& model);

/// Evaluates the original coefficient with c inserted at position m and
/// drops row m. Throws BadCoordinate.
GeneralSde intervene_general(const GeneralSde& sde, const Intervention& iv);

}  // namespace ouint
