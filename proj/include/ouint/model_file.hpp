#pragma once

// JSON model files:
//   {"p": 3, "d": 3, "x0": [...], "A": [...], "B": [[...], ...],
//    "sigma": [[...], ...], "labels": [...],
//    "interventions": [{"on": "X2" | 2, "value": 0.5}, ...],
//    "intervention_record": {...}}
// "labels", "interventions" and "intervention_record" are optional. Numbers
// are written with 17 significant digits.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ouint/ou_core.hpp"
#include "ouint/stationary.hpp"

namespace ouint::io {

using Json = nlohmann::ordered_json;

/// Malformed JSON, a missing key or a value of the wrong type. The message
/// names the offending key.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PendingIntervention {
  std::variant<std::string, std::size_t> on;  // label or 1-based index
  double value = 0.0;
};

struct ModelFile {
  OuModel model;
  std::vector<PendingIntervention> interventions;
  std::optional<InterventionRecord> record;
};

/// Throws ParseError, or ouint::Error (DimensionMismatch, NonFiniteEntry,
/// InvalidArgument) when the document parses but the model is inconsistent.
ModelFile parse_model_file(const std::string& text);
ModelFile read_model_file(const std::string& path);

/// Resolves a label or 1-based index to a 1-based original coordinate, using
/// the record's original labels when present. Throws BadCoordinate.
std::size_t resolve_coordinate(const ModelFile& file, const PendingIntervention& iv);

/// Parses "label=value" as used by --set. Throws ParseError.
PendingIntervention parse_set_flag(const std::string& flag);

Json model_to_json(const OuModel& model,
                   const std::optional<InterventionRecord>& record = std::nullopt);
Json law_to_json(const GaussianLaw& law);
Json vector_to_json(const Vector& v);
Json matrix_to_json(const Matrix& m);

/// Deterministic rendering: insertion-ordered keys, two-space indent, arrays of
/// scalars on one line, doubles with %.17g.
std::string dump(const Json& value);

/// %.17g
std::string format_double(double x);

}  // namespace ouint::io
