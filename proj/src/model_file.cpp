#include "ouint/model_file.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ouint::io {

namespace {

const Json& require_key(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"");
  return doc.at(key);
}

double as_number(const Json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError("\"" + where + "\" must hold numbers");
  return v.get<double>();
}

std::size_t as_count(const Json& v, const char* key) {
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw ParseError(std::string("\"") + key + "\" must be a positive integer");
  return v.get<std::size_t>();
}

Vector as_vector(const Json& v, const char* key) {
  if (!v.is_array()) throw ParseError(std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_number(x, key));
  return Vector(std::move(out));
}

Matrix as_matrix(const Json& v, const char* key) {
  if (!v.is_array() || v.empty())
    throw ParseError(std::string("\"") + key + "\" must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : v) {
    if (!row.is_array()) throw ParseError(std::string("\"") + key + "\" rows must be arrays");
    rows.push_back(as_vector(row, key).values());
  }
  for (const auto& row : rows)
    if (row.size() != rows.front().size())
      throw Error(ErrorCode::kDimensionMismatch,
                  std::string("\"") + key + "\" has rows of different lengths");
  return Matrix::from_rows(rows);
}

std::vector<std::string> as_labels(const Json& v, const char* key) {
  if (!v.is_array()) throw ParseError(std::string("\"") + key + "\" must be an array");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) throw ParseError(std::string("\"") + key + "\" must hold strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

PendingIntervention as_intervention(const Json& v) {
  if (!v.is_object() || !v.contains("on") || !v.contains("value"))
    throw ParseError("\"interventions\" entries need \"on\" and \"value\"");
  PendingIntervention iv;
  const Json& on = v.at("on");
  if (on.is_string())
    iv.on = on.get<std::string>();
  else if (on.is_number_integer() && on.get<long long>() >= 1)
    iv.on = on.get<std::size_t>();
  else
    throw ParseError("\"on\" must be a label or a 1-based index");
  iv.value = as_number(v.at("value"), "value");
  return iv;
}

InterventionRecord as_record(const Json& v) {
  if (!v.is_object()) throw ParseError("\"intervention_record\" must be an object");
  std::vector<std::string> labels =
      as_labels(require_key(v, "original_labels"), "original_labels");
  const Json& fixed = require_key(v, "fixed");
  if (!fixed.is_array()) throw ParseError("\"fixed\" must be an array");
  std::vector<FixedCoordinate> pins;
  for (const auto& f : fixed) {
    if (!f.is_object() || !f.contains("label") || !f.at("label").is_string() ||
        !f.contains("value"))
      throw ParseError("\"fixed\" entries need \"label\" and \"value\"");
    pins.push_back({f.at("label").get<std::string>(), as_number(f.at("value"), "value")});
  }
  return InterventionRecord(std::move(labels), std::move(pins));
}

}  // namespace

ModelFile parse_model_file(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("model file must be a JSON object");

  const std::size_t p = as_count(require_key(doc, "p"), "p");
  const std::size_t d = as_count(require_key(doc, "d"), "d");
  Vector x0 = as_vector(require_key(doc, "x0"), "x0");
  Vector level = as_vector(require_key(doc, "A"), "A");
  Matrix speed = as_matrix(require_key(doc, "B"), "B");
  Matrix sigma = as_matrix(require_key(doc, "sigma"), "sigma");
  std::vector<std::string> labels;
  if (doc.contains("labels")) labels = as_labels(doc.at("labels"), "labels");

  auto dim_error = [](const std::string& key, const std::string& expected) {
    return Error(ErrorCode::kDimensionMismatch, "\"" + key + "\" must be " + expected);
  };
  if (x0.size() != p) throw dim_error("x0", "of length p");
  if (level.size() != p) throw dim_error("A", "of length p");
  if (speed.rows() != p || speed.cols() != p) throw dim_error("B", "p x p");
  if (sigma.rows() != p || sigma.cols() != d) throw dim_error("sigma", "p x d");
  if (!labels.empty() && labels.size() != p) throw dim_error("labels", "of length p");

  ModelFile file{new_ou_model(p, d, std::move(x0), std::move(level), std::move(speed),
                              std::move(sigma), std::move(labels)),
                 {},
                 std::nullopt};
  if (doc.contains("interventions")) {
    const Json& ivs = doc.at("interventions");
    if (!ivs.is_array()) throw ParseError("\"interventions\" must be an array");
    for (const auto& iv : ivs) file.interventions.push_back(as_intervention(iv));
  }
  if (doc.contains("intervention_record")) {
    file.record = as_record(doc.at("intervention_record"));
    std::vector<std::string> surviving;
    for (std::size_t idx : file.record->surviving())
      surviving.push_back(file.record->original_labels()[idx]);
    if (surviving != file.model.labels())
      throw Error(ErrorCode::kDimensionMismatch,
                  "\"intervention_record\" does not match \"labels\"");
  }
  return file;
}

ModelFile read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_file(buf.str());
}

std::size_t resolve_coordinate(const ModelFile& file, const PendingIntervention& iv) {
  const auto& labels = file.record ? file.record->original_labels() : file.model.labels();
  if (const auto* label = std::get_if<std::string>(&iv.on)) {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == *label) return i + 1;
    std::size_t index = 0;
    const char* end = label->data() + label->size();
    auto [ptr, ec] = std::from_chars(label->data(), end, index);
    if (ec == std::errc() && ptr == end && index >= 1 && index <= labels.size())
      return index;
    throw Error(ErrorCode::kBadCoordinate, "unknown coordinate '" + *label + "'");
  }
  const std::size_t index = std::get<std::size_t>(iv.on);
  if (index < 1 || index > labels.size())
    throw Error(ErrorCode::kBadCoordinate,
                "coordinate index " + std::to_string(index) + " out of range");
  return index;
}

PendingIntervention parse_set_flag(const std::string& flag) {
  const auto eq = flag.rfind('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == flag.size())
    throw ParseError("--set expects label=value, got '" + flag + "'");
  const std::string value = flag.substr(eq + 1);
  double c = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), c);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(c))
    throw ParseError("--set value '" + value + "' is not a finite number");
  return {flag.substr(0, eq), c};
}

// ---------------------------------------------------------------------------

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (double x : m.row(i)) row.push_back(x);
    out.push_back(std::move(row));
  }
  return out;
}

Json model_to_json(const OuModel& model, const std::optional<InterventionRecord>& record) {
  Json doc = Json::object();
  doc["p"] = model.p();
  doc["d"] = model.d();
  doc["x0"] = vector_to_json(model.x0());
  doc["A"] = vector_to_json(model.level());
  doc["B"] = matrix_to_json(model.speed());
  doc["sigma"] = matrix_to_json(model.sigma());
  doc["labels"] = model.labels();
  if (record) {
    Json rec = Json::object();
    rec["original_labels"] = record->original_labels();
    Json fixed = Json::array();
    for (const auto& f : record->fixed()) {
      Json entry = Json::object();
      entry["label"] = f.label;
      entry["value"] = f.value;
      fixed.push_back(std::move(entry));
    }
    rec["fixed"] = std::move(fixed);
    Json surviving = Json::array();
    for (std::size_t idx : record->surviving()) surviving.push_back(idx + 1);
    rec["surviving"] = std::move(surviving);
    doc["intervention_record"] = std::move(rec);
  }
  return doc;
}

Json law_to_json(const GaussianLaw& law) {
  Json doc = Json::object();
  doc["mean"] = vector_to_json(law.mean);
  doc["cov"] = matrix_to_json(law.cov);
  return doc;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

bool is_scalar(const Json& v) { return !v.is_array() && !v.is_object(); }

void write_scalar(const Json& v, std::ostream& os) {
  if (v.is_number_float())
    os << format_double(v.get<double>());
  else
    os << v.dump();
}

void write(const Json& v, std::ostream& os, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  if (v.is_object()) {
    if (v.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!first) os << ",\n";
      first = false;
      os << pad << Json(it.key()).dump() << ": ";
      write(it.value(), os, indent + 2);
    }
    os << "\n" << close << "}";
  } else if (v.is_array()) {
    const bool flat = std::all_of(v.begin(), v.end(), is_scalar);
    if (flat) {
      os << "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        write_scalar(v[i], os);
      }
      os << "]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) os << ",\n";
      os << pad;
      write(v[i], os, indent + 2);
    }
    os << "\n" << close << "]";
  } else {
    write_scalar(v, os);
  }
}

}  // namespace

std::string dump(const Json& value) {
  std::ostringstream os;
  write(value, os, 0);
  os << "\n";
  return os.str();
}

}  // namespace ouint::io
