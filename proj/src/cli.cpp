#include "ouint/cli.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>
#include <sstream>

#include "ouint/model_file.hpp"
#include "ouint/simulate.hpp"
#include "ouint/stability.hpp"
#include "ouint/stationary.hpp"

namespace ouint::cli {

namespace {

using io::Json;

// Failure while reading the model file; maps to exit 2 or 3.
struct LoadError {
  int code;
  std::string message;
};

io::ModelFile load(const std::string& path) {
  try {
    return io::read_model_file(path);
  } catch (const io::ParseError& e) {
    throw LoadError{kExitParse, e.what()};
  } catch (const Error& e) {
    throw LoadError{kExitDimension, e.what()};
  }
}

std::vector<io::PendingIntervention> pending_interventions(
    const io::ModelFile& file, const std::vector<std::string>& sets) {
  std::vector<io::PendingIntervention> out = file.interventions;
  for (const auto& s : sets) {
    try {
      out.push_back(io::parse_set_flag(s));
    } catch (const io::ParseError& e) {
      throw LoadError{kExitUsage, e.what()};
    }
  }
  return out;
}

std::vector<Intervention> resolve(const io::ModelFile& file,
                                  const std::vector<io::PendingIntervention>& pending) {
  std::vector<Intervention> ivs;
  for (const auto& p : pending) ivs.push_back({io::resolve_coordinate(file, p), p.value});
  return ivs;
}

IntervenedModel apply_all(const io::ModelFile& file, const std::vector<std::string>& sets) {
  const auto ivs = resolve(file, pending_interventions(file, sets));
  return intervene_seq(file.model, ivs, file.record);
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kNonFiniteEntry:
      return kExitDimension;
    case ErrorCode::kBadCoordinate:
    case ErrorCode::kSingularReducedMatrix:
    case ErrorCode::kDuplicateIntervention:
    case ErrorCode::kPreconditionViolated:
      return kExitIntervention;
    case ErrorCode::kNoStationaryDistribution:
      return kExitNoStationary;
    default:
      return kExitUsage;
  }
}

std::string removed_set(const std::vector<std::size_t>& removed) {
  std::string s = "\"{";
  for (std::size_t i = 0; i < removed.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(removed[i]);
  }
  return s + "}\"";
}

Json stats_to_json(const PathStats& stats) {
  Json doc = Json::object();
  doc["mean"] = io::vector_to_json(stats.mean);
  doc["cov"] = io::matrix_to_json(stats.cov);
  doc["standard_error"] = io::vector_to_json(stats.standard_error);
  return doc;
}

// ---------------------------------------------------------------------------
// Commands. Each writes into `out` and returns normally or throws.

void cmd_describe(const io::ModelFile& file, const std::vector<std::string>& sets,
                  double tol, std::ostream& out) {
  const OuModel model = apply_all(file, sets).model;
  const StabilityReport report = classify(model.speed(), tol);
  const StationarityVerdict verdict = stationary_exists(model);

  Json doc = Json::object();
  doc["p"] = model.p();
  doc["d"] = model.d();
  doc["labels"] = model.labels();
  Json stability = Json::object();
  stability["classification"] = std::string(to_string(report.classification));
  stability["spectral_abscissa"] = report.spectral_abscissa;
  doc["stability"] = std::move(stability);
  doc["controllability_rank"] = verdict.controllability_rank;
  doc["sigma_full_column_span"] = verdict.sigma_full_column_span;
  doc["stationarity"] = std::string(to_string(verdict.verdict));
  if (verdict.verdict == Verdict::kExists)
    doc["stationary"] = io::law_to_json(stationary_distribution(model));
  out << io::dump(doc);
}

void cmd_intervene(const io::ModelFile& file, const std::vector<std::string>& sets,
                   std::ostream& out) {
  const IntervenedModel result = apply_all(file, sets);
  out << io::dump(io::model_to_json(result.model, result.record));
}

void cmd_stationary(const io::ModelFile& file, const std::vector<std::string>& sets,
                    std::ostream& out) {
  out << io::dump(io::law_to_json(stationary_distribution(apply_all(file, sets).model)));
}

void cmd_stability(const io::ModelFile& file, const std::vector<std::string>& sets,
                   bool submatrices, std::optional<std::size_t> max_removed, double tol,
                   std::ostream& out) {
  const OuModel model = apply_all(file, sets).model;
  std::size_t depth = 0;
  if (max_removed)
    depth = *max_removed;
  else if (submatrices)
    depth = model.p() - 1;
  const SubmatrixScreen screen =
      screen_principal_submatrices(model.speed(), depth, kDefaultSubsetBudget, tol);
  out << "removed_set,classification,abscissa\n";
  for (const auto& e : screen.entries)
    out << removed_set(e.removed) << ',' << to_string(e.report.classification) << ','
        << io::format_double(e.report.spectral_abscissa) << '\n';
}

void cmd_graph(const io::ModelFile& file, const std::vector<std::string>& sets, bool dot,
               double tol, std::ostream& out) {
  const DependenceGraph g = dependence_graph(apply_all(file, sets).model, tol);
  if (dot) {
    out << to_dot(g);
    return;
  }
  out << "from,to\n";
  for (const auto& [from, to] : g.edges) out << g.labels[from] << ',' << g.labels[to] << '\n';
}

struct SimulateOptions {
  double horizon = 1.0;
  std::size_t steps = 100;
  std::size_t paths = 1;
  std::uint64_t seed = 0;
  std::string method;
  bool stats_only = false;
  bool coupled = false;
};

void write_paths_csv(const PathBundle& x, const PathBundle* diff, std::ostream& out) {
  out << "path,t";
  for (const auto& l : x.labels()) out << ',' << l;
  if (diff)
    for (std::size_t i = 1; i <= diff->dim(); ++i) out << ",D" << i;
  out << '\n';
  for (std::size_t path = 0; path < x.n_paths(); ++path)
    for (std::size_t k = 0; k < x.grid().size(); ++k) {
      out << path << ',' << io::format_double(x.grid()[k]);
      for (double v : x.state(path, k)) out << ',' << io::format_double(v);
      if (diff)
        for (double v : diff->state(path, k)) out << ',' << io::format_double(v);
      out << '\n';
    }
}

void cmd_simulate(const io::ModelFile& file, const std::vector<std::string>& sets,
                  const SimulateOptions& opt, std::ostream& out) {
  if (opt.paths < 1) throw Error(ErrorCode::kInvalidArgument, "--paths must be at least 1");
  if (opt.steps < 1) throw Error(ErrorCode::kInvalidArgument, "--steps must be at least 1");
  if (opt.stats_only && opt.paths < 2)
    throw Error(ErrorCode::kInvalidArgument, "--stats-only needs --paths >= 2");
  const TimeGrid grid = TimeGrid::uniform(opt.horizon, opt.steps);
  const std::size_t last = grid.size() - 1;

  if (opt.coupled) {
    if (opt.method == "exact")
      throw Error(ErrorCode::kInvalidArgument, "--coupled runs the Euler scheme only");
    const auto pending = pending_interventions(file, sets);
    if (pending.size() != 1)
      throw Error(ErrorCode::kInvalidArgument,
                  "--coupled needs exactly one intervention (--set or file)");
    const std::size_t original = io::resolve_coordinate(file, pending.front()) - 1;
    std::size_t m = original + 1;
    if (file.record) {
      const auto reduced = file.record->to_reduced(original);
      if (!reduced)
        throw Error(ErrorCode::kDuplicateIntervention, "coordinate is already fixed");
      m = *reduced + 1;
    }
    const CoupledPaths run = coupled_intervention_diff(
        file.model, {m, pending.front().value}, grid, opt.paths, opt.seed);
    if (opt.stats_only) {
      Json doc = Json::object();
      doc["t"] = grid[last];
      doc["n_paths"] = opt.paths;
      doc["labels"] = file.model.labels();
      doc["original"] = stats_to_json(path_stats(run.original, last));
      doc["difference"] = stats_to_json(path_stats(run.difference, last));
      out << io::dump(doc);
    } else {
      write_paths_csv(run.original, &run.difference, out);
    }
    return;
  }

  Method method = Method::kExact;
  if (opt.method == "euler") method = Method::kEuler;
  const OuModel model = apply_all(file, sets).model;
  const PathBundle bundle = simulate_paths(model, grid, opt.paths, opt.seed, method);
  if (opt.stats_only) {
    Json doc = Json::object();
    doc["t"] = grid[last];
    doc["n_paths"] = opt.paths;
    doc["labels"] = model.labels();
    const PathStats stats = path_stats(bundle, last);
    doc["mean"] = io::vector_to_json(stats.mean);
    doc["cov"] = io::matrix_to_json(stats.cov);
    doc["standard_error"] = io::vector_to_json(stats.standard_error);
    out << io::dump(doc);
  } else {
    write_paths_csv(bundle, nullptr, out);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interventions, stability and stationary laws of Ornstein-Uhlenbeck models",
               "ouint"};
  app.require_subcommand(1);

  std::string model_path;
  std::vector<std::string> sets;
  double tol = kDefaultAbscissaTol;
  double edge_tol = 0.0;
  bool submatrices = false;
  std::optional<std::size_t> max_removed;
  bool dot = false;
  SimulateOptions sim;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("model", model_path, "Model JSON file")->required();
    sub->add_option("--set", sets, "Intervention label=value (repeatable)");
  };

  CLI::App* describe = app.add_subcommand("describe", "Summarize stability and stationarity");
  add_common(describe);
  describe->add_option("--tol", tol, "Spectral abscissa tolerance");

  CLI::App* intervene = app.add_subcommand("intervene", "Emit the intervened model");
  add_common(intervene);

  CLI::App* stationary = app.add_subcommand("stationary", "Stationary mean and covariance");
  add_common(stationary);

  CLI::App* stability = app.add_subcommand("stability", "Classify B and its principal submatrices");
  add_common(stability);
  stability->add_flag("--submatrices", submatrices, "Screen every proper principal submatrix");
  stability->add_option("--max-removed", max_removed, "Largest removal set to screen");
  stability->add_option("--tol", tol, "Spectral abscissa tolerance");

  CLI::App* graph = app.add_subcommand("graph", "Dependence graph of B");
  add_common(graph);
  graph->add_flag("--dot", dot, "Emit Graphviz DOT instead of CSV");
  graph->add_option("--tol", edge_tol, "Entries with |b_ij| <= tol are not edges");

  CLI::App* simulate = app.add_subcommand("simulate", "Simulate sample paths");
  add_common(simulate);
  simulate->add_option("--t", sim.horizon, "Time horizon")->check(CLI::PositiveNumber);
  simulate->add_option("--steps", sim.steps, "Number of time steps");
  simulate->add_option("--paths", sim.paths, "Number of paths");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--method", sim.method, "exact or euler")
      ->check(CLI::IsMember({"exact", "euler"}));
  simulate->add_flag("--stats-only", sim.stats_only, "Report cross-path statistics at --t");
  simulate->add_flag("--coupled", sim.coupled,
                     "Also report Y - X for the (single) intervention, shared noise");

  std::vector<std::string> argv_storage{"ouint"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ostringstream buffer;
  try {
    const io::ModelFile file = load(model_path);
    if (*describe)
      cmd_describe(file, sets, tol, buffer);
    else if (*intervene)
      cmd_intervene(file, sets, buffer);
    else if (*stationary)
      cmd_stationary(file, sets, buffer);
    else if (*stability)
      cmd_stability(file, sets, submatrices, max_removed, tol, buffer);
    else if (*graph)
      cmd_graph(file, sets, dot, edge_tol, buffer);
    else if (*simulate)
      cmd_simulate(file, sets, sim, buffer);
  } catch (const LoadError& e) {
    err << "error: " << e.message << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  out << buffer.str();
  return kExitOk;
}

}  // namespace ouint::cli
