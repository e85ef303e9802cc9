#include "kerrsim/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "kerrsim/bosonic_ops.hpp"
#include "kerrsim/chsh.hpp"
#include "kerrsim/circuit.hpp"
#include "kerrsim/coherent_superposition.hpp"
#include "kerrsim/errors.hpp"
#include "kerrsim/fidelity.hpp"
#include "kerrsim/measurement.hpp"
#include "kerrsim/parallel.hpp"

#ifndef KERRSIM_VERSION
#define KERRSIM_VERSION "0.0.0"
#endif

namespace kerrsim::cli {

namespace {

using nlohmann::json;

const std::set<std::string> kCommands{"cat", "fidelity-sweep", "scaling", "bell", "measure-demo"};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void check_grid(const GridSpec& g, const std::string& name) {
  require(g.steps >= 1, name + ": steps must be >= 1");
  require(std::isfinite(g.min) && std::isfinite(g.max), name + ": bounds must be finite");
  if (g.steps == 1) {
    require(g.min == g.max, name + ": a single step needs min == max");
  } else {
    require(g.max > g.min, name + ": max must exceed min");
  }
}

json grid_json(const GridSpec& g) { return {{"min", g.min}, {"max", g.max}, {"steps", g.steps}}; }

GridSpec grid_from_json(const json& j) {
  GridSpec g;
  for (const auto& [key, value] : j.items()) {
    if (key == "min") g.min = value.get<double>();
    else if (key == "max") g.max = value.get<double>();
    else if (key == "steps") g.steps = value.get<std::size_t>();
    else throw std::invalid_argument("config: unknown grid key '" + key + "'");
  }
  return g;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<double> grid_points(const GridSpec& g) { return linear_grid(g.min, g.max, g.steps); }

// Largest Fock cutoffs the drivers accept: diagonal single-mode work, dense single-mode
// matrices (displacements, detector POVMs) and two-mode states.
constexpr std::size_t kMaxDiagonalCutoff = 100000;
constexpr std::size_t kMaxDenseCutoff = 2000;
constexpr std::size_t kMaxTwoModeCutoff = 500;

std::size_t bounded_cutoff(double mean_photons, std::size_t limit, const std::string& what) {
  const std::size_t n = choose_cutoff(mean_photons);
  if (n > limit) {
    throw CutoffError(what + ": cutoff " + std::to_string(n) + " exceeds the supported maximum " +
                      std::to_string(limit));
  }
  return n;
}

// -- cat ---------------------------------------------------------------------------------------

Artifact run_cat(const RunConfig& c) {
  const double alpha = *c.alpha;
  const Complex beta(std::numbers::sqrt2 * alpha, 0.0);
  PhysicalCircuit circuit;
  if (c.circuit.empty()) {
    circuit = circuit.then_kerr(*c.phi);
  } else {
    std::ifstream in(c.circuit);
    if (!in) throw std::invalid_argument("cannot read circuit file " + c.circuit);
    circuit = circuit_from_json(json::parse(in));
    require(circuit.is_single_mode(), "cat: the circuit must act on mode A only");
  }
  double reach = std::abs(beta);
  bool kerr_only = true;
  double total_phase = 0.0;
  for (const auto& op : circuit.ops()) {
    if (const auto* d = std::get_if<DisplacementGate>(&op.gate)) {
      reach += std::abs(d->beta);
      kerr_only = false;
    } else if (const auto* k = std::get_if<KerrGate>(&op.gate)) {
      total_phase += k->effective_phase();
    }
  }
  const std::size_t cutoff =
      bounded_cutoff(reach * reach, kerr_only ? kMaxDiagonalCutoff : kMaxDenseCutoff, "cat");
  const SingleModeState state = run_circuit(circuit, coherent_fock(beta, cutoff));

  Artifact a;
  a.columns = {"n", "probability"};
  const auto p = photon_number_distribution(state);
  for (std::size_t n = 0; n < p.size(); ++n) a.rows.push_back({json(n), json(p[n])});

  json fidelity_field = nullptr;
  std::string oracle = "none";
  if (kerr_only) {
    try {
      const auto expected = kerr_closed_form(SingleModeSuperposition({{Complex(1.0), {beta}}}), total_phase);
      fidelity_field = fidelity(state.normalized(), to_fock(expected, cutoff).normalized());
      oracle = "closed_form_superposition";
    } catch (const UnsupportedPhaseError&) {
    }
  }
  a.summary = {{"alpha", alpha},
               {"input_amplitude", beta.real()},
               {"phi", c.circuit.empty() ? json(*c.phi) : json(nullptr)},
               {"circuit", to_json(circuit)},
               {"oracle", oracle},
               {"fidelity", fidelity_field},
               {"norm_squared", state.norm_squared()},
               {"mean_photons", state.mean_photons()}};
  a.cutoffs = {{"mode_a", cutoff}};
  if (!c.dump_state.empty()) {
    std::ofstream dump(c.dump_state, std::ios::binary);
    if (!dump) throw IoError("cannot write " + c.dump_state);
    dump << to_json(state).dump(2) << '\n';
  }
  return a;
}

// -- fidelity-sweep ----------------------------------------------------------------------------

Artifact run_fidelity_sweep(const RunConfig& c) {
  const auto ns = sorted_unique(c.n_list);
  for (double n : ns) bounded_cutoff(n, kMaxDiagonalCutoff, "fidelity-sweep");
  const auto grid = grid_points(c.phi_grid);
  struct Row {
    double exact, fock, gaussian;
  };
  std::vector<Row> rows(ns.size() * grid.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const double n = ns[i / grid.size()], x = grid[i % grid.size()];
    rows[i] = {fidelity_exact(n, x), fidelity_fock(std::sqrt(n / 2.0), std::numbers::pi / 2.0 + x),
               fidelity_gaussian(n, x)};
  });

  Artifact a;
  a.columns = {"N", "phi_tilde", "fidelity_exact", "fidelity_fock", "fidelity_gaussian"};
  double max_diff = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a.rows.push_back({ns[i / grid.size()], grid[i % grid.size()], rows[i].exact, rows[i].fock, rows[i].gaussian});
    max_diff = std::max(max_diff, std::abs(rows[i].exact - rows[i].fock));
  }
  bool ordered = true;
  std::size_t checked = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!(grid[g] > 0.0)) continue;
    for (std::size_t k = 1; k < ns.size(); ++k) {
      ++checked;
      if (!(rows[k * grid.size() + g].exact < rows[(k - 1) * grid.size() + g].exact)) ordered = false;
    }
  }
  a.summary = {{"N_values", ns},
               {"ordering_checked_points", checked},
               {"ordering_holds", ordered},
               {"max_abs_exact_minus_fock", max_diff}};
  for (double n : ns) a.cutoffs[std::to_string(static_cast<long long>(std::llround(n)))] = choose_cutoff(n);
  return a;
}

// -- scaling -----------------------------------------------------------------------------------

Artifact run_scaling(const RunConfig& c) {
  const auto ns = sorted_unique(c.n_list);
  const FidelityEvaluator evaluator = c.gaussian ? FidelityEvaluator(fidelity_gaussian) : FidelityEvaluator(fidelity_exact);
  const ScalingFit fit = fit_scaling(ns, evaluator);
  Artifact a;
  a.columns = {"N", "half_width"};
  bool decreasing = true;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    a.rows.push_back({ns[i], fit.half_widths[i]});
    if (i > 0 && !(fit.half_widths[i] < fit.half_widths[i - 1])) decreasing = false;
  }
  a.summary = {{"evaluator", c.gaussian ? "gaussian" : "exact"},
               {"exponent", fit.exponent},
               {"intercept", fit.intercept},
               {"prefactor", std::exp(fit.intercept)},
               {"residual", fit.residual},
               {"half_width_strictly_decreasing", decreasing}};
  return a;
}

// -- bell --------------------------------------------------------------------------------------

ChshOptions chsh_options(const RunConfig& c) {
  ChshOptions o;
  o.scope = c.scope == "preparation" ? PhaseErrorScope::PreparationOnly : PhaseErrorScope::All;
  o.jitter_sigma = c.jitter;
  o.refine_settings = c.refine;
  o.threshold = c.threshold;
  if (c.mode == "sampled") o.sampled = SampledMode{c.seed, c.shots};
  return o;
}

Artifact run_bell(const RunConfig& c) {
  const double alpha = *c.alpha;
  const ChshOptions options = chsh_options(c);
  bounded_cutoff(2.0 * alpha * alpha, kMaxTwoModeCutoff, "bell");
  const ChshExperiment experiment(alpha, ChshSettings::textbook_optimal(), options);
  const auto grid = grid_points(c.delta_phi_grid);
  std::vector<ChshResult> results(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { results[i] = experiment.evaluate(grid[i]); });
  const double s_at_zero = experiment.exact_s(0.0);

  Artifact a;
  a.columns = {"delta_phi", "S", "discard_fraction", "E1", "E2", "E3", "E4"};
  json errors = json::array();
  json crossing = nullptr;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    a.rows.push_back({grid[i], r.S, r.discard_fraction, r.correlations[0], r.correlations[1], r.correlations[2],
                      r.correlations[3]});
    errors.push_back(r.standard_error);
    if (crossing.is_null() && i > 0 && grid[i] > 0.0 && results[i - 1].S >= 2.0 && r.S < 2.0) {
      const double t = (results[i - 1].S - 2.0) / (results[i - 1].S - r.S);
      crossing = grid[i - 1] + t * (grid[i] - grid[i - 1]);
    }
  }
  json bisection = nullptr;
  json peak = nullptr;
  if (!options.sampled && s_at_zero > 2.0 && c.delta_phi_grid.max > 0.0) {
    try {
      ChshOptions fixed = options;
      fixed.refine_settings = false;
      const auto point = find_crossing(alpha, experiment.settings(), fixed);
      bisection = point.delta_star;
      peak = {{"S", point.peak_s}, {"delta_phi", point.peak_delta}, {"monotone_from_zero", point.monotone}};
    } catch (const NoCrossingError&) {
    }
  }
  a.summary = {{"alpha", alpha},
               {"mean_photons", 2.0 * alpha * alpha},
               {"mode", c.mode},
               {"scope", c.scope},
               {"settings", to_json(experiment.settings())},
               {"S_at_zero", s_at_zero},
               {"violation_at_zero", s_at_zero > 2.0},
               {"crossing_from_grid", crossing},
               {"crossing_bisection", bisection},
               {"peak", peak}};
  if (options.sampled) {
    a.summary["seed"] = c.seed;
    a.summary["shots"] = c.shots;
    a.summary["standard_errors"] = errors;
  }
  a.cutoffs = {{"mode_a", experiment.cutoff()}, {"mode_b", experiment.cutoff()}};
  if (!(s_at_zero > 2.0)) a.exit_code = kExitNoViolation;
  return a;
}

// -- measure-demo ------------------------------------------------------------------------------

Artifact run_measure_demo(const RunConfig& c) {
  const double alpha = *c.alpha;
  DiscriminationSetup setup = DiscriminationSetup::for_alpha(alpha);
  if (c.threshold) setup.threshold = *c.threshold;
  setup.validate();
  const std::size_t cutoff = bounded_cutoff(alpha * alpha, kMaxDenseCutoff, "measure-demo");
  bounded_cutoff(static_cast<double>(cutoff) + alpha * alpha, kMaxTwoModeCutoff, "measure-demo");
  const bool sampled = c.mode == "sampled";

  Artifact a;
  a.columns = {"input", "p_plus", "p_minus", "p_inconclusive"};
  if (sampled) a.columns.insert(a.columns.end(), {"shots", "count_plus", "count_minus", "count_inconclusive"});
  const std::array<std::pair<const char*, double>, 2> inputs{{{"+alpha", alpha}, {"-alpha", -alpha}}};
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto d = qubit_measure(coherent_fock(Complex(inputs[i].second, 0.0), cutoff), setup);
    std::vector<json> row{inputs[i].first, d.p_plus, d.p_minus, d.p_inconclusive};
    if (sampled) {
      const ShotRecord r = sample(d, c.seed, c.shots, i);
      row.insert(row.end(), {json(r.shots), json(r.counts[0]), json(r.counts[1]), json(r.counts[2])});
    }
    a.rows.push_back(std::move(row));
  }
  a.summary = {{"alpha", alpha}, {"ancilla_alpha", setup.ancilla_alpha}, {"threshold", setup.threshold}};
  a.cutoffs = {{"signal", cutoff}};
  return a;
}

std::string format_number(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(16) << v;
  return s.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open " + path + " for writing");
  f << content;
  if (!f) throw std::ios_base::failure("failed writing " + path);
}

}  // namespace

RunConfig resolve(RunConfig c) {
  require(kCommands.count(c.command) == 1, "unknown command '" + c.command + "'");
  if (!c.alpha) {
    if (c.command == "cat") c.alpha = 2.0;
    if (c.command == "bell") c.alpha = 2.5;
    if (c.command == "measure-demo") c.alpha = 3.0;
  }
  if (c.command == "cat" && !c.phi && c.circuit.empty()) c.phi = std::numbers::pi / 2.0;
  if (c.n_list.empty()) {
    if (c.command == "fidelity-sweep") c.n_list = {30.0, 50.0, 100.0};
    if (c.command == "scaling") c.n_list = {20.0, 30.0, 50.0, 100.0, 200.0};
  }
  if (c.alpha) require(std::isfinite(*c.alpha) && *c.alpha > 0.0, "alpha must be > 0");
  if (c.command == "bell") require(*c.alpha >= 1.0, "bell: alpha must be >= 1");
  if (c.command == "fidelity-sweep" || c.command == "scaling") {
    require(!c.n_list.empty(), "N list must not be empty");
    for (double n : c.n_list) require(std::isfinite(n) && n > 0.0, "every N must be > 0");
  }
  if (c.command == "scaling") {
    for (double n : c.n_list) require(n >= 10.0, "scaling: every N must be >= 10");
    require(sorted_unique(c.n_list).size() >= 3, "scaling: needs at least 3 distinct N values");
  }
  if (c.phi) require(std::isfinite(*c.phi), "phi must be finite");
  check_grid(c.phi_grid, "phi grid");
  check_grid(c.delta_phi_grid, "delta-phi grid");
  require(c.mode == "exact" || c.mode == "sampled", "mode must be exact or sampled");
  if (c.mode == "sampled") require(c.shots >= 1, "shots must be >= 1 in sampled mode");
  require(c.format == "csv" || c.format == "json", "format must be csv or json");
  require(c.scope == "all" || c.scope == "preparation", "scope must be all or preparation");
  require(std::isfinite(c.jitter) && c.jitter >= 0.0, "jitter must be >= 0");
  if (c.threshold) require(*c.threshold >= 1, "threshold must be >= 1");
  return c;
}

json to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"alpha", optional_json(c.alpha)},
          {"n_list", c.n_list},
          {"phi", optional_json(c.phi)},
          {"phi_grid", grid_json(c.phi_grid)},
          {"delta_phi_grid", grid_json(c.delta_phi_grid)},
          {"threshold", optional_json(c.threshold)},
          {"seed", c.seed},
          {"shots", c.shots},
          {"mode", c.mode},
          {"format", c.format},
          {"output", c.output},
          {"scope", c.scope},
          {"jitter", c.jitter},
          {"refine", c.refine},
          {"gaussian", c.gaussian},
          {"circuit", c.circuit},
          {"dump_state", c.dump_state}};
}

RunConfig config_from_json(const json& j) {
  require(j.is_object(), "config: expected a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "alpha") c.alpha = optional_from<double>(v);
      else if (key == "n_list") c.n_list = v.get<std::vector<double>>();
      else if (key == "phi") c.phi = optional_from<double>(v);
      else if (key == "phi_grid") c.phi_grid = grid_from_json(v);
      else if (key == "delta_phi_grid") c.delta_phi_grid = grid_from_json(v);
      else if (key == "threshold") c.threshold = optional_from<std::size_t>(v);
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "shots") c.shots = v.get<std::size_t>();
      else if (key == "mode") c.mode = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "output") c.output = v.get<std::string>();
      else if (key == "scope") c.scope = v.get<std::string>();
      else if (key == "jitter") c.jitter = v.get<double>();
      else if (key == "refine") c.refine = v.get<bool>();
      else if (key == "gaussian") c.gaussian = v.get<bool>();
      else if (key == "circuit") c.circuit = v.get<std::string>();
      else if (key == "dump_state") c.dump_state = v.get<std::string>();
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

Artifact run_command(const RunConfig& config) {
  const RunConfig c = resolve(config);
  if (c.command == "cat") return run_cat(c);
  if (c.command == "fidelity-sweep") return run_fidelity_sweep(c);
  if (c.command == "scaling") return run_scaling(c);
  if (c.command == "bell") return run_bell(c);
  return run_measure_demo(c);
}

std::string render_csv(const Artifact& a) {
  std::ostringstream s;
  for (std::size_t i = 0; i < a.columns.size(); ++i) s << (i ? "," : "") << a.columns[i];
  s << '\n';
  for (const auto& row : a.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s << ',';
      const json& v = row[i];
      if (v.is_number_float()) s << format_number(v.get<double>());
      else if (v.is_string()) s << v.get<std::string>();
      else if (!v.is_null()) s << v.dump();
    }
    s << '\n';
  }
  return s.str();
}

json render_json(const Artifact& a) {
  json rows = json::array();
  for (const auto& row : a.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[a.columns[i]] = row[i];
    rows.push_back(std::move(r));
  }
  return {{"columns", a.columns}, {"rows", rows}, {"summary", a.summary}};
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kerr-nonlinearity cat states, entangled coherent states and Bell tests"};
  app.fallthrough();
  app.set_version_flag("--version", KERRSIM_VERSION);
  for (const auto& name : kCommands) app.add_subcommand(name);
  app.require_subcommand(0, 1);

  RunConfig flags;
  double alpha = 0.0, phi = 0.0;
  std::size_t threshold = 0;
  std::string config_path;
  auto* o_alpha = app.add_option("--alpha", alpha, "coherent amplitude");
  auto* o_n = app.add_option("--n-list", flags.n_list, "mean photon numbers, comma separated")->delimiter(',');
  auto* o_phi = app.add_option("--phi", phi, "Kerr phase for cat");
  auto* o_phi_min = app.add_option("--phi-min", flags.phi_grid.min, "phi_tilde grid start");
  auto* o_phi_max = app.add_option("--phi-max", flags.phi_grid.max, "phi_tilde grid end");
  auto* o_steps = app.add_option("--steps", flags.phi_grid.steps, "phi_tilde grid points");
  auto* o_d_min = app.add_option("--delta-phi-min", flags.delta_phi_grid.min, "phase error grid start");
  auto* o_d_max = app.add_option("--delta-phi-max", flags.delta_phi_grid.max, "phase error grid end");
  auto* o_d_steps = app.add_option("--delta-phi-steps", flags.delta_phi_grid.steps, "phase error grid points");
  auto* o_threshold = app.add_option("--threshold", threshold, "detector photon threshold");
  auto* o_seed = app.add_option("--seed", flags.seed, "sampling seed");
  auto* o_shots = app.add_option("--shots", flags.shots, "shots per setting");
  auto* o_mode = app.add_option("--mode", flags.mode, "exact or sampled");
  auto* o_format = app.add_option("--format", flags.format, "csv or json");
  auto* o_output = app.add_option("--output", flags.output, "output file (stdout when absent)");
  auto* o_scope = app.add_option("--scope", flags.scope, "phase error on all Kerr gates or preparation only");
  auto* o_jitter = app.add_option("--jitter", flags.jitter, "per-shot Gaussian phase jitter");
  auto* o_refine = app.add_flag("--refine", flags.refine, "tune measurement axes at zero error");
  auto* o_gaussian = app.add_flag("--gaussian", flags.gaussian, "use the Gaussian fidelity law");
  auto* o_circuit = app.add_option("--circuit", flags.circuit, "circuit JSON replacing the Kerr gate in cat");
  auto* o_dump = app.add_option("--dump-state", flags.dump_state, "write the final state as JSON");
  app.add_option("--config", config_path, "JSON config or manifest; flags override it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot read config " + config_path);
      json j = json::parse(in);
      if (j.contains("schema_version") && j.contains("config")) j = j.at("config");
      config = config_from_json(j);
    }
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (const auto* sub : app.get_subcommands()) config.command = sub->get_name();
  if (o_alpha->count()) config.alpha = alpha;
  if (o_n->count()) config.n_list = flags.n_list;
  if (o_phi->count()) config.phi = phi;
  if (o_phi_min->count()) config.phi_grid.min = flags.phi_grid.min;
  if (o_phi_max->count()) config.phi_grid.max = flags.phi_grid.max;
  if (o_steps->count()) config.phi_grid.steps = flags.phi_grid.steps;
  if (o_d_min->count()) config.delta_phi_grid.min = flags.delta_phi_grid.min;
  if (o_d_max->count()) config.delta_phi_grid.max = flags.delta_phi_grid.max;
  if (o_d_steps->count()) config.delta_phi_grid.steps = flags.delta_phi_grid.steps;
  if (o_threshold->count()) config.threshold = threshold;
  if (o_seed->count()) config.seed = flags.seed;
  if (o_shots->count()) config.shots = flags.shots;
  if (o_mode->count()) config.mode = flags.mode;
  if (o_format->count()) config.format = flags.format;
  if (o_output->count()) config.output = flags.output;
  if (o_scope->count()) config.scope = flags.scope;
  if (o_jitter->count()) config.jitter = flags.jitter;
  if (o_refine->count()) config.refine = flags.refine;
  if (o_gaussian->count()) config.gaussian = flags.gaussian;
  if (o_circuit->count()) config.circuit = flags.circuit;
  if (o_dump->count()) config.dump_state = flags.dump_state;
  if (config.command.empty()) {
    err << "config error: no command given\n" << app.help();
    return kExitConfig;
  }

  const auto started = std::chrono::steady_clock::now();
  const std::string started_at = utc_timestamp();
  RunConfig resolved;
  Artifact artifact;
  try {
    resolved = resolve(config);
    artifact = run_command(resolved);
  } catch (const NoViolationError& e) {
    err << "no violation: " << e.what() << '\n';
    return kExitNoViolation;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const CutoffError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NoCrossingError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
  const double duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  try {
    const std::string body = resolved.format == "csv" ? render_csv(artifact) : render_json(artifact).dump(2) + '\n';
    if (resolved.output.empty()) {
      out << body;
    } else {
      write_file(resolved.output, body);
      if (resolved.format == "csv") write_file(resolved.output + ".summary.json", artifact.summary.dump(2) + '\n');
      const json manifest{{"schema_version", kSchemaVersion},
                          {"tool", "kerrsim"},
                          {"version", KERRSIM_VERSION},
                          {"config", to_json(resolved)},
                          {"cutoffs", artifact.cutoffs},
                          {"duration_seconds", duration},
                          {"started_at", started_at},
                          {"exit_code", artifact.exit_code}};
      write_file(resolved.output + ".manifest.json", manifest.dump(2) + '\n');
    }
  } catch (const std::exception& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
  if (artifact.exit_code == kExitNoViolation) err << "no violation: S <= 2 at zero phase error\n";
  return artifact.exit_code;
}

}  // namespace kerrsim::cli
