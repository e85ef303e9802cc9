#include "kerrsim/chsh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "kerrsim/bosonic_ops.hpp"
#include "kerrsim/errors.hpp"
#include "kerrsim/parallel.hpp"

namespace kerrsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::array<std::pair<std::size_t, std::size_t>, 4> kPairs{{{0, 2}, {0, 3}, {1, 2}, {1, 3}}};

DiscriminationSetup detector_for(double alpha, const ChshOptions& options) {
  DiscriminationSetup setup = DiscriminationSetup::for_alpha(alpha);
  if (options.threshold) setup.threshold = *options.threshold;
  setup.validate();
  return setup;
}

ChshOptions exact_only(ChshOptions options) {
  options.sampled.reset();
  options.refine_settings = false;
  return options;
}

}  // namespace

ChshSettings ChshSettings::textbook_optimal() {
  constexpr double shift = -7.0 * kPi / 8.0;
  auto equator = [](double phi) { return BlochAxis{kPi / 2, std::remainder(phi, 2 * kPi)}; };
  return {{equator(shift), equator(kPi / 2 + shift), equator(kPi / 4 - shift), equator(3 * kPi / 4 - shift)}};
}

ChshSettings ChshSettings::uniform(const BlochAxis& axis) { return {{axis, axis, axis, axis}}; }

double chsh_value(std::span<const double, 4> e) { return e[0] + e[1] + e[2] - e[3]; }

ChshExperiment::ChshExperiment(double alpha, const ChshSettings& settings, const ChshOptions& options)
    : alpha_(alpha),
      settings_(options.refine_settings ? refine_settings(alpha, settings, options) : settings),
      options_(options),
      cutoff_(choose_cutoff(2.0 * alpha * alpha)),
      input_(coherent_fock(std::numbers::sqrt2 * alpha, cutoff_)),
      splitter_(cutoff_),
      povm_(detector_for(alpha, options), cutoff_) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("ChshExperiment: alpha must be >= 1");
  if (options.sampled && options.sampled->shots == 0) throw std::invalid_argument("ChshExperiment: shots must be >= 1");
  if (options.jitter_sigma < 0.0) throw std::invalid_argument("ChshExperiment: jitter must be >= 0");
  synthesize();
}

void ChshExperiment::synthesize() {
  const QubitEncoding enc(alpha_);
  for (std::size_t i = 0; i < 4; ++i) {
    displacements_[i].clear();
    recipes_[i] = synthesize_measurement(settings_.axes[i], enc);
    for (const auto& step : recipes_[i].steps) {
      if (step.kind == RotationStep::Kind::PhaseRotation)
        displacements_[i].push_back(displacement_matrix(Complex(0.0, step.epsilon), cutoff_));
    }
  }
}

ChshExperiment ChshExperiment::with_settings(const ChshSettings& settings) const {
  ChshExperiment copy = *this;
  copy.settings_ = settings;
  copy.synthesize();
  return copy;
}

Eigen::MatrixXcd ChshExperiment::party_operator(std::size_t axis, double kerr_error) const {
  const auto dim = static_cast<Eigen::Index>(cutoff_ + 1);
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(dim, dim);
  std::size_t next_displacement = 0;
  for (const auto& step : recipes_[axis].steps) {
    if (step.kind == RotationStep::Kind::KerrBlock) {
      w = kerr_phases(kPi / 2 + kerr_error, cutoff_).asDiagonal() * w;
    } else {
      w = displacements_[axis][next_displacement++] * w;
    }
  }
  return w;
}

std::array<JointOutcomeDistribution, 4> ChshExperiment::joint_at(double phase_error) const {
  const double rotation_error = options_.scope == PhaseErrorScope::All ? phase_error : 0.0;
  const auto dim = static_cast<Eigen::Index>(cutoff_ + 1);
  Eigen::MatrixXcd product = Eigen::MatrixXcd::Zero(dim, dim);
  product.col(0) = kerr_phases(kPi / 2 + phase_error, cutoff_).cwiseProduct(input_.amplitudes());
  const Eigen::MatrixXcd entangled = splitter_.apply(TwoModeState(product)).amplitudes();

  std::array<Eigen::MatrixXcd, 4> w;
  for (std::size_t i = 0; i < 4; ++i) w[i] = party_operator(i, rotation_error);
  std::array<JointOutcomeDistribution, 4> out;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto [a, b] = kPairs[k];
    const TwoModeState rotated(w[a] * entangled * w[b].transpose());
    out[k] = povm_.measure(rotated, povm_);
  }
  return out;
}

std::array<JointOutcomeDistribution, 4> ChshExperiment::joint_distributions(double phase_error) const {
  if (options_.jitter_sigma == 0.0) return joint_at(phase_error);
  const auto [nodes, weights] = normal_quadrature(options_.jitter_nodes);
  std::array<JointOutcomeDistribution, 4> mixed{};
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const auto single = joint_at(phase_error + options_.jitter_sigma * nodes[q]);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) mixed[k].p[i][j] += weights[q] * single[k].p[i][j];
  }
  return mixed;
}

double ChshExperiment::exact_s(double phase_error) const {
  const auto joint = joint_distributions(phase_error);
  std::array<double, 4> e{};
  for (std::size_t k = 0; k < 4; ++k) e[k] = joint[k].correlation();
  return chsh_value(e);
}

ChshResult ChshExperiment::evaluate(double phase_error) const {
  ChshResult r;
  r.alpha = alpha_;
  r.phase_error = phase_error;
  r.settings = settings_;
  r.sampled = options_.sampled;
  r.cutoff = cutoff_;
  r.joint = joint_distributions(phase_error);
  double variance = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& joint = r.joint[k];
    if (!options_.sampled) {
      r.correlations[k] = joint.correlation();
      double total = 0.0;
      for (const auto& row : joint.p)
        for (double p : row) total += p;
      r.discard_fraction += (1.0 - joint.conclusive() / total) / 4.0;
      continue;
    }
    const auto probs = joint.flattened();
    const auto counts = sample_categorical(probs, options_.sampled->seed, k, options_.sampled->shots);
    const double same = static_cast<double>(counts[0] + counts[4]);
    const double diff = static_cast<double>(counts[1] + counts[3]);
    const double conclusive = same + diff;
    if (conclusive == 0.0) throw std::runtime_error("chsh: every sampled shot was inconclusive");
    const double e = (same - diff) / conclusive;
    r.correlations[k] = e;
    variance += std::max(0.0, 1.0 - e * e) / conclusive;
    r.discard_fraction += (1.0 - conclusive / static_cast<double>(options_.sampled->shots)) / 4.0;
  }
  r.S = chsh_value(r.correlations);
  r.standard_error = std::sqrt(variance);
  return r;
}

ChshSettings refine_settings(double alpha, const ChshSettings& start, const ChshOptions& options) {
  const ChshExperiment base(alpha, start, exact_only(options));
  auto score = [&](const ChshSettings& s) { return base.with_settings(s).exact_s(0.0); };
  ChshSettings best = start;
  double best_s = score(best);
  double step = 0.05;
  for (int round = 0; round < 200 && step > 1e-5; ++round) {
    bool improved = false;
    for (std::size_t axis = 0; axis < 4; ++axis) {
      for (int coord = 0; coord < 2; ++coord) {
        for (double sign : {1.0, -1.0}) {
          ChshSettings trial = best;
          (coord == 0 ? trial.axes[axis].theta : trial.axes[axis].phi) += sign * step;
          const double s = score(trial);
          if (s > best_s + 1e-12) {
            best = trial;
            best_s = s;
            improved = true;
            break;
          }
        }
      }
    }
    if (!improved) step /= 2;
  }
  return best;
}

ChshResult chsh_pipeline(double alpha, const ChshSettings& settings, double phase_error, const ChshOptions& options) {
  return ChshExperiment(alpha, settings, options).evaluate(phase_error);
}

std::vector<ChshResult> chsh_sweep(double alpha, const ChshSettings& settings, std::span<const double> phase_errors,
                                   const ChshOptions& options) {
  const ChshExperiment experiment(alpha, settings, options);
  std::vector<ChshResult> out(phase_errors.size());
  parallel_for(phase_errors.size(), [&](std::size_t i) { out[i] = experiment.evaluate(phase_errors[i]); });
  return out;
}

CrossingPoint find_crossing(double alpha, const ChshSettings& settings, const ChshOptions& options) {
  const ChshExperiment experiment(alpha, settings, exact_only(options));
  CrossingPoint point;
  point.alpha = alpha;
  point.mean_photons = 2.0 * alpha * alpha;
  point.s_at_zero = experiment.exact_s(0.0);
  if (!(point.s_at_zero > 2.0)) throw NoViolationError("find_crossing: no violation at zero phase error");

  const double step = 0.02 / point.mean_photons;
  double lo = 0.0, previous = point.s_at_zero;
  double hi = -1.0;
  point.peak_s = point.s_at_zero;
  for (std::size_t k = 1; k * step <= kPi / 4; ++k) {
    const double x = static_cast<double>(k) * step;
    const double s = experiment.exact_s(x);
    if (s >= previous) point.monotone = false;
    if (s > point.peak_s) {
      point.peak_s = s;
      point.peak_delta = x;
    }
    if (s < 2.0) {
      hi = x;
      break;
    }
    lo = x;
    previous = s;
  }
  if (hi < 0.0) throw NoCrossingError("find_crossing: S stays above 2 up to pi/4");
  while (hi - lo > 1e-4 * hi) {
    const double mid = 0.5 * (lo + hi);
    (experiment.exact_s(mid) < 2.0 ? hi : lo) = mid;
  }
  point.delta_star = 0.5 * (lo + hi);
  return point;
}

PhaseSensitivity phase_sensitivity(std::span<const double> alpha_values, const ChshSettings& settings,
                                   const ChshOptions& options) {
  for (double a : alpha_values)
    if (!(a >= 1.5)) throw std::invalid_argument("phase_sensitivity: every alpha must be >= 1.5");
  std::vector<std::optional<CrossingPoint>> found(alpha_values.size());
  parallel_for(alpha_values.size(), [&](std::size_t i) {
    try {
      found[i] = find_crossing(alpha_values[i], settings, options);
    } catch (const NoViolationError&) {
    }
  });
  PhaseSensitivity out;
  std::vector<double> n, d;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (!found[i]) {
      out.excluded_alphas.push_back(alpha_values[i]);
      continue;
    }
    out.points.push_back(*found[i]);
    n.push_back(found[i]->mean_photons);
    d.push_back(found[i]->delta_star);
  }
  if (n.size() >= 2) out.fit = fit_power_law(n, d);
  return out;
}

std::pair<std::vector<double>, std::vector<double>> normal_quadrature(std::size_t nodes) {
  if (nodes == 0) throw std::invalid_argument("normal_quadrature: need at least one node");
  const auto n = static_cast<Eigen::Index>(nodes);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  std::vector<double> x(nodes), w(nodes);
  for (Eigen::Index k = 0; k < n; ++k) {
    x[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    w[static_cast<std::size_t>(k)] = solver.eigenvectors()(0, k) * solver.eigenvectors()(0, k);
  }
  return {x, w};
}

nlohmann::json to_json(const ChshSettings& s) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& a : s.axes) axes.push_back({{"theta", a.theta}, {"phi", a.phi}});
  return {{"axes", axes}};
}

ChshSettings chsh_settings_from_json(const nlohmann::json& j) {
  const auto& axes = j.at("axes");
  if (!axes.is_array() || axes.size() != 4) throw std::invalid_argument("chsh settings: expected four axes");
  ChshSettings s;
  for (std::size_t i = 0; i < 4; ++i) s.axes[i] = {axes[i].at("theta").get<double>(), axes[i].at("phi").get<double>()};
  return s;
}

nlohmann::json to_json(const ChshResult& r) {
  nlohmann::json j{{"alpha", r.alpha},
                   {"phase_error", r.phase_error},
                   {"settings", to_json(r.settings)},
                   {"E", r.correlations},
                   {"S", r.S},
                   {"discard_fraction", r.discard_fraction},
                   {"cutoff", r.cutoff}};
  if (r.sampled) {
    j["mode"] = "sampled";
    j["seed"] = r.sampled->seed;
    j["shots"] = r.sampled->shots;
    j["standard_error"] = r.standard_error;
  } else {
    j["mode"] = "exact";
  }
  return j;
}

}  // namespace kerrsim
