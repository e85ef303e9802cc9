#pragma once

// CHSH test on the beam-split cat state: per-party coherent-qubit rotations, bright/vacuum
// detection on both modes, and the sensitivity of the violation to Kerr phase errors.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "kerrsim/coherent_qubit.hpp"
#include "kerrsim/fidelity.hpp"
#include "kerrsim/measurement.hpp"

namespace kerrsim {

/// Measurement axes a, a' (mode A) and b, b' (mode B).
struct ChshSettings {
  std::array<BlochAxis, 4> axes{};

  const BlochAxis& a() const { return axes[0]; }
  const BlochAxis& a_prime() const { return axes[1]; }
  const BlochAxis& b() const { return axes[2]; }
  const BlochAxis& b_prime() const { return axes[3]; }

  /// Equatorial axes reaching 2 sqrt2 on (|00> + i|11>)/sqrt2, rotated so that every party
  /// rotation is a single Kerr block with a small leading displacement.
  static ChshSettings textbook_optimal();
  /// All four axes equal to `axis`.
  static ChshSettings uniform(const BlochAxis& axis);
};

enum class PhaseErrorScope { All, PreparationOnly };

struct SampledMode {
  std::uint64_t seed = 0;
  std::size_t shots = 0;
};

struct ChshOptions {
  PhaseErrorScope scope = PhaseErrorScope::All;
  /// Standard deviation of a Gaussian offset drawn once per shot on top of the fixed error.
  double jitter_sigma = 0.0;
  std::size_t jitter_nodes = 16;
  std::optional<SampledMode> sampled;
  /// Coordinate-descent tuning of the axes at zero phase error before evaluating.
  bool refine_settings = false;
  /// Detector threshold; ceil(alpha^2) when unset.
  std::optional<std::size_t> threshold;
};

struct ChshResult {
  double alpha = 0.0;
  double phase_error = 0.0;
  ChshSettings settings;
  /// E(a,b), E(a,b'), E(a',b), E(a',b').
  std::array<double, 4> correlations{};
  double S = 0.0;
  /// Mean fraction of shots in which either detector was inconclusive.
  double discard_fraction = 0.0;
  /// Zero in exact mode.
  double standard_error = 0.0;
  std::optional<SampledMode> sampled;
  std::size_t cutoff = 0;
  std::array<JointOutcomeDistribution, 4> joint{};
};

/// E(a,b) + E(a,b') + E(a',b) - E(a',b') from the joint outcome counts.
double chsh_value(std::span<const double, 4> correlations);

/// Precomputed pipeline for one alpha and one set of axes; evaluate() is cheap and thread-safe.
class ChshExperiment {
 public:
  ChshExperiment(double alpha, const ChshSettings& settings, const ChshOptions& options = {});

  double alpha() const { return alpha_; }
  std::size_t cutoff() const { return cutoff_; }
  const ChshSettings& settings() const { return settings_; }
  const std::array<RotationRecipe, 4>& recipes() const { return recipes_; }

  /// Exact Born probabilities; options().sampled switches to shot counts.
  ChshResult evaluate(double phase_error) const;
  /// Exact S only.
  double exact_s(double phase_error) const;
  /// Same alpha, detector and options with different axes (no refinement).
  ChshExperiment with_settings(const ChshSettings& settings) const;

 private:
  std::array<JointOutcomeDistribution, 4> joint_distributions(double phase_error) const;
  std::array<JointOutcomeDistribution, 4> joint_at(double phase_error) const;
  Eigen::MatrixXcd party_operator(std::size_t axis, double kerr_error) const;
  void synthesize();

  double alpha_;
  ChshSettings settings_;
  ChshOptions options_;
  std::size_t cutoff_;
  SingleModeState input_;
  BeamSplitter splitter_;
  DetectorPovm povm_;
  std::array<RotationRecipe, 4> recipes_;
  std::array<std::vector<Eigen::MatrixXcd>, 4> displacements_;
};

/// Axes improved by coordinate descent with step halving, maximising exact S at zero error.
ChshSettings refine_settings(double alpha, const ChshSettings& start, const ChshOptions& options = {});

ChshResult chsh_pipeline(double alpha, const ChshSettings& settings, double phase_error, const ChshOptions& options = {});

/// S over a grid of phase errors, evaluated in parallel.
std::vector<ChshResult> chsh_sweep(double alpha, const ChshSettings& settings, std::span<const double> phase_errors,
                                   const ChshOptions& options = {});

struct CrossingPoint {
  double alpha = 0.0;
  double mean_photons = 0.0;  ///< 2 alpha^2
  double s_at_zero = 0.0;
  double delta_star = 0.0;
  /// S strictly decreased along the scan from zero error up to the crossing.
  bool monotone = true;
  /// Largest S seen on the scan and the phase error where it occurred.
  double peak_s = 0.0;
  double peak_delta = 0.0;
};

/// First phase error > 0 at which exact S drops to 2, bisected to relative 1e-4.
/// Throws NoViolationError if S(0) <= 2.
CrossingPoint find_crossing(double alpha, const ChshSettings& settings, const ChshOptions& options = {});

struct PhaseSensitivity {
  std::vector<CrossingPoint> points;
  std::vector<double> excluded_alphas;  ///< S(0) <= 2
  ScalingFit fit;                       ///< log delta_star against log N
};

PhaseSensitivity phase_sensitivity(std::span<const double> alpha_values,
                                   const ChshSettings& settings = ChshSettings::textbook_optimal(),
                                   const ChshOptions& options = {});

/// Gauss-Hermite nodes and weights for the standard normal density.
std::pair<std::vector<double>, std::vector<double>> normal_quadrature(std::size_t nodes);

nlohmann::json to_json(const ChshSettings& s);
ChshSettings chsh_settings_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ChshResult& r);

}  // namespace kerrsim
