#pragma once

// Bright-versus-vacuum detection of coherent-state qubits, binned photon counting and seeded
// Born-rule sampling.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "kerrsim/fock.hpp"

namespace kerrsim {

enum class Outcome { Plus = 0, Minus = 1, Inconclusive = 2 };

struct DiscriminationSetup {
  double ancilla_alpha = 1.0;
  std::size_t threshold = 1;

  /// Ancilla |alpha> and threshold ceil(alpha^2).
  static DiscriminationSetup for_alpha(double alpha);
  /// Throws std::invalid_argument unless 0 < threshold < 2 alpha^2.
  void validate() const;
};

/// +1 when only port 1 is bright, -1 when only port 2 is bright, inconclusive otherwise.
Outcome classify(std::size_t n1, std::size_t n2, std::size_t threshold);

struct OutcomeDistribution {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double p_inconclusive = 0.0;

  double total() const { return p_plus + p_minus + p_inconclusive; }
  std::array<double, 3> as_array() const { return {p_plus, p_minus, p_inconclusive}; }
};

/// Joint outcomes of two detectors; p[i][j] with indices ordered as Outcome.
struct JointOutcomeDistribution {
  std::array<std::array<double, 3>, 3> p{};

  double conclusive() const;
  /// (p_same - p_diff) over events where both detectors are conclusive.
  double correlation() const;
  std::array<double, 9> flattened() const;
};

/// Interferes `s` with the ancilla on a 50/50 beam splitter and classifies the joint photon counts.
OutcomeDistribution qubit_measure(const SingleModeState& s, const DiscriminationSetup& setup);

/// The same measurement as operator elements on the signal mode alone,
/// E_k = <anc| U^dag P_k U |anc>, for states up to `input_cutoff`.
class DetectorPovm {
 public:
  DetectorPovm(const DiscriminationSetup& setup, std::size_t input_cutoff);

  const DiscriminationSetup& setup() const { return setup_; }
  std::size_t input_cutoff() const { return input_cutoff_; }
  std::size_t working_cutoff() const { return working_cutoff_; }
  const Eigen::MatrixXcd& element(Outcome k) const { return elements_[static_cast<std::size_t>(k)]; }

  OutcomeDistribution measure(const SingleModeState& s) const;
  /// This detector on mode A and `other` on mode B.
  JointOutcomeDistribution measure(const TwoModeState& s, const DetectorPovm& other) const;

 private:
  DiscriminationSetup setup_;
  std::size_t input_cutoff_;
  std::size_t working_cutoff_;
  std::array<Eigen::MatrixXcd, 3> elements_;
};

/// Probability mass summed over consecutive bins of `bin_size` photon numbers.
std::vector<double> coarse_count(std::span<const double> distribution, std::size_t bin_size);
std::vector<double> coarse_count(const SingleModeState& s, std::size_t bin_size);

/// Counter-based random source: every draw is a pure function of (seed, stream, index).
struct CounterRng {
  static std::uint64_t bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
  /// Uniform in [0, 1) with 53 random bits.
  static double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
};

/// Category counts from `shots` inverse-CDF draws; draw i uses CounterRng(seed, stream, i).
std::vector<std::size_t> sample_categorical(std::span<const double> probabilities, std::uint64_t seed,
                                            std::uint64_t stream, std::size_t shots);

struct ShotRecord {
  std::uint64_t seed = 0;
  std::size_t shots = 0;
  std::array<std::size_t, 3> counts{};  ///< ordered as Outcome

  friend bool operator==(const ShotRecord&, const ShotRecord&) = default;
};

ShotRecord sample(const OutcomeDistribution& d, std::uint64_t seed, std::size_t shots, std::uint64_t stream = 0);

nlohmann::json to_json(const OutcomeDistribution& d);
nlohmann::json to_json(const ShotRecord& r);

}  // namespace kerrsim
