#pragma once

// Primitive unitaries: Kerr evolution, phase-space displacement, 50/50 beam splitter.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kerrsim/coherent_superposition.hpp"
#include "kerrsim/fock.hpp"

namespace kerrsim {

enum class Mode { A = 0, B = 1 };

/// Output norm deviation that triggers the displacement truncation warning.
inline constexpr double kTruncationWarningThreshold = 1e-9;

/// k when phi equals k*pi/2 to within a few ulps; such phases are applied exactly.
std::optional<long long> exact_quarter_turns(double phi);
/// e^{-i (k pi/2) n^2}, exactly one of {1, -i, -1, i}.
Complex quarter_turn_phase(long long turns, std::size_t n);

/// Diagonal of exp(-i phi (a^dag a)^2) up to `cutoff`. The phase phi*n^2 is reduced modulo 2pi in
/// extended precision so large photon numbers keep their periodicity.
Eigen::VectorXcd kerr_phases(double phi, std::size_t cutoff);

SingleModeState kerr_evolve(const SingleModeState& s, double phi);
TwoModeState kerr_evolve(const TwoModeState& s, Mode mode, double phi);

/// Exact Kerr action on coherent superpositions for phi a multiple of pi/2.
/// Throws UnsupportedPhaseError otherwise.
SingleModeSuperposition kerr_closed_form(const SingleModeSuperposition& s, double phi);

/// D(beta) restricted to the first cutoff+1 levels. The generator is exponentiated on a padded
/// space so the retained block is free of edge artefacts.
Eigen::MatrixXcd displacement_matrix(Complex beta, std::size_t cutoff);

struct DisplaceOutcome {
  SingleModeState state;
  double norm_deviation;  ///< | |out|^2 / |in|^2 - 1 |
  bool truncation_warning;
};

DisplaceOutcome displace_checked(const SingleModeState& s, Complex beta);
SingleModeState displace(const SingleModeState& s, Complex beta);
TwoModeState displace(const TwoModeState& s, Mode mode, Complex beta);

/// 50/50 beam splitter with coherent action (g, d) -> ((g+d)/sqrt2, (g-d)/sqrt2).
///
/// Stores the real block matrices of the unitary inside each total-photon-number sector, built
/// by repeatedly applying the transformed creation operators (a^dag +- b^dag)/sqrt2 to the vacuum.
/// The recursion never leaves the truncated box, so the retained matrix elements are exact.
class BeamSplitter {
 public:
  explicit BeamSplitter(std::size_t cutoff);

  std::size_t cutoff() const { return cutoff_; }
  TwoModeState apply(const TwoModeState& s) const;

  /// <k, T-k| U |p, T-p>.
  double element(std::size_t total, std::size_t k, std::size_t p) const;

  std::size_t max_total() const { return blocks_.size() - 1; }
  /// Smallest and largest mode-A count in the sector with `total` photons.
  std::size_t lowest(std::size_t total) const { return total > cutoff_ ? total - cutoff_ : 0; }
  std::size_t highest(std::size_t total) const { return std::min(total, cutoff_); }
  /// Sector matrix, indexed from lowest(total).
  const Eigen::MatrixXd& block(std::size_t total) const { return blocks_.at(total); }

 private:

  std::size_t cutoff_;
  std::vector<Eigen::MatrixXd> blocks_;
};

/// Requires equal cutoffs on both modes.
TwoModeState beam_split(const TwoModeState& s);

}  // namespace kerrsim
