#pragma once

// Truncated Fock-space states for one and two bosonic modes.

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace kerrsim {

using Complex = std::complex<double>;

/// Squared-norm tolerance honoured by normalize().
inline constexpr double kNormTolerance = 1e-12;

struct CutoffPolicy {
  double mean_photons = 0.0;
  double tail_bound = 1e-12;
  double safety_factor = 8.0;
};

/// P(X > n) for X ~ Poisson(mean), summed term by term in the log domain.
double poisson_tail_above(double mean, std::size_t n);

/// Smallest n_max >= mean + safety*sqrt(mean+1) whose Poisson tail beyond n_max is below the bound.
std::size_t choose_cutoff(const CutoffPolicy& policy);

inline std::size_t choose_cutoff(double mean_photons) {
  return choose_cutoff(CutoffPolicy{mean_photons});
}

class SingleModeState {
 public:
  explicit SingleModeState(Eigen::VectorXcd amplitudes);

  static SingleModeState vacuum(std::size_t cutoff);
  static SingleModeState number_state(std::size_t n, std::size_t cutoff);

  std::size_t cutoff() const { return static_cast<std::size_t>(amplitudes_.size()) - 1; }
  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t n) const { return amplitudes_[static_cast<Eigen::Index>(n)]; }

  double norm_squared() const { return amplitudes_.squaredNorm(); }
  double norm() const { return amplitudes_.norm(); }
  double mean_photons() const;

  SingleModeState normalized() const;
  /// Zero-pads (or truncates) to the given cutoff.
  SingleModeState resized(std::size_t cutoff) const;

 private:
  Eigen::VectorXcd amplitudes_;
};

/// Amplitudes indexed (n_A, n_B); rows belong to mode A.
class TwoModeState {
 public:
  explicit TwoModeState(Eigen::MatrixXcd amplitudes);

  std::size_t cutoff_a() const { return static_cast<std::size_t>(amplitudes_.rows()) - 1; }
  std::size_t cutoff_b() const { return static_cast<std::size_t>(amplitudes_.cols()) - 1; }
  const Eigen::MatrixXcd& amplitudes() const { return amplitudes_; }
  Complex operator()(std::size_t n_a, std::size_t n_b) const {
    return amplitudes_(static_cast<Eigen::Index>(n_a), static_cast<Eigen::Index>(n_b));
  }

  double norm_squared() const { return amplitudes_.squaredNorm(); }
  double norm() const { return amplitudes_.norm(); }

  TwoModeState normalized() const;
  TwoModeState resized(std::size_t cutoff_a, std::size_t cutoff_b) const;

 private:
  Eigen::MatrixXcd amplitudes_;
};

/// Closed-form coherent-state overlap <beta|gamma>.
Complex coherent_overlap(Complex beta, Complex gamma);

/// |alpha> truncated at `cutoff`. Throws CutoffError if the Poisson tail beyond the cutoff
/// exceeds `tail_bound`.
SingleModeState coherent_fock(Complex alpha, std::size_t cutoff, double tail_bound = 1e-12);

/// |alpha> at the default policy cutoff for |alpha|^2.
SingleModeState coherent_fock(Complex alpha);

/// <a|b>; the shorter state is implicitly zero-padded.
Complex inner_product(const SingleModeState& a, const SingleModeState& b);
Complex inner_product(const TwoModeState& a, const TwoModeState& b);

/// |<a|b>|^2.
double fidelity(const SingleModeState& a, const SingleModeState& b);
double fidelity(const TwoModeState& a, const TwoModeState& b);

std::vector<double> photon_number_distribution(const SingleModeState& s);

struct MarginalDistributions {
  std::vector<double> mode_a;
  std::vector<double> mode_b;
};

MarginalDistributions photon_number_distribution(const TwoModeState& s);

/// Distribution of n_A + n_B.
std::vector<double> total_photon_distribution(const TwoModeState& s);

TwoModeState tensor(const SingleModeState& a, const SingleModeState& b);

// Debug dumps: {"cutoff": n, "re": [...], "im": [...]}.
nlohmann::json to_json(const SingleModeState& s);
SingleModeState single_mode_state_from_json(const nlohmann::json& j);
// Two-mode variant: {"cutoffs": [nA, nB], "re": [[...]], "im": [[...]]}.
nlohmann::json to_json(const TwoModeState& s);
TwoModeState two_mode_state_from_json(const nlohmann::json& j);

}  // namespace kerrsim
