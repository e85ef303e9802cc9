#include "kerrsim/coherent_superposition.hpp"

namespace kerrsim {

SingleModeState to_fock(const SingleModeSuperposition& s, std::size_t cutoff) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(cutoff + 1));
  for (const auto& t : s.terms()) v += t.weight * coherent_fock(t.alphas[0], cutoff).amplitudes();
  return SingleModeState(std::move(v));
}

TwoModeState to_fock(const TwoModeSuperposition& s, std::size_t cutoff_a, std::size_t cutoff_b) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(cutoff_a + 1),
                                              static_cast<Eigen::Index>(cutoff_b + 1));
  for (const auto& t : s.terms()) {
    m += t.weight * coherent_fock(t.alphas[0], cutoff_a).amplitudes() *
         coherent_fock(t.alphas[1], cutoff_b).amplitudes().transpose();
  }
  return TwoModeState(std::move(m));
}

std::size_t policy_cutoff(const SingleModeSuperposition& s) {
  return choose_cutoff(s.max_mean_photons()[0]);
}

}  // namespace kerrsim
