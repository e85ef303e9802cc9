#pragma once

// Exact finite superpositions of (multi-mode) coherent states, sum_k w_k |alpha_k>.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "kerrsim/fock.hpp"

namespace kerrsim {

template <std::size_t Modes>
class CoherentSuperposition {
 public:
  struct Term {
    Complex weight;
    std::array<Complex, Modes> alphas;
  };

  CoherentSuperposition() = default;

  /// Terms with bit-identical amplitudes are merged by adding their weights.
  explicit CoherentSuperposition(std::vector<Term> terms) {
    for (const auto& t : terms) add(t);
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  CoherentSuperposition scaled(Complex factor) const {
    CoherentSuperposition out = *this;
    for (auto& t : out.terms_) t.weight *= factor;
    return out;
  }

  double norm_squared() const;

  /// Largest |alpha|^2 over terms, per mode.
  std::array<double, Modes> max_mean_photons() const {
    std::array<double, Modes> m{};
    for (const auto& t : terms_)
      for (std::size_t i = 0; i < Modes; ++i) m[i] = std::max(m[i], std::norm(t.alphas[i]));
    return m;
  }

 private:
  void add(const Term& t) {
    for (auto& existing : terms_) {
      if (existing.alphas == t.alphas) {
        existing.weight += t.weight;
        return;
      }
    }
    terms_.push_back(t);
  }

  std::vector<Term> terms_;
};

using SingleModeSuperposition = CoherentSuperposition<1>;
using TwoModeSuperposition = CoherentSuperposition<2>;

/// Bilinear expansion over term pairs with the closed-form coherent kernel.
template <std::size_t Modes>
Complex overlap_analytic(const CoherentSuperposition<Modes>& a, const CoherentSuperposition<Modes>& b) {
  Complex sum = 0.0;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      Complex kernel = 1.0;
      for (std::size_t m = 0; m < Modes; ++m) kernel *= coherent_overlap(ta.alphas[m], tb.alphas[m]);
      sum += std::conj(ta.weight) * tb.weight * kernel;
    }
  }
  return sum;
}

template <std::size_t Modes>
double CoherentSuperposition<Modes>::norm_squared() const {
  return overlap_analytic(*this, *this).real();
}

inline SingleModeSuperposition coherent_term(Complex alpha, Complex weight = 1.0) {
  return SingleModeSuperposition({{weight, {alpha}}});
}

/// (e^{-i pi/4}/sqrt2)(|beta> + i|-beta>), the state Kerr evolution for phase pi/2 makes from |beta>.
inline SingleModeSuperposition yurke_stoler_cat(Complex beta) {
  const Complex c = std::polar(1.0 / std::numbers::sqrt2, -std::numbers::pi / 4.0);
  return SingleModeSuperposition({{c, {beta}}, {c * Complex(0.0, 1.0), {-beta}}});
}

/// (e^{-i pi/4}/sqrt2)(|alpha>|alpha> + i|-alpha>|-alpha>).
inline TwoModeSuperposition entangled_coherent_state(Complex alpha) {
  const Complex c = std::polar(1.0 / std::numbers::sqrt2, -std::numbers::pi / 4.0);
  return TwoModeSuperposition({{c, {alpha, alpha}}, {c * Complex(0.0, 1.0), {-alpha, -alpha}}});
}

SingleModeState to_fock(const SingleModeSuperposition& s, std::size_t cutoff);
TwoModeState to_fock(const TwoModeSuperposition& s, std::size_t cutoff_a, std::size_t cutoff_b);

/// Cutoff large enough for every term under the default policy.
std::size_t policy_cutoff(const SingleModeSuperposition& s);

}  // namespace kerrsim
