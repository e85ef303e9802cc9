#pragma once

// Fidelity of Kerr-evolved coherent states near the cat-making phase pi/2, its Gaussian
// asymptotics, half-width extraction and power-law fits.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kerrsim {

/// |e^{-N} sum_n N^n/n! e^{i phi_tilde n^2}|^2, summed until the Poisson weight seen exceeds
/// 1 - 1e-15, and divided by the squared weight summed.
double fidelity_exact(double mean_photons, double phi_tilde);

/// |<psi_phi|psi_{pi/2}>|^2 with psi_phi = exp(-i phi (a^dag a)^2)|sqrt2 alpha> in Fock space.
double fidelity_fock(double alpha, double phi);

/// exp(-4 N^3 phi_tilde^2).
double fidelity_gaussian(double mean_photons, double phi_tilde);

/// Closed-form half-width sqrt(ln 2) / (2 N^{3/2}) of the Gaussian law.
double gaussian_half_width(double mean_photons);

using FidelityEvaluator = std::function<double(double mean_photons, double phi_tilde)>;

/// First phi_tilde > 0 where the curve crosses 1/2 (bisection to relative 1e-6). Requires the
/// curve to decrease up to the crossing; the scan range doubles up to pi before giving up with
/// NoCrossingError.
double half_width(const FidelityEvaluator& fidelity, double mean_photons);

struct FidelityCurve {
  double mean_photons = 0.0;
  std::vector<double> phi_tilde;
  std::vector<double> fidelity;
};

FidelityCurve fidelity_curve(const FidelityEvaluator& fidelity, double mean_photons, std::span<const double> grid);

/// Inclusive linear grid with `steps` points.
std::vector<double> linear_grid(double min, double max, std::size_t steps);

struct ScalingFit {
  std::vector<double> n_values;
  std::vector<double> half_widths;
  double exponent = 0.0;
  double intercept = 0.0;  ///< natural log of the prefactor
  double residual = 0.0;   ///< largest absolute log-space residual
};

/// Ordinary least squares of log(y) against log(x).
ScalingFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// Half-widths at each N and their log-log fit. Needs >= 3 distinct N values, each >= 10.
ScalingFit fit_scaling(std::span<const double> n_values, const FidelityEvaluator& fidelity = fidelity_exact);

}  // namespace kerrsim
