#include "kerrsim/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <stdexcept>

#include "kerrsim/bosonic_ops.hpp"
#include "kerrsim/errors.hpp"
#include "kerrsim/fock.hpp"

namespace kerrsim {

namespace {

// Neumaier summation for the complex series.
class CompensatedSum {
 public:
  void add(std::complex<double> x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

 private:
  struct Real {
    double sum = 0.0, carry = 0.0;
    void add(double x) {
      const double t = sum + x;
      carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
      sum = t;
    }
    double value() const { return sum + carry; }
  };
  Real re_, im_;
};

}  // namespace

double fidelity_exact(double mean_photons, double phi_tilde) {
  if (!(mean_photons > 0.0)) throw std::invalid_argument("fidelity_exact: N must be > 0");
  constexpr long double two_pi = 2.0L * 3.141592653589793238462643383279502884L;
  const double log_n = std::log(mean_photons);
  const double hard_stop = mean_photons + 40.0 * std::sqrt(mean_photons) + 100.0;
  const auto turns = exact_quarter_turns(phi_tilde);
  CompensatedSum amplitude, total;
  double weight_seen = 0.0;
  for (std::size_t n = 0;; ++n) {
    const double nd = static_cast<double>(n);
    const double weight = std::exp(-mean_photons + nd * log_n - std::lgamma(nd + 1.0));
    if (turns) {
      amplitude.add(weight * std::conj(quarter_turn_phase(*turns, n)));
    } else {
      const long double angle = std::fmod(static_cast<long double>(phi_tilde) * static_cast<long double>(n) *
                                              static_cast<long double>(n),
                                          two_pi);
      amplitude.add(std::polar(weight, static_cast<double>(angle)));
    }
    total.add(weight);
    weight_seen += weight;
    if (weight_seen > 1.0 - 1e-15 || nd > hard_stop) break;
  }
  // Normalized by the weight actually summed, so the truncated series is exactly 1 at zero offset.
  return std::norm(amplitude.value()) / std::norm(total.value());
}

double fidelity_fock(double alpha, double phi) {
  const double mean = 2.0 * alpha * alpha;
  const SingleModeState input = coherent_fock(std::numbers::sqrt2 * alpha, choose_cutoff(mean));
  const SingleModeState ideal = kerr_evolve(input, std::numbers::pi / 2.0);
  const SingleModeState actual = kerr_evolve(input, phi);
  return fidelity(actual, ideal) / (input.norm_squared() * input.norm_squared());
}

double fidelity_gaussian(double mean_photons, double phi_tilde) {
  return std::exp(-4.0 * mean_photons * mean_photons * mean_photons * phi_tilde * phi_tilde);
}

double gaussian_half_width(double mean_photons) {
  return std::sqrt(std::numbers::ln2) / (2.0 * std::pow(mean_photons, 1.5));
}

double half_width(const FidelityEvaluator& fidelity, double mean_photons) {
  constexpr int kScanPoints = 64;
  double range = 4.0 * gaussian_half_width(mean_photons);
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  while (!bracketed) {
    double previous = fidelity(mean_photons, 0.0);
    for (int k = 1; k <= kScanPoints; ++k) {
      const double x = range * k / kScanPoints;
      const double f = fidelity(mean_photons, x);
      if (f < 0.5) {
        lo = range * (k - 1) / kScanPoints;
        hi = x;
        bracketed = true;
        break;
      }
      if (f > previous + 1e-12) {
        throw NoCrossingError("half_width: fidelity rises before reaching 1/2; no monotone decay to bisect");
      }
      previous = f;
    }
    if (!bracketed) {
      if (range >= std::numbers::pi) throw NoCrossingError("half_width: fidelity stays above 1/2 up to pi");
      range = std::min(2.0 * range, std::numbers::pi);
    }
  }
  while (hi - lo > 1e-6 * hi * 0.5) {
    const double mid = 0.5 * (lo + hi);
    (fidelity(mean_photons, mid) < 0.5 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

FidelityCurve fidelity_curve(const FidelityEvaluator& fidelity, double mean_photons, std::span<const double> grid) {
  FidelityCurve curve;
  curve.mean_photons = mean_photons;
  curve.phi_tilde.assign(grid.begin(), grid.end());
  curve.fidelity.reserve(grid.size());
  for (double x : grid) curve.fidelity.push_back(fidelity(mean_photons, x));
  return curve;
}

std::vector<double> linear_grid(double min, double max, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("linear_grid: steps must be >= 1");
  if (steps == 1) {
    if (min != max) throw std::invalid_argument("linear_grid: a single step needs min == max");
    return {min};
  }
  if (!(max > min)) throw std::invalid_argument("linear_grid: max must exceed min");
  std::vector<double> grid(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    grid[i] = min + (max - min) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  grid.back() = max;
  return grid;
}

ScalingFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_power_law: need >= 2 paired points");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_power_law: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    sx += lx.back();
    sy += ly.back();
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_power_law: x values must not all coincide");
  ScalingFit fit;
  fit.n_values.assign(x.begin(), x.end());
  fit.half_widths.assign(y.begin(), y.end());
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  for (std::size_t i = 0; i < lx.size(); ++i)
    fit.residual = std::max(fit.residual, std::abs(ly[i] - (fit.intercept + fit.exponent * lx[i])));
  return fit;
}

ScalingFit fit_scaling(std::span<const double> n_values, const FidelityEvaluator& fidelity) {
  const std::set<double> distinct(n_values.begin(), n_values.end());
  if (distinct.size() < 3) throw std::invalid_argument("fit_scaling: need at least 3 distinct N values");
  for (double n : n_values)
    if (!(n >= 10.0)) throw std::invalid_argument("fit_scaling: every N must be >= 10");
  std::vector<double> widths;
  widths.reserve(n_values.size());
  for (double n : n_values) widths.push_back(half_width(fidelity, n));
  return fit_power_law(n_values, widths);
}

}  // namespace kerrsim
