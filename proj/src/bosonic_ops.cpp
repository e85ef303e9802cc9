#include "kerrsim/bosonic_ops.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "kerrsim/errors.hpp"

namespace kerrsim {

std::optional<long long> exact_quarter_turns(double phi) {
  const double quarter = std::numbers::pi / 2.0;
  const double k = std::round(phi / quarter);
  if (std::abs(k) > 1e15) return std::nullopt;
  const double tolerance = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(phi));
  if (std::abs(phi - k * quarter) > tolerance) return std::nullopt;
  return static_cast<long long>(k);
}

Complex quarter_turn_phase(long long turns, std::size_t n) {
  const auto n_mod = static_cast<long long>(n % 4);
  const long long t = (((turns % 4) * ((n_mod * n_mod) % 4)) % 4 + 4) % 4;
  static constexpr std::array<Complex, 4> kUnits{Complex(1.0, 0.0), Complex(0.0, -1.0), Complex(-1.0, 0.0),
                                                 Complex(0.0, 1.0)};
  return kUnits[static_cast<std::size_t>(t)];
}

Eigen::VectorXcd kerr_phases(double phi, std::size_t cutoff) {
  constexpr long double two_pi = 2.0L * 3.141592653589793238462643383279502884L;
  Eigen::VectorXcd phases(static_cast<Eigen::Index>(cutoff + 1));
  if (const auto turns = exact_quarter_turns(phi)) {
    for (std::size_t n = 0; n <= cutoff; ++n) phases[static_cast<Eigen::Index>(n)] = quarter_turn_phase(*turns, n);
    return phases;
  }
  for (std::size_t n = 0; n <= cutoff; ++n) {
    const long double n2 = static_cast<long double>(n) * static_cast<long double>(n);
    const long double angle = std::fmod(static_cast<long double>(phi) * n2, two_pi);
    phases[static_cast<Eigen::Index>(n)] = std::polar(1.0, -static_cast<double>(angle));
  }
  return phases;
}

SingleModeState kerr_evolve(const SingleModeState& s, double phi) {
  return SingleModeState(s.amplitudes().cwiseProduct(kerr_phases(phi, s.cutoff())));
}

TwoModeState kerr_evolve(const TwoModeState& s, Mode mode, double phi) {
  if (mode == Mode::A) return TwoModeState(kerr_phases(phi, s.cutoff_a()).asDiagonal() * s.amplitudes());
  return TwoModeState(s.amplitudes() * kerr_phases(phi, s.cutoff_b()).asDiagonal());
}

SingleModeSuperposition kerr_closed_form(const SingleModeSuperposition& s, double phi) {
  const double quarter = std::numbers::pi / 2.0;
  const double k = std::round(phi / quarter);
  if (std::abs(phi - k * quarter) > 1e-12 * std::max(1.0, std::abs(phi))) {
    throw UnsupportedPhaseError("kerr_closed_form: phase must be a multiple of pi/2; use kerr_evolve");
  }
  const long long turns = (static_cast<long long>(k) % 4 + 4) % 4;
  const Complex i(0.0, 1.0);
  std::vector<SingleModeSuperposition::Term> out;
  for (const auto& t : s.terms()) {
    const Complex g = t.alphas[0];
    switch (turns) {
      case 0:
        out.push_back(t);
        break;
      case 1: {  // even levels keep phase 1, odd levels pick up -i
        const Complex c = std::polar(1.0 / std::numbers::sqrt2, -std::numbers::pi / 4.0);
        out.push_back({t.weight * c, {g}});
        out.push_back({t.weight * c * i, {-g}});
        break;
      }
      case 2:  // parity
        out.push_back({t.weight, {-g}});
        break;
      case 3: {  // even levels keep phase 1, odd levels pick up +i
        const Complex c = std::polar(1.0 / std::numbers::sqrt2, std::numbers::pi / 4.0);
        out.push_back({t.weight * c, {g}});
        out.push_back({-t.weight * c * i, {-g}});
        break;
      }
    }
  }
  return SingleModeSuperposition(std::move(out));
}

// ---------------------------------------------------------------------------

Eigen::MatrixXcd displacement_matrix(Complex beta, std::size_t cutoff) {
  const double reach = std::sqrt(static_cast<double>(cutoff)) + std::abs(beta);
  const std::size_t padded = std::max(cutoff + 16, choose_cutoff(reach * reach));
  const auto dim = static_cast<Eigen::Index>(padded + 1);
  Eigen::MatrixXcd generator = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index m = 0; m + 1 < dim; ++m) {
    const double root = std::sqrt(static_cast<double>(m + 1));
    generator(m + 1, m) = beta * root;
    generator(m, m + 1) = -std::conj(beta) * root;
  }
  const Eigen::MatrixXcd full = generator.exp();
  const auto keep = static_cast<Eigen::Index>(cutoff + 1);
  return full.topLeftCorner(keep, keep);
}

DisplaceOutcome displace_checked(const SingleModeState& s, Complex beta) {
  SingleModeState out(displacement_matrix(beta, s.cutoff()) * s.amplitudes());
  const double deviation = std::abs(out.norm_squared() / s.norm_squared() - 1.0);
  return {std::move(out), deviation, deviation > kTruncationWarningThreshold};
}

SingleModeState displace(const SingleModeState& s, Complex beta) { return displace_checked(s, beta).state; }

TwoModeState displace(const TwoModeState& s, Mode mode, Complex beta) {
  if (mode == Mode::A) return TwoModeState(displacement_matrix(beta, s.cutoff_a()) * s.amplitudes());
  return TwoModeState(s.amplitudes() * displacement_matrix(beta, s.cutoff_b()).transpose());
}

// ---------------------------------------------------------------------------

BeamSplitter::BeamSplitter(std::size_t cutoff) : cutoff_(cutoff) {
  const std::size_t max_total = 2 * cutoff_;
  blocks_.resize(max_total + 1);
  blocks_[0] = Eigen::MatrixXd::Ones(1, 1);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t total = 1; total <= max_total; ++total) {
    const std::size_t lo = lowest(total), hi = highest(total);
    const std::size_t prev_lo = lowest(total - 1), prev_hi = highest(total - 1);
    const Eigen::MatrixXd& prev = blocks_[total - 1];
    Eigen::MatrixXd& block = blocks_[total];
    block = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(hi - lo + 1), static_cast<Eigen::Index>(hi - lo + 1));
    for (std::size_t p = lo; p <= hi; ++p) {
      // U|p,q> = (U a^dag U^dag) U|p-1,q> / sqrt(p), or the b^dag analogue when p = 0.
      const bool raise_a = p >= 1;
      const std::size_t source = raise_a ? p - 1 : 0;
      const double sign = raise_a ? 1.0 : -1.0;
      const double norm = 1.0 / std::sqrt(static_cast<double>(raise_a ? p : total));
      const auto src_col = static_cast<Eigen::Index>(source - prev_lo);
      for (std::size_t k = lo; k <= hi; ++k) {
        double value = 0.0;
        if (k >= 1 && k - 1 >= prev_lo && k - 1 <= prev_hi) {
          value += std::sqrt(static_cast<double>(k)) * prev(static_cast<Eigen::Index>(k - 1 - prev_lo), src_col);
        }
        if (k >= prev_lo && k <= prev_hi) {
          value += sign * std::sqrt(static_cast<double>(total - k)) * prev(static_cast<Eigen::Index>(k - prev_lo), src_col);
        }
        block(static_cast<Eigen::Index>(k - lo), static_cast<Eigen::Index>(p - lo)) = inv_sqrt2 * norm * value;
      }
    }
  }
}

double BeamSplitter::element(std::size_t total, std::size_t k, std::size_t p) const {
  if (total >= blocks_.size()) throw std::out_of_range("BeamSplitter::element: total outside cutoff box");
  const std::size_t lo = lowest(total), hi = highest(total);
  if (k < lo || k > hi || p < lo || p > hi) throw std::out_of_range("BeamSplitter::element: index outside sector");
  return blocks_[total](static_cast<Eigen::Index>(k - lo), static_cast<Eigen::Index>(p - lo));
}

TwoModeState BeamSplitter::apply(const TwoModeState& s) const {
  if (s.cutoff_a() != cutoff_ || s.cutoff_b() != cutoff_) {
    throw std::invalid_argument("BeamSplitter::apply: state cutoffs do not match the splitter");
  }
  const Eigen::MatrixXcd& in = s.amplitudes();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(in.rows(), in.cols());
  for (std::size_t total = 0; total < blocks_.size(); ++total) {
    const std::size_t lo = lowest(total), hi = highest(total);
    Eigen::VectorXcd sector(static_cast<Eigen::Index>(hi - lo + 1));
    for (std::size_t p = lo; p <= hi; ++p)
      sector[static_cast<Eigen::Index>(p - lo)] = in(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(total - p));
    const Eigen::VectorXcd mapped = blocks_[total] * sector;
    for (std::size_t k = lo; k <= hi; ++k)
      out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(total - k)) = mapped[static_cast<Eigen::Index>(k - lo)];
  }
  return TwoModeState(std::move(out));
}

TwoModeState beam_split(const TwoModeState& s) {
  if (s.cutoff_a() != s.cutoff_b()) throw std::invalid_argument("beam_split: cutoffs of both modes must be equal");
  return BeamSplitter(s.cutoff_a()).apply(s);
}

}  // namespace kerrsim
