#include "kerrsim/coherent_qubit.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace kerrsim {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

double wrap_angle(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

double spectral_norm(const Matrix2& m) { return Eigen::JacobiSVD<Matrix2>(m).singularValues()(0); }

// Agreement up to a leading rz: R U^dag must be diagonal.
bool equal_up_to_leading_rz(const Matrix2& r, const Matrix2& u, double tol) {
  const Matrix2 p = r * u.adjoint();
  return std::abs(p(0, 1)) < tol && std::abs(p(1, 0)) < tol;
}

struct Decomposition {
  bool single_block = false;
  double a = 0.0, b = 0.0, c = 0.0;  // b unused for single_block
};

Matrix2 reconstruct(const Decomposition& d) {
  const Matrix2 k = gates::kerr_block();
  if (d.single_block) return gates::rz(d.a) * k * gates::rz(d.c);
  return gates::rz(d.a) * k * gates::rz(d.b) * k * gates::rz(d.c);
}

double cost(const Decomposition& d, bool leading_free) {
  double total = d.c * d.c;
  if (!d.single_block) total += d.b * d.b;
  if (!leading_free) total += d.a * d.a;
  return total;
}

std::optional<Decomposition> best_of(const std::vector<Decomposition>& candidates, const Matrix2& target,
                                     bool leading_free) {
  constexpr double kVerifyTol = 1e-9;
  std::optional<Decomposition> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (Decomposition d : candidates) {
    d.a = wrap_angle(d.a);
    d.b = wrap_angle(d.b);
    d.c = wrap_angle(d.c);
    const Matrix2 r = reconstruct(d);
    const bool ok = leading_free ? equal_up_to_leading_rz(r, target, kVerifyTol)
                                 : operator_distance(r, target) < kVerifyTol;
    if (!ok) continue;
    const double cst = cost(d, leading_free);
    if (cst < best_cost - 1e-12) {
      best_cost = cst;
      best = d;
    }
  }
  return best;
}

std::vector<Decomposition> single_block_candidates(const Matrix2& u) {
  std::vector<Decomposition> out;
  if (std::abs(std::abs(u(0, 0)) - 1.0 / std::numbers::sqrt2) > 1e-10) return out;
  const double sigma = std::arg(u(1, 1) / u(0, 0));
  const double delta = std::arg(u(1, 0) / u(0, 1));
  for (double s : {sigma, sigma + 2.0 * kPi}) {
    Decomposition d;
    d.single_block = true;
    d.a = 0.5 * (s + delta);
    d.c = 0.5 * (s - delta);
    out.push_back(d);
  }
  return out;
}

// Candidates from the zyz Euler angles via rz(p) ry(t) rz(l) = rz(p) K rz(t+pi) K rz(l-pi), in
// both sign branches; the degenerate sectors add the least-rotation split of the free angle.
std::vector<Decomposition> double_block_candidates(const Matrix2& u) {
  std::vector<Decomposition> out;
  auto push_euler = [&](double p, double t, double l) {
    out.push_back({false, p, t + kPi, l - kPi});
    out.push_back({false, p + kPi, kPi - t, l - 2.0 * kPi});
  };
  const double theta = 2.0 * std::atan2(std::abs(u(1, 0)), std::abs(u(0, 0)));
  constexpr double kDegenerate = 1e-9;
  if (std::abs(u(1, 0)) < kDegenerate) {
    const double sigma = std::arg(u(1, 1) / u(0, 0));
    for (double s : {sigma, sigma + 2.0 * kPi}) {
      push_euler(0.5 * s, 0.0, 0.5 * s);
      const double w = s - kPi;
      out.push_back({false, 0.5 * w, kPi, 0.5 * w});
    }
  } else if (std::abs(u(0, 0)) < kDegenerate) {
    const double diff = std::arg(u(1, 0) / (-u(0, 1)));
    for (double d : {diff, diff + 2.0 * kPi}) {
      push_euler(0.5 * d, kPi, -0.5 * d);
      const double e = d + kPi;
      out.push_back({false, 0.5 * e, 0.0, -0.5 * e});
    }
  } else {
    const double sigma = std::arg(u(1, 1) / u(0, 0));
    const double diff = std::arg(u(1, 0) / (-u(0, 1)));
    for (double s : {sigma, sigma + 2.0 * kPi}) push_euler(0.5 * (s + diff), theta, 0.5 * (s - diff));
  }
  return out;
}

RotationRecipe build_recipe(const Decomposition& d, const Matrix2& target, const QubitEncoding& enc,
                            bool leading_free) {
  RotationRecipe r;
  r.alpha = enc.alpha();
  r.target = target;
  r.leading_phase_free = leading_free;
  auto push_rz = [&](double angle) {
    if (std::abs(angle) < 1e-14) return;
    r.steps.push_back({RotationStep::Kind::PhaseRotation, angle, displacement_for_rz(angle, enc)});
  };
  auto push_k = [&] { r.steps.push_back({RotationStep::Kind::KerrBlock}); };
  push_rz(d.c);
  push_k();
  if (!d.single_block) {
    push_rz(d.b);
    push_k();
  }
  if (!leading_free) push_rz(d.a);
  return r;
}

void require_special_unitary(const Matrix2& u) {
  const double unitarity = (u.adjoint() * u - Matrix2::Identity()).norm();
  const double det = std::abs(u.determinant() - 1.0);
  if (unitarity > 1e-10 || det > 1e-10) {
    throw std::invalid_argument("synthesize_rotation: target must be special-unitary within 1e-10");
  }
}

}  // namespace

namespace gates {

Matrix2 identity() { return Matrix2::Identity(); }

Matrix2 rx(double t) {
  Matrix2 m;
  m << std::cos(t / 2), -kI * std::sin(t / 2), -kI * std::sin(t / 2), std::cos(t / 2);
  return m;
}

Matrix2 ry(double t) {
  Matrix2 m;
  m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
  return m;
}

Matrix2 rz(double t) {
  Matrix2 m;
  m << std::polar(1.0, -t / 2), 0.0, 0.0, std::polar(1.0, t / 2);
  return m;
}

Matrix2 phase_rotation(double t) { return rz(-t); }

Matrix2 kerr_block() { return rx(-kPi / 2); }

Matrix2 hadamard() {
  Matrix2 m;
  m << 1.0, 1.0, 1.0, -1.0;
  return -kI * m / std::numbers::sqrt2;
}

}  // namespace gates

double operator_distance(const Matrix2& u, const Matrix2& v) {
  auto f = [&](double theta) { return spectral_norm(u - std::polar(1.0, theta) * v); };
  // Frobenius-optimal phase as the starting point, then a scan and golden-section refinement.
  const double start = std::arg((v.adjoint() * u).trace());
  constexpr int kScan = 96;
  double best_theta = start, best = f(start);
  for (int k = 1; k < kScan; ++k) {
    const double theta = start + 2.0 * kPi * k / kScan;
    const double value = f(theta);
    if (value < best) {
      best = value;
      best_theta = theta;
    }
  }
  double lo = best_theta - 2.0 * kPi / kScan, hi = best_theta + 2.0 * kPi / kScan;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({best, f1, f2});
}

// ---------------------------------------------------------------------------

QubitEncoding::QubitEncoding(double alpha) : alpha_(alpha), overlap_(std::exp(-2.0 * alpha * alpha)) {
  if (!(alpha > 0.0)) throw std::invalid_argument("QubitEncoding: alpha must be > 0");
}

std::size_t QubitEncoding::cutoff(double extra) const {
  const double reach = alpha_ + std::abs(extra);
  return choose_cutoff(reach * reach);
}

std::pair<SingleModeState, SingleModeState> QubitEncoding::parity_basis(std::size_t cutoff) const {
  const Eigen::VectorXcd plus = coherent_fock(alpha_, cutoff).amplitudes();
  const Eigen::VectorXcd minus = coherent_fock(-alpha_, cutoff).amplitudes();
  return {SingleModeState((plus + minus).normalized()), SingleModeState((plus - minus).normalized())};
}

std::pair<SingleModeState, SingleModeState> QubitEncoding::logical_basis(std::size_t cutoff) const {
  const auto [even, odd] = parity_basis(cutoff);
  const double r = 1.0 / std::numbers::sqrt2;
  return {SingleModeState(r * (even.amplitudes() + odd.amplitudes())),
          SingleModeState(r * (even.amplitudes() - odd.amplitudes()))};
}

SingleModeState encode(int bit, const QubitEncoding& enc, std::size_t cutoff) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("encode: bit must be 0 or 1");
  return coherent_fock(bit == 0 ? enc.alpha() : -enc.alpha(), cutoff);
}

EffectiveQubitAction effective_action(const PhysicalCircuit& c, const QubitEncoding& enc) {
  double shift = 0.0;
  for (const auto& op : c.ops())
    if (const auto* d = std::get_if<DisplacementGate>(&op.gate)) shift += std::abs(d->beta);
  return effective_action(c, enc, enc.cutoff(shift + 1.0));
}

EffectiveQubitAction effective_action(const PhysicalCircuit& c, const QubitEncoding& enc, std::size_t cutoff) {
  const auto [zero, one] = enc.logical_basis(cutoff);
  const SingleModeState out0 = run_circuit(c, zero);
  const SingleModeState out1 = run_circuit(c, one);
  EffectiveQubitAction action{Matrix2::Zero(), 0.0};
  action.matrix(0, 0) = inner_product(zero, out0);
  action.matrix(1, 0) = inner_product(one, out0);
  action.matrix(0, 1) = inner_product(zero, out1);
  action.matrix(1, 1) = inner_product(one, out1);
  const double leak0 = out0.norm_squared() - action.matrix.col(0).squaredNorm();
  const double leak1 = out1.norm_squared() - action.matrix.col(1).squaredNorm();
  action.leakage = std::max({0.0, leak0, leak1});
  return action;
}

double displacement_for_rz(double angle, const QubitEncoding& enc) { return -angle / (4.0 * enc.alpha()); }

// ---------------------------------------------------------------------------

std::size_t RotationRecipe::kerr_blocks() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.kind == RotationStep::Kind::KerrBlock ? 1 : 0;
  return n;
}

double RotationRecipe::total_displacement() const {
  double total = 0.0;
  for (const auto& s : steps) total += std::abs(s.epsilon);
  return total;
}

Matrix2 RotationRecipe::ideal_action() const {
  Matrix2 m = Matrix2::Identity();
  for (const auto& s : steps)
    m = (s.kind == RotationStep::Kind::KerrBlock ? gates::kerr_block() : gates::rz(s.rz_angle)) * m;
  return m;
}

PhysicalCircuit RotationRecipe::to_circuit(double phase_error) const {
  PhysicalCircuit c;
  for (const auto& s : steps) {
    if (s.kind == RotationStep::Kind::KerrBlock) {
      c = c.then_kerr(kPi / 2, Mode::A, phase_error);
    } else {
      c = c.then_displace(Complex(0.0, s.epsilon));
    }
  }
  return c;
}

RotationRecipe synthesize_rotation(const Matrix2& target, const QubitEncoding& enc) {
  require_special_unitary(target);
  if (auto d = best_of(single_block_candidates(target), target, false)) return build_recipe(*d, target, enc, false);
  if (auto d = best_of(double_block_candidates(target), target, false)) return build_recipe(*d, target, enc, false);
  throw std::logic_error("synthesize_rotation: no decomposition reproduced the target");
}

Eigen::Vector3d BlochAxis::vector() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Matrix2 measurement_rotation(const BlochAxis& axis) { return gates::ry(-axis.theta) * gates::rz(-axis.phi); }

RotationRecipe synthesize_measurement(const BlochAxis& axis, const QubitEncoding& enc) {
  const Matrix2 target = measurement_rotation(axis);
  if (equal_up_to_leading_rz(Matrix2::Identity(), target, 1e-12)) {
    RotationRecipe r;
    r.alpha = enc.alpha();
    r.target = target;
    r.leading_phase_free = true;
    return r;
  }
  // Any leading rz may be prepended, so look for a single block among rz(chi) U as well.
  std::vector<Decomposition> singles;
  const Complex u00 = target(0, 0);
  if (std::abs(std::abs(u00) - 1.0 / std::numbers::sqrt2) <= 1e-10) singles = single_block_candidates(target);
  if (auto d = best_of(singles, target, true)) return build_recipe(*d, target, enc, true);
  if (auto d = best_of(double_block_candidates(target), target, true)) return build_recipe(*d, target, enc, true);
  throw std::logic_error("synthesize_measurement: no decomposition reproduced the axis");
}

nlohmann::json to_json(const RotationRecipe& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : r.steps) {
    if (s.kind == RotationStep::Kind::KerrBlock) {
      steps.push_back({{"kind", "kerr_block"}});
    } else {
      steps.push_back({{"kind", "rz"}, {"angle", s.rz_angle}, {"epsilon", s.epsilon}});
    }
  }
  return {{"alpha", r.alpha},
          {"leading_phase_free", r.leading_phase_free},
          {"steps", steps},
          {"circuit", to_json(r.to_circuit())}};
}

}  // namespace kerrsim
