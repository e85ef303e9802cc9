#pragma once

// Coherent-state qubits: logical basis {|alpha>, |-alpha>}, effective 2x2 action of physical
// circuits, and rotation synthesis from Kerr(pi/2) blocks plus small imaginary displacements.

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "kerrsim/circuit.hpp"
#include "kerrsim/fock.hpp"

namespace kerrsim {

using Matrix2 = Eigen::Matrix2cd;

namespace gates {

Matrix2 identity();
/// exp(-i t X/2), exp(-i t Y/2), exp(-i t Z/2).
Matrix2 rx(double t);
Matrix2 ry(double t);
Matrix2 rz(double t);
/// diag(e^{i t/2}, e^{-i t/2}): positive t advances the phase of the |+alpha> component.
/// Equals rz(-t).
Matrix2 phase_rotation(double t);
/// Logical action of Kerr(pi/2) up to global phase: (I + iX)/sqrt2 = rx(-pi/2).
Matrix2 kerr_block();
/// -i H, the special-unitary representative of the Hadamard gate.
Matrix2 hadamard();

}  // namespace gates

/// min over theta of the spectral norm |u - e^{i theta} v|.
double operator_distance(const Matrix2& u, const Matrix2& v);

class QubitEncoding {
 public:
  explicit QubitEncoding(double alpha);

  double alpha() const { return alpha_; }
  /// <alpha|-alpha> = e^{-2 alpha^2}.
  double basis_overlap() const { return overlap_; }

  /// Policy cutoff for a mode holding |alpha| shifted by up to `extra` in amplitude.
  std::size_t cutoff(double extra = 0.0) const;

  /// Normalized (|alpha> + |-alpha>) and (|alpha> - |-alpha>).
  std::pair<SingleModeState, SingleModeState> parity_basis(std::size_t cutoff) const;
  /// Symmetric orthonormalization of {|alpha>, |-alpha>}: (even +- odd)/sqrt2.
  std::pair<SingleModeState, SingleModeState> logical_basis(std::size_t cutoff) const;

 private:
  double alpha_;
  double overlap_;
};

/// |+alpha> for bit 0 and |-alpha> for bit 1.
SingleModeState encode(int bit, const QubitEncoding& enc, std::size_t cutoff);

struct EffectiveQubitAction {
  Matrix2 matrix;  ///< <i_L| C |j_L> in the symmetric logical basis
  double leakage;  ///< worst-case weight leaving the qubit subspace
};

EffectiveQubitAction effective_action(const PhysicalCircuit& c, const QubitEncoding& enc);
EffectiveQubitAction effective_action(const PhysicalCircuit& c, const QubitEncoding& enc, std::size_t cutoff);

/// Imaginary displacement D(i eps) acts on the qubit as rz(-4 alpha eps); this returns the eps
/// that realises rz(angle).
double displacement_for_rz(double angle, const QubitEncoding& enc);

struct RotationStep {
  enum class Kind { PhaseRotation, KerrBlock };
  Kind kind;
  double rz_angle = 0.0;  ///< standard rz angle, PhaseRotation only
  double epsilon = 0.0;   ///< imaginary displacement amplitude, PhaseRotation only
};

struct RotationRecipe {
  double alpha = 0.0;
  Matrix2 target = Matrix2::Identity();
  /// Steps in application order.
  std::vector<RotationStep> steps;
  /// Set for measurement-basis recipes: the target holds only up to a leading rz, which a
  /// subsequent Z-basis measurement cannot see.
  bool leading_phase_free = false;

  std::size_t kerr_blocks() const;
  double total_displacement() const;
  /// Product of the ideal logical gates.
  Matrix2 ideal_action() const;
  /// Every Kerr block carries `phase_error`.
  PhysicalCircuit to_circuit(double phase_error = 0.0) const;
};

/// rz(a) K rz(b) K rz(c) with K = gates::kerr_block(); a single K block when |U_00| = 1/sqrt2.
/// Among the equivalent angle choices the one with the least total squared rotation is kept,
/// which minimises the displacement-induced leakage. Throws std::invalid_argument unless the
/// target is special-unitary within 1e-10.
RotationRecipe synthesize_rotation(const Matrix2& target, const QubitEncoding& enc);

/// Measurement axis on the Bloch sphere (polar theta from +Z, azimuth phi from +X).
struct BlochAxis {
  double theta = 0.0;
  double phi = 0.0;
  Eigen::Vector3d vector() const;
};

/// U with U^dag Z U = n.sigma.
Matrix2 measurement_rotation(const BlochAxis& axis);

/// Shortest recipe R with R^dag Z R = n.sigma: empty for +Z, one Kerr block on the equator.
RotationRecipe synthesize_measurement(const BlochAxis& axis, const QubitEncoding& enc);

nlohmann::json to_json(const RotationRecipe& r);

}  // namespace kerrsim
