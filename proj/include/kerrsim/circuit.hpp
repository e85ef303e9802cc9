#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "kerrsim/bosonic_ops.hpp"

namespace kerrsim {

struct KerrGate {
  double phi = 0.0;
  double phase_error = 0.0;  ///< added to phi when the gate runs
  double effective_phase() const { return phi + phase_error; }
};

struct DisplacementGate {
  Complex beta;
};

struct BeamSplitGate {};

using Gate = std::variant<KerrGate, DisplacementGate, BeamSplitGate>;

struct CircuitOp {
  Gate gate;
  Mode target = Mode::A;  ///< ignored by BeamSplitGate
};

/// Immutable ordered list of primitive operations.
class PhysicalCircuit {
 public:
  PhysicalCircuit() = default;
  explicit PhysicalCircuit(std::vector<CircuitOp> ops) : ops_(std::move(ops)) {}

  const std::vector<CircuitOp>& ops() const { return ops_; }
  bool empty() const { return ops_.empty(); }
  std::size_t size() const { return ops_.size(); }
  bool is_single_mode() const;

  PhysicalCircuit then_kerr(double phi, Mode target = Mode::A, double phase_error = 0.0) const;
  PhysicalCircuit then_displace(Complex beta, Mode target = Mode::A) const;
  PhysicalCircuit then_beam_split() const;
  /// This circuit followed by `next`.
  PhysicalCircuit then(const PhysicalCircuit& next) const;

  /// Copy in which every Kerr gate carries `phase_error` (replacing any previous error).
  PhysicalCircuit with_phase_error(double phase_error) const;
  /// Copy with every phase error cleared.
  PhysicalCircuit ideal() const { return with_phase_error(0.0); }

  friend bool operator==(const PhysicalCircuit& a, const PhysicalCircuit& b);

 private:
  std::vector<CircuitOp> ops_;
};

bool operator==(const KerrGate& a, const KerrGate& b);
bool operator==(const DisplacementGate& a, const DisplacementGate& b);
bool operator==(const BeamSplitGate&, const BeamSplitGate&);
bool operator==(const CircuitOp& a, const CircuitOp& b);

/// Single-mode circuits only; throws std::invalid_argument on beam splitters or mode-B targets.
SingleModeState run_circuit(const PhysicalCircuit& c, const SingleModeState& input);
TwoModeState run_circuit(const PhysicalCircuit& c, const TwoModeState& input);

/// Fock matrix of a single-mode circuit truncated at `cutoff`.
Eigen::MatrixXcd circuit_matrix(const PhysicalCircuit& c, std::size_t cutoff);

// {"ops": [{"kind": "kerr", "phi": x, "err": y, "mode": "A"},
//          {"kind": "displace", "re": x, "im": y, "mode": "B"},
//          {"kind": "beam_split"}]}
nlohmann::json to_json(const PhysicalCircuit& c);
PhysicalCircuit circuit_from_json(const nlohmann::json& j);

}  // namespace kerrsim
