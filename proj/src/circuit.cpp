#include "kerrsim/circuit.hpp"

#include <stdexcept>
#include <string>

namespace kerrsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string mode_name(Mode m) { return m == Mode::A ? "A" : "B"; }

Mode parse_mode(const nlohmann::json& op) {
  if (!op.contains("mode")) return Mode::A;
  const auto& m = op.at("mode");
  if (m.is_number_integer()) {
    const int idx = m.get<int>();
    if (idx == 0) return Mode::A;
    if (idx == 1) return Mode::B;
  } else if (m.is_string()) {
    const auto s = m.get<std::string>();
    if (s == "A" || s == "a") return Mode::A;
    if (s == "B" || s == "b") return Mode::B;
  }
  throw std::invalid_argument("circuit_from_json: mode must be \"A\", \"B\", 0 or 1");
}

}  // namespace

bool operator==(const KerrGate& a, const KerrGate& b) { return a.phi == b.phi && a.phase_error == b.phase_error; }
bool operator==(const DisplacementGate& a, const DisplacementGate& b) { return a.beta == b.beta; }
bool operator==(const BeamSplitGate&, const BeamSplitGate&) { return true; }
bool operator==(const CircuitOp& a, const CircuitOp& b) {
  if (a.gate != b.gate) return false;
  return std::holds_alternative<BeamSplitGate>(a.gate) || a.target == b.target;
}
bool operator==(const PhysicalCircuit& a, const PhysicalCircuit& b) { return a.ops_ == b.ops_; }

bool PhysicalCircuit::is_single_mode() const {
  for (const auto& op : ops_) {
    if (std::holds_alternative<BeamSplitGate>(op.gate) || op.target != Mode::A) return false;
  }
  return true;
}

PhysicalCircuit PhysicalCircuit::then_kerr(double phi, Mode target, double phase_error) const {
  auto ops = ops_;
  ops.push_back({KerrGate{phi, phase_error}, target});
  return PhysicalCircuit(std::move(ops));
}

PhysicalCircuit PhysicalCircuit::then_displace(Complex beta, Mode target) const {
  auto ops = ops_;
  ops.push_back({DisplacementGate{beta}, target});
  return PhysicalCircuit(std::move(ops));
}

PhysicalCircuit PhysicalCircuit::then_beam_split() const {
  auto ops = ops_;
  ops.push_back({BeamSplitGate{}, Mode::A});
  return PhysicalCircuit(std::move(ops));
}

PhysicalCircuit PhysicalCircuit::then(const PhysicalCircuit& next) const {
  auto ops = ops_;
  ops.insert(ops.end(), next.ops_.begin(), next.ops_.end());
  return PhysicalCircuit(std::move(ops));
}

PhysicalCircuit PhysicalCircuit::with_phase_error(double phase_error) const {
  auto ops = ops_;
  for (auto& op : ops) {
    if (auto* kerr = std::get_if<KerrGate>(&op.gate)) kerr->phase_error = phase_error;
  }
  return PhysicalCircuit(std::move(ops));
}

SingleModeState run_circuit(const PhysicalCircuit& c, const SingleModeState& input) {
  if (!c.is_single_mode()) throw std::invalid_argument("run_circuit: circuit is not single-mode");
  SingleModeState s = input;
  for (const auto& op : c.ops()) {
    std::visit(Overloaded{
                   [&](const KerrGate& g) { s = kerr_evolve(s, g.effective_phase()); },
                   [&](const DisplacementGate& g) { s = displace(s, g.beta); },
                   [&](const BeamSplitGate&) {},
               },
               op.gate);
  }
  return s;
}

TwoModeState run_circuit(const PhysicalCircuit& c, const TwoModeState& input) {
  TwoModeState s = input;
  for (const auto& op : c.ops()) {
    std::visit(Overloaded{
                   [&](const KerrGate& g) { s = kerr_evolve(s, op.target, g.effective_phase()); },
                   [&](const DisplacementGate& g) { s = displace(s, op.target, g.beta); },
                   [&](const BeamSplitGate&) { s = beam_split(s); },
               },
               op.gate);
  }
  return s;
}

Eigen::MatrixXcd circuit_matrix(const PhysicalCircuit& c, std::size_t cutoff) {
  if (!c.is_single_mode()) throw std::invalid_argument("circuit_matrix: circuit is not single-mode");
  const auto dim = static_cast<Eigen::Index>(cutoff + 1);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& op : c.ops()) {
    if (const auto* kerr = std::get_if<KerrGate>(&op.gate)) {
      m = kerr_phases(kerr->effective_phase(), cutoff).asDiagonal() * m;
    } else if (const auto* d = std::get_if<DisplacementGate>(&op.gate)) {
      m = displacement_matrix(d->beta, cutoff) * m;
    }
  }
  return m;
}

nlohmann::json to_json(const PhysicalCircuit& c) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : c.ops()) {
    std::visit(Overloaded{
                   [&](const KerrGate& g) {
                     ops.push_back({{"kind", "kerr"}, {"phi", g.phi}, {"err", g.phase_error}, {"mode", mode_name(op.target)}});
                   },
                   [&](const DisplacementGate& g) {
                     ops.push_back({{"kind", "displace"}, {"re", g.beta.real()}, {"im", g.beta.imag()}, {"mode", mode_name(op.target)}});
                   },
                   [&](const BeamSplitGate&) { ops.push_back({{"kind", "beam_split"}}); },
               },
               op.gate);
  }
  return {{"ops", ops}};
}

PhysicalCircuit circuit_from_json(const nlohmann::json& j) {
  std::vector<CircuitOp> ops;
  for (const auto& op : j.at("ops")) {
    const auto kind = op.at("kind").get<std::string>();
    if (kind == "kerr") {
      ops.push_back({KerrGate{op.at("phi").get<double>(), op.value("err", 0.0)}, parse_mode(op)});
    } else if (kind == "displace") {
      ops.push_back({DisplacementGate{Complex(op.value("re", 0.0), op.value("im", 0.0))}, parse_mode(op)});
    } else if (kind == "beam_split") {
      ops.push_back({BeamSplitGate{}, Mode::A});
    } else {
      throw std::invalid_argument("circuit_from_json: unknown op kind '" + kind + "'");
    }
  }
  return PhysicalCircuit(std::move(ops));
}

}  // namespace kerrsim
