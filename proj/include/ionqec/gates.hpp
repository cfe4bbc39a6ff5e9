#pragma once

// Standing-wave pulses, controlled-NOT gates and the ancilla-mediated
// complementing transformation, as composable circuit steps.

#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include "ionqec/state.hpp"

namespace ionqec {

inline constexpr double kPi = std::numbers::pi;

/// A resonant pulse of area `area` (radians) and laser phase `phase` on one ion.
struct PulseSpec {
  double area = 0.0;
  double phase = 0.0;
  int ion = 1;

  friend bool operator==(const PulseSpec&, const PulseSpec&) = default;
};

/// Controlled-NOT in the computational basis: target flips when control is |1>.
struct CnotSpec {
  int control = 1;
  int target = 2;

  friend bool operator==(const CnotSpec&, const CnotSpec&) = default;
};

using CircuitStep = std::variant<PulseSpec, CnotSpec>;
using Circuit = std::vector<CircuitStep>;

struct GateCount {
  int rotations = 0;
  int cnots = 0;

  GateCount& operator+=(const GateCount& other) {
    rotations += other.rotations;
    cnots += other.cnots;
    return *this;
  }
  friend bool operator==(const GateCount&, const GateCount&) = default;
};

// exp[-i k/2 (|1><0| e^{-i phi} + |0><1| e^{i phi})]
Matrix2 pulse_matrix(double area, double phase);

inline PulseSpec half_pi_pulse(int ion) { return {kPi / 2, -kPi / 2, ion}; }
inline PulseSpec pi_pulse(int ion) { return {kPi, -kPi / 2, ion}; }

StateVector apply_pulse(StateVector state, const PulseSpec& pulse);
StateVector apply_cnot(StateVector state, int control, int target);
StateVector apply_step(StateVector state, const CircuitStep& step);

enum class ControlPolarity { kOnOne, kOnZero };

/// Gate sequence realising C_N over `data_ions`: a pi/2 pulse puts the ancilla in
/// (|0>+|1>)/sqrt2, a CNOT from the ancilla onto every data ion complements the
/// |1> branch, and a final CNOT from `disentangle_control` onto the ancilla
/// returns it to |1>. With kOnZero the last CNOT is conjugated by pi pulses on the
/// control so that it fires on |0>.
Circuit complement_circuit(std::span<const int> data_ions, int ancilla_x, int disentangle_control,
                           ControlPolarity polarity = ControlPolarity::kOnOne);

/// Runs complement_circuit and verifies the ancilla ended disentangled in |1>.
/// Throws ValidationError if the ancilla does not start in |0> and FeedbackError
/// if it fails to disentangle.
StateVector complement_register(StateVector state, std::span<const int> data_ions, int ancilla_x,
                                int disentangle_control,
                                ControlPolarity polarity = ControlPolarity::kOnOne);

/// Deterministic return of an ancilla known to be in |1> back to |0>, with no
/// phase on the |1> -> |0> branch.
inline PulseSpec ancilla_reset(int ancilla_x) { return {kPi, kPi / 2, ancilla_x}; }

struct CircuitRun {
  StateVector state;
  GateCount count;
};

CircuitRun run_circuit(StateVector state, std::span<const CircuitStep> steps);
GateCount count_gates(std::span<const CircuitStep> steps);
Circuit inverse_circuit(std::span<const CircuitStep> steps);

// Checks ion ranges and control != target against a register size.
void validate_circuit(std::span<const CircuitStep> steps, int n_ions);

// Probability that `ion` is in |1>, i.e. how close its reduced state is to |1><1|.
inline double ancilla_one_population(const StateVector& s, int ion) { return s.excited_population(ion); }

nlohmann::json circuit_to_json(std::span<const CircuitStep> steps);
Circuit circuit_from_json(const nlohmann::json& j);
nlohmann::json gate_count_to_json(const GateCount& c);

}  // namespace ionqec
