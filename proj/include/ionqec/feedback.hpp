#pragma once

// Coherent-feedback circuits that undo a detected spontaneous emission.
//
// Each plan depends only on the code family and on which ion emitted, never on
// the stored amplitudes.

#include <optional>
#include <string>
#include <vector>

#include "ionqec/codes.hpp"
#include "ionqec/gates.hpp"

namespace ionqec {

struct FeedbackPlan {
  CodeScheme scheme;
  int decayed_ion = 1;
  Circuit steps;
};

// pi/2 pulse (phase +pi/2) on the decayed ion, CNOT onto its partner, pi pulse.
FeedbackPlan plan_fourier_pair(const CodeScheme& scheme, int decayed);
// pi pulse on the decayed ion, then C_4 over a, b, c, d controlled back by the decayed ion.
FeedbackPlan plan_fourier_symmetrized(const CodeScheme& scheme, int decayed);
// pi pulse on the decayed ion, then C over every codeword ion. Serves both
// number-state families.
FeedbackPlan plan_number_state(const CodeScheme& scheme, int decayed);
FeedbackPlan plan_for(const CodeScheme& scheme, int decayed);

GateCount gate_count(const FeedbackPlan& plan);
// Rotation and CNOT counts as tabulated for n_logical stored qubits.
GateCount table_one_formula(CodeKind kind, int n_logical);

struct CorrectionOutcome {
  StateVector state;
  bool success = true;
  std::string failure;
};

/// Runs the plan, checks that the ancilla disentangled, resets it to |0> and
/// checks code-space membership. Failures are reported, not thrown; the
/// returned state is whatever the circuit produced.
CorrectionOutcome apply_feedback(StateVector state, const FeedbackPlan& plan);

/// Plans for every codeword ion of a scheme, built once up front.
class FeedbackTable {
 public:
  explicit FeedbackTable(CodeScheme scheme);

  const CodeScheme& scheme() const { return scheme_; }
  // nullptr when the ion has no plan (e.g. the ancilla).
  const FeedbackPlan* find(int ion) const;

 private:
  CodeScheme scheme_;
  std::vector<std::optional<FeedbackPlan>> by_ion_;
};

nlohmann::json plan_to_json(const FeedbackPlan& plan);

}  // namespace ionqec
