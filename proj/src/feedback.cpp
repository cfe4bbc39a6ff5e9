#include "ionqec/feedback.hpp"

#include <algorithm>

#include "ionqec/errors.hpp"

namespace ionqec {

namespace {

void require_member(const std::vector<int>& ions, int decayed, const CodeScheme& scheme) {
  if (std::find(ions.begin(), ions.end(), decayed) == ions.end()) {
    throw ValidationError("ion " + std::to_string(decayed) + " is not a codeword ion of the " +
                          to_string(scheme.kind) + " scheme");
  }
}

FeedbackPlan complementing_plan(const CodeScheme& scheme, int decayed) {
  const std::vector<int> ions = scheme.codeword_ions();
  require_member(ions, decayed, scheme);
  if (!scheme.ancilla) throw ValidationError("complementing feedback needs an ancilla");
  FeedbackPlan plan{scheme, decayed, {pi_pulse(decayed)}};
  const Circuit c = complement_circuit(ions, *scheme.ancilla, decayed);
  plan.steps.insert(plan.steps.end(), c.begin(), c.end());
  return plan;
}

}  // namespace

FeedbackPlan plan_fourier_pair(const CodeScheme& scheme, int decayed) {
  if (scheme.kind != CodeKind::kFourierPair) throw ValidationError("not a FourierPair scheme");
  require_member(scheme.data_ions, decayed, scheme);
  const int other = decayed == scheme.data_ions[0] ? scheme.data_ions[1] : scheme.data_ions[0];
  return {scheme,
          decayed,
          {PulseSpec{kPi / 2, kPi / 2, decayed}, CnotSpec{decayed, other}, pi_pulse(decayed)}};
}

FeedbackPlan plan_fourier_symmetrized(const CodeScheme& scheme, int decayed) {
  if (scheme.kind != CodeKind::kFourierSymmetrized) {
    throw ValidationError("not a FourierSymmetrized scheme");
  }
  return complementing_plan(scheme, decayed);
}

FeedbackPlan plan_number_state(const CodeScheme& scheme, int decayed) {
  if (scheme.kind != CodeKind::kNumberState && scheme.kind != CodeKind::kNumberStateSymmetrized) {
    throw ValidationError("not a number-state scheme");
  }
  return complementing_plan(scheme, decayed);
}

FeedbackPlan plan_for(const CodeScheme& scheme, int decayed) {
  switch (scheme.kind) {
    case CodeKind::kFourierPair: return plan_fourier_pair(scheme, decayed);
    case CodeKind::kFourierSymmetrized: return plan_fourier_symmetrized(scheme, decayed);
    case CodeKind::kNumberState:
    case CodeKind::kNumberStateSymmetrized: return plan_number_state(scheme, decayed);
  }
  throw ValidationError("unknown code kind");
}

GateCount gate_count(const FeedbackPlan& plan) { return count_gates(plan.steps); }

GateCount table_one_formula(CodeKind kind, int n_logical) {
  switch (kind) {
    case CodeKind::kFourierPair:
    case CodeKind::kFourierSymmetrized: return {2, 5};
    case CodeKind::kNumberState:
    case CodeKind::kNumberStateSymmetrized: return {2, 2 * n_logical + 1};
  }
  throw ValidationError("unknown code kind");
}

CorrectionOutcome apply_feedback(StateVector state, const FeedbackPlan& plan) {
  CorrectionOutcome out{run_circuit(std::move(state), plan.steps).state, true, {}};
  if (plan.scheme.kind != CodeKind::kFourierPair) {
    const int x = *plan.scheme.ancilla;
    const double p1 = ancilla_one_population(out.state, x);
    if (p1 < 1.0 - kCodeSpaceTolerance) {
      out.success = false;
      out.failure = "ancilla not disentangled (P(|1>) = " + std::to_string(p1) + ")";
    }
    out.state = apply_pulse(std::move(out.state), ancilla_reset(x));
  }
  if (out.success) {
    const double deficit = projection_deficit(out.state, plan.scheme);
    if (deficit >= kCodeSpaceTolerance) {
      out.success = false;
      out.failure = "corrected state outside code space (deficit " + std::to_string(deficit) + ")";
    }
  }
  return out;
}

FeedbackTable::FeedbackTable(CodeScheme scheme) : scheme_(std::move(scheme)) {
  scheme_.validate(scheme_.register_size());
  by_ion_.resize(scheme_.register_size() + 1);
  for (int ion : scheme_.codeword_ions()) by_ion_[ion] = plan_for(scheme_, ion);
}

const FeedbackPlan* FeedbackTable::find(int ion) const {
  if (ion < 0 || ion >= static_cast<int>(by_ion_.size()) || !by_ion_[ion]) return nullptr;
  return &*by_ion_[ion];
}

nlohmann::json plan_to_json(const FeedbackPlan& plan) {
  return {{"scheme", scheme_to_json(plan.scheme)},
          {"decayed_ion", plan.decayed_ion},
          {"steps", circuit_to_json(plan.steps)},
          {"gate_count", gate_count_to_json(gate_count(plan))}};
}

}  // namespace ionqec
