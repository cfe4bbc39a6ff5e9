#include <gtest/gtest.h>

#include "ionqec/errors.hpp"
#include "ionqec/feedback.hpp"
#include "ionqec/trajectory.hpp"
#include "test_support.hpp"

using namespace ionqec;
using namespace ionqec::testing;

namespace {

const CodeKind kAllKinds[] = {CodeKind::kFourierPair, CodeKind::kFourierSymmetrized,
                              CodeKind::kNumberState, CodeKind::kNumberStateSymmetrized};

StateVector jump(const StateVector& s, int ion) {
  return apply_nonunitary_single_ion(s, ion, lowering_operator()).state.normalized();
}

}  // namespace

TEST(FourierPairPlan, RestoresCodewordAfterJumpOnA) {
  Rng rng(41);
  const CodeScheme scheme = CodeScheme::fourier_pair();
  for (int trial = 0; trial < 100; ++trial) {
    const LogicalState l = LogicalState::random(1, rng);
    const Complex c0 = l[0], c1 = l[1];
    const StateVector jumped =
        sum(scaled(tensor(tilde(0), StateVector(1)), c0), scaled(tensor(tilde(1), StateVector(1)), -c1));
    const StateVector code =
        sum(scaled(tensor(tilde(0), tilde(0)), c0), scaled(tensor(tilde(1), tilde(1)), c1));
    const CorrectionOutcome out = apply_feedback(jumped, plan_fourier_pair(scheme, 1));
    ASSERT_TRUE(out.success) << out.failure;
    ASSERT_NEAR(fidelity(out.state, code), 1.0, 1e-10);
  }
}

TEST(FourierPairPlan, IntermediateStateAfterCnot) {
  const Complex c0{0.6}, c1{0.0, 0.8};
  const StateVector jumped =
      sum(scaled(tensor(tilde(0), StateVector(1)), c0), scaled(tensor(tilde(1), StateVector(1)), -c1));
  const FeedbackPlan plan = plan_fourier_pair(CodeScheme::fourier_pair(), 1);
  ASSERT_EQ(plan.steps.size(), 3u);
  const Circuit first_two(plan.steps.begin(), plan.steps.begin() + 2);
  const StateVector mid = run_circuit(jumped, first_two).state;
  // c0 |~1>_a|~0>_b - c1 |~0>_a|~1>_b, ion a on the low bit.
  const StateVector expect =
      sum(scaled(tensor(tilde(0), tilde(1)), c0), scaled(tensor(tilde(1), tilde(0)), -c1));
  EXPECT_LE(max_abs_diff(mid, expect), 1e-12);
  EXPECT_EQ(gate_count(plan), (GateCount{2, 1}));
}

TEST(FourierPairPlan, SingleBranchAndIonB) {
  const CodeScheme scheme = CodeScheme::fourier_pair();
  const StateVector code = encode(scheme, LogicalState({1.0, 0.0}));
  for (int ion : {1, 2}) {
    const CorrectionOutcome out = apply_feedback(jump(code, ion), plan_fourier_pair(scheme, ion));
    EXPECT_NEAR(fidelity(out.state, code), 1.0, 1e-12);
  }
}

TEST(NumberStatePlan, WorkedThreeIonExample) {
  Rng rng(42);
  const CodeScheme scheme = CodeScheme::number_state(2);
  for (int trial = 0; trial < 100; ++trial) {
    const LogicalState l = LogicalState::random(2, rng);
    const StateVector code = encode(scheme, l);
    const StateVector jumped = jump(code, 2);
    ASSERT_LE(max_abs_diff(jumped, ket(4, {{0, l[2]}, {1, l[3]}, {4, l[1]}, {5, l[0]}})), 1e-12);

    const FeedbackPlan plan = plan_number_state(scheme, 2);
    const StateVector flipped = apply_step(jumped, plan.steps.front());
    ASSERT_LE(max_abs_diff(flipped, ket(4, {{2, l[2]}, {3, l[3]}, {6, l[1]}, {7, l[0]}})), 1e-12);

    const CorrectionOutcome out = apply_feedback(jumped, plan);
    ASSERT_TRUE(out.success) << out.failure;
    ASSERT_NEAR(fidelity(out.state, code), 1.0, 1e-10);
  }
}

TEST(Plans, EveryKindEveryIonRecovers) {
  Rng rng(43);
  for (CodeKind kind : kAllKinds) {
    for (int m : {1, 2, 3}) {
      if ((kind == CodeKind::kFourierPair || kind == CodeKind::kFourierSymmetrized) && m > 1) continue;
      const CodeScheme scheme = CodeScheme::standard(kind, m);
      const FeedbackTable table(scheme);
      for (int ion : scheme.codeword_ions()) {
        const FeedbackPlan* plan = table.find(ion);
        ASSERT_NE(plan, nullptr);
        for (int trial = 0; trial < 100; ++trial) {
          const StateVector code = encode(scheme, LogicalState::random(m, rng));
          const CorrectionOutcome out = apply_feedback(jump(code, ion), *plan);
          ASSERT_TRUE(out.success) << to_string(kind) << " ion " << ion << ": " << out.failure;
          ASSERT_NEAR(fidelity(out.state, code), 1.0, 1e-10) << to_string(kind) << " ion " << ion;
        }
      }
    }
  }
}

TEST(Plans, RepeatedJumpsDoNotAccumulateError) {
  Rng rng(44);
  for (CodeKind kind : kAllKinds) {
    const CodeScheme scheme = CodeScheme::standard(kind, kind == CodeKind::kNumberState ? 2 : 1);
    const FeedbackTable table(scheme);
    const StateVector code = encode(scheme, LogicalState::random(scheme.n_logical(), rng));
    const std::vector<int> ions = scheme.codeword_ions();
    StateVector s = code;
    for (int i = 0; i < 20; ++i) {
      const int ion = ions[rng() % ions.size()];
      const CorrectionOutcome out = apply_feedback(jump(s, ion), *table.find(ion));
      ASSERT_TRUE(out.success);
      s = out.state;
    }
    EXPECT_NEAR(fidelity(s, code), 1.0, 1e-9) << to_string(kind);
  }
}

TEST(Plans, WrongIonPlanDoesNotRestore) {
  Rng rng(45);
  for (CodeKind kind : kAllKinds) {
    const CodeScheme scheme = CodeScheme::standard(kind, kind == CodeKind::kNumberState ? 2 : 1);
    const FeedbackTable table(scheme);
    const StateVector code = encode(scheme, LogicalState::random(scheme.n_logical(), rng));
    for (int i : scheme.codeword_ions()) {
      for (int j : scheme.codeword_ions()) {
        if (i == j) continue;
        const CorrectionOutcome out = apply_feedback(jump(code, j), *table.find(i));
        EXPECT_LT(fidelity(out.state, code), 1.0 - 1e-3) << to_string(kind) << " plan " << i << " jump " << j;
      }
    }
  }
}

TEST(Plans, MismatchIsReportedNotThrown) {
  const CodeScheme scheme = CodeScheme::number_state(2);
  const StateVector code = encode(scheme, LogicalState({0.5, 0.5, 0.5, 0.5}));
  const CorrectionOutcome out = apply_feedback(jump(code, 1), plan_number_state(scheme, 3));
  EXPECT_FALSE(out.success);
  EXPECT_FALSE(out.failure.empty());
}

TEST(Plans, AmplitudeIndependent) {
  const CodeScheme scheme = CodeScheme::fourier_symmetrized();
  const FeedbackPlan a = plan_for(scheme, 3);
  const FeedbackPlan b = plan_for(scheme, 3);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(FeedbackTable(scheme).find(5), nullptr);
  EXPECT_THROW(plan_for(scheme, 5), ValidationError);
}

TEST(GateCounts, FourierSymmetrizedMatchesTable) {
  const CodeScheme scheme = CodeScheme::fourier_symmetrized();
  for (int ion : scheme.codeword_ions()) {
    EXPECT_EQ(gate_count(plan_for(scheme, ion)), (GateCount{2, 5}));
  }
  EXPECT_EQ(table_one_formula(CodeKind::kFourierSymmetrized, 1), (GateCount{2, 5}));
}

TEST(GateCounts, NumberStateLadderAgainstPrintedFormula) {
  EXPECT_EQ(table_one_formula(CodeKind::kNumberStateSymmetrized, 5), (GateCount{2, 11}));
  for (int m = 1; m <= 5; ++m) {
    const CodeScheme scheme = CodeScheme::number_state_symmetrized(m);
    const int codeword_ions = static_cast<int>(scheme.codeword_ions().size());
    EXPECT_EQ(codeword_ions, 2 * (m + 1));
    const GateCount built = gate_count(plan_for(scheme, 1));
    EXPECT_EQ(built, (GateCount{2, codeword_ions + 1}));
    EXPECT_NE(built, table_one_formula(scheme.kind, m));
  }
}

TEST(PlanJson, Fields) {
  const nlohmann::json j = plan_to_json(plan_for(CodeScheme::fourier_symmetrized(), 1));
  EXPECT_EQ(j.at("decayed_ion"), 1);
  EXPECT_EQ(j.at("steps").size(), 7u);
  EXPECT_EQ(j.at("gate_count").at("cnots"), 5);
  EXPECT_EQ(j.at("scheme").at("kind"), "FourierSymmetrized");
}
