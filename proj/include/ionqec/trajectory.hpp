#pragma once

// Quantum-jump (Monte-Carlo wave-function) simulation of spontaneous emission
// with coherent feedback, plus a dense master-equation integrator used as an
// independent reference.
//
// All times are in the units of 1/gamma supplied by the caller.

#include <string>
#include <vector>

#include "ionqec/codes.hpp"
#include "ionqec/feedback.hpp"
#include "ionqec/random.hpp"
#include "ionqec/state.hpp"

namespace ionqec {

struct DecayModel {
  double gamma = 1.0;
  // Optional per-ion rates gamma_j, indexed by ion - 1; empty means uniform gamma.
  std::vector<double> per_ion_gamma;

  double rate(int ion) const;
  void validate(int n_ions) const;
};

struct DetectionModel {
  double efficiency = 1.0;
  double feedback_latency = 0.0;

  void validate() const;
};

struct JumpRecord {
  int ion = 0;
  double time = 0.0;

  friend bool operator==(const JumpRecord&, const JumpRecord&) = default;
};

struct FeedbackEvent {
  double time = 0.0;
  int ion = 0;
  bool success = true;
  double fidelity_after = 0.0;
  std::string failure;
};

struct TimelinePoint {
  double time = 0.0;
  double fidelity = 0.0;
};

struct TrajectoryOptions {
  int grid = 200;
  // Extra instants at which the (normalized) state is recorded.
  std::vector<double> snapshot_times;
};

struct TrajectoryResult {
  std::vector<JumpRecord> jumps;
  std::vector<JumpRecord> missed_jumps;
  std::vector<FeedbackEvent> feedback_events;
  int correction_failures = 0;
  std::vector<TimelinePoint> fidelity_timeline;
  std::vector<StateVector> snapshots;
  StateVector final_state{1};
};

struct ConditionalResult {
  StateVector state;  // not renormalized
  double survival;    // squared norm = probability of no jump during dt
};

/// No-jump evolution U_c(dt) = exp(-dt/2 sum_j gamma_j |1><1|_j).
ConditionalResult conditional_evolve(StateVector state, double dt, const DecayModel& model);

/// Probability of no jump within dt, without building the evolved state.
double survival_probability(const StateVector& state, double dt, const DecayModel& model);

struct JumpSample {
  bool jumped = false;
  double wait_time = 0.0;  // t_max when no jump
  int ion = 0;
};

/// Draws the next jump. The wait time solves survival(t) = r for uniform r by
/// bisection; the emitting ion is drawn with weight gamma_j <1_j| U_c psi>^2.
JumpSample sample_jump(const StateVector& state, const DecayModel& model, double t_max, Rng& rng);

/// Applies |0><1| to the ion and renormalizes.
StateVector apply_jump(const StateVector& state, int ion);

/// One trajectory from `initial` (taken as the reference codeword for fidelity).
/// `policy` may be null, in which case no feedback is ever applied.
TrajectoryResult run_trajectory(const StateVector& initial, const DecayModel& decay,
                                const DetectionModel& detection, double t_max,
                                const FeedbackTable* policy, Rng& rng,
                                const TrajectoryOptions& options = {});

inline constexpr int kMaxOracleIons = 6;

/// Lindblad evolution with jump operators sqrt(gamma_j) |0><1|_j by adaptive RK4
/// with step doubling.
DensityMatrix master_equation_evolve(const DensityMatrix& rho0, const DecayModel& decay, double t);

}  // namespace ionqec
