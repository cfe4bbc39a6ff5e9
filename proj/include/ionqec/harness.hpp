#pragma once

// Experiment driver: ensembles of trajectories, storage experiments comparing
// corrected and uncorrected registers, wall-clock cost of feedback, and the
// property suites behind `ionqec verify`.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ionqec/codes.hpp"
#include "ionqec/feedback.hpp"
#include "ionqec/trajectory.hpp"

namespace ionqec {

/// Gate durations in seconds. Only used for cost reporting, never in dynamics.
struct TimingModel {
  double tau_cnot = 100e-6;
  double tau_pi = 20e-6;
  double tau_half_pi = 10e-6;
  double tau_q = 60.0;

  void validate() const;
};

double decoherence_time(int n_qubits, double tau_q);
double pulse_duration(const PulseSpec& pulse, const TimingModel& timing);
double feedback_wall_time(const FeedbackPlan& plan, const TimingModel& timing);

struct CostReport {
  CodeKind kind;
  int n_logical;
  int register_size;
  int codeword_ions;
  GateCount constructed;
  GateCount tabulated;
  double feedback_wall_time_s;
  double register_decoherence_time_s;
  // Published order-of-magnitude estimate, when one exists for this
  // configuration. It does not follow from the gate durations above.
  std::optional<double> quoted_feedback_time_s;
};

CostReport cost_report(CodeKind kind, int n_logical, const TimingModel& timing = {});
nlohmann::json cost_report_to_json(const CostReport& report);

struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> mean_fidelity;
  std::vector<double> stderr_fidelity;
  std::vector<double> jump_rate;
  std::int64_t trajectories = 0;
  std::int64_t total_jumps = 0;
  std::int64_t missed_jumps = 0;
  std::int64_t correction_failures = 0;
};

struct EnsembleSpec {
  StateVector initial{1};
  DecayModel decay;
  DetectionModel detection;
  double t_max = 1.0;
  int grid = 200;
  std::int64_t trajectories = 1;
  std::uint64_t seed = 0;
  // 0 picks std::thread::hardware_concurrency().
  int threads = 0;
};

/// Trajectory i uses make_stream(seed, i); aggregation order is fixed, so the
/// result does not depend on the thread count.
EnsembleStats run_ensemble(const EnsembleSpec& spec, const FeedbackTable* policy);

// First grid time whose mean fidelity is below `threshold`, if any.
std::optional<double> time_to_threshold(const EnsembleStats& stats, double threshold);

std::string timeline_csv(const EnsembleStats& stats);

/// Trajectory-averaged density matrices (no feedback) at the given times, with
/// the standard error of every entry's real and imaginary part.
struct DensityEstimate {
  std::vector<double> times;
  std::vector<Eigen::MatrixXcd> mean;
  std::vector<Eigen::MatrixXd> stderr_re;
  std::vector<Eigen::MatrixXd> stderr_im;
  std::int64_t trajectories = 0;
};

DensityEstimate estimate_density(const StateVector& initial, const DecayModel& decay,
                                 std::span<const double> times, std::int64_t trajectories,
                                 std::uint64_t seed);

struct OracleComparison {
  bool within = true;
  // Largest |estimate - reference| / stderr over all entries and times.
  double worst_sigma = 0.0;
  // Largest absolute entrywise deviation.
  double max_abs_error = 0.0;
};

/// Entrywise check |estimate - reference| <= n_sigma * stderr (+1e-9 for
/// entries with no spread) of real and imaginary parts.
OracleComparison compare_to_reference(const DensityEstimate& estimate,
                                      std::span<const DensityMatrix> reference, double n_sigma);

struct ExperimentConfig {
  CodeScheme scheme = CodeScheme::fourier_symmetrized();
  std::optional<LogicalState> logical;
  DecayModel decay;
  DetectionModel detection;
  double t_max = 10.0;
  int grid = 200;
  std::int64_t trajectories = 1000;
  std::uint64_t seed = 1;
  double threshold = 0.9;
  int threads = 0;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

struct StorageSummary {
  LogicalState logical{std::vector<Complex>{1.0, 0.0}};
  EnsembleStats corrected;
  EnsembleStats uncorrected;
  std::optional<double> corrected_time_to_threshold;
  std::optional<double> uncorrected_time_to_threshold;
  nlohmann::json summary;
};

/// Runs matched corrected and uncorrected ensembles (same seeds) and, when
/// `out_dir` is given, writes config.json, timeline_corrected.csv,
/// timeline_uncorrected.csv and summary.json there.
StorageSummary storage_experiment(const ExperimentConfig& config,
                                  const std::optional<std::filesystem::path>& out_dir);

enum class CheckStatus { kPass, kWarn, kFail };

struct CheckResult {
  std::string suite;
  std::string name;
  CheckStatus status = CheckStatus::kPass;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

std::vector<std::string> verify_suites();
/// suite is one of verify_suites() or "all".
VerifyReport verify(const std::string& suite, std::uint64_t seed = 2024);
void print_report(const VerifyReport& report, std::ostream& out);

}  // namespace ionqec
