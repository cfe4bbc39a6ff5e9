#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ionqec/errors.hpp"
#include "ionqec/harness.hpp"
#include "test_support.hpp"

using namespace ionqec;
using namespace ionqec::testing;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ionqec_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Timing, DecoherenceTime) {
  EXPECT_DOUBLE_EQ(decoherence_time(1, 60.0), 60.0);
  EXPECT_DOUBLE_EQ(decoherence_time(2, 60.0), 30.0);
  const double thirteen = decoherence_time(13, 60.0);
  EXPECT_GE(thirteen, 4.5);
  EXPECT_LE(thirteen, 5.0);
  EXPECT_THROW(decoherence_time(0, 60.0), ValidationError);
}

TEST(Timing, FeedbackWallTimes) {
  const TimingModel timing;
  const FeedbackPlan fourier = plan_for(CodeScheme::fourier_symmetrized(), 2);
  EXPECT_NEAR(feedback_wall_time(fourier, timing), 530e-6, 1e-15);

  const FeedbackPlan ladder = plan_for(CodeScheme::number_state_symmetrized(5), 7);
  EXPECT_NEAR(feedback_wall_time(ladder, timing), 1.33e-3, 1e-15);

  FeedbackPlan empty = fourier;
  empty.steps.clear();
  EXPECT_EQ(feedback_wall_time(empty, timing), 0.0);
}

TEST(Timing, WallTimeLinearInDataIons) {
  const TimingModel timing;
  double previous = 0.0;
  for (int data = 3; data <= 12; ++data) {
    const CodeScheme scheme = CodeScheme::number_state(data - 1);
    ASSERT_EQ(static_cast<int>(scheme.codeword_ions().size()), data);
    const double wall = feedback_wall_time(plan_for(scheme, 1), timing);
    EXPECT_NEAR(wall, (data + 1) * timing.tau_cnot + timing.tau_pi + timing.tau_half_pi, 1e-15);
    if (data > 3) EXPECT_NEAR(wall - previous, timing.tau_cnot, 1e-15);
    previous = wall;
  }
}

TEST(Timing, CostReportFlagsQuotedFigures) {
  const CostReport r = cost_report(CodeKind::kNumberStateSymmetrized, 5);
  EXPECT_EQ(r.register_size, 13);
  EXPECT_EQ(r.constructed, (GateCount{2, 13}));
  EXPECT_EQ(r.tabulated, (GateCount{2, 11}));
  ASSERT_TRUE(r.quoted_feedback_time_s.has_value());
  EXPECT_DOUBLE_EQ(*r.quoted_feedback_time_s, 1.1);
  const nlohmann::json j = cost_report_to_json(r);
  EXPECT_FALSE(j.dump().empty());
  EXPECT_THROW(TimingModel({-1.0, 1.0, 1.0, 1.0}).validate(), ValidationError);
}

TEST(Ensemble, IndependentOfThreadCount) {
  const CodeScheme scheme = CodeScheme::fourier_symmetrized();
  const FeedbackTable table(scheme);
  EnsembleSpec spec;
  spec.initial = encode(scheme, LogicalState({0.6, Complex(0.0, 0.8)}));
  spec.detection = {0.5, 0.0};
  spec.t_max = 3.0;
  spec.grid = 31;
  spec.trajectories = 300;
  spec.seed = 71;
  spec.threads = 1;
  const EnsembleStats one = run_ensemble(spec, &table);
  spec.threads = 4;
  const EnsembleStats four = run_ensemble(spec, &table);
  EXPECT_EQ(timeline_csv(one), timeline_csv(four));
  EXPECT_EQ(one.total_jumps, four.total_jumps);
}

TEST(Ensemble, CsvHeaderAndRows) {
  EnsembleSpec spec;
  spec.initial = basis_state(1, 1);
  spec.grid = 5;
  spec.trajectories = 10;
  const std::string csv = timeline_csv(run_ensemble(spec, nullptr));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "time,mean_fidelity,stderr_fidelity,jump_rate");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

TEST(Ensemble, JumpRateOfSingleEmitter) {
  // Jumps per unit time at t from |1> is exp(-t).
  EnsembleSpec spec;
  spec.initial = basis_state(1, 1);
  spec.detection = {0.0, 0.0};
  spec.t_max = 2.0;
  spec.grid = 5;
  spec.trajectories = 20000;
  spec.seed = 72;
  const EnsembleStats s = run_ensemble(spec, nullptr);
  const double dt = 0.5;
  for (int g = 1; g < 5; ++g) {
    const double p = std::exp(-(g - 1) * dt) - std::exp(-g * dt);
    const double sigma = std::sqrt(p * (1 - p) / spec.trajectories) / dt;
    EXPECT_NEAR(s.jump_rate[g], p / dt, 3 * sigma) << g;
  }
}

TEST(Ensemble, DensityEstimateConvergesToOracle) {
  Rng rng(73);
  const StateVector psi = random_state(2, rng);
  const double times[] = {0.5, 1.0, 2.0};
  std::vector<DensityMatrix> reference;
  for (double t : times) reference.push_back(master_equation_evolve(pure_to_density(psi), DecayModel{}, t));

  const DensityEstimate coarse = estimate_density(psi, DecayModel{}, times, 1000, 74);
  const DensityEstimate fine = estimate_density(psi, DecayModel{}, times, 10000, 74);
  const OracleComparison c = compare_to_reference(coarse, reference, 3.0);
  const OracleComparison f = compare_to_reference(fine, reference, 3.0);
  EXPECT_TRUE(c.within) << c.worst_sigma;
  EXPECT_TRUE(f.within) << f.worst_sigma;
  EXPECT_LT(f.max_abs_error, c.max_abs_error);
}

TEST(Storage, EfficiencyHalfLiesBetweenExtremes) {
  const CodeScheme scheme = CodeScheme::fourier_symmetrized();
  const FeedbackTable table(scheme);
  EnsembleSpec spec;
  spec.initial = encode(scheme, LogicalState({kInvSqrt2, Complex(0.0, kInvSqrt2)}));
  spec.t_max = 2.0;
  spec.grid = 3;  // grid point 1 sits at t = 1
  spec.trajectories = 2000;
  spec.seed = 75;
  auto at_one = [&](double efficiency) {
    spec.detection = {efficiency, 0.0};
    const EnsembleStats s = run_ensemble(spec, &table);
    return std::pair{s.mean_fidelity[1], s.stderr_fidelity[1]};
  };
  const auto [f0, s0] = at_one(0.0);
  const auto [fh, sh] = at_one(0.5);
  const auto [f1, s1] = at_one(1.0);
  EXPECT_NEAR(f1, 1.0, 1e-10);
  EXPECT_LT(fh, f1 - 3 * std::hypot(sh, s1));
  EXPECT_GT(fh, f0 + 3 * std::hypot(sh, s0));
}

TEST(Storage, ExperimentWritesMatchedOutputs) {
  ExperimentConfig config;
  config.t_max = 4.0;
  config.grid = 41;
  config.trajectories = 200;
  config.seed = 76;
  const auto dir = scratch_dir("storage");
  const StorageSummary s = storage_experiment(config, dir);
  for (const char* f : {"config.json", "timeline_corrected.csv", "timeline_uncorrected.csv", "summary.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  EXPECT_FALSE(s.corrected_time_to_threshold.has_value());
  ASSERT_TRUE(s.uncorrected_time_to_threshold.has_value());
  EXPECT_LT(*s.uncorrected_time_to_threshold, 1.0);
  const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  for (const char* key : {"trajectories", "total_jumps", "missed_jumps", "correction_failures"}) {
    EXPECT_TRUE(summary.contains(key)) << key;
  }
  EXPECT_EQ(summary.at("trajectories"), 200);
  EXPECT_EQ(summary.at("correction_failures"), 0);
  std::filesystem::remove_all(dir);
}

TEST(Storage, RepeatRunsAreByteIdentical) {
  ExperimentConfig config;
  config.scheme = CodeScheme::number_state_symmetrized(1);
  config.detection = {0.8, 0.02};
  config.t_max = 3.0;
  config.grid = 31;
  config.trajectories = 1;
  config.seed = 77;
  const auto a = scratch_dir("repeat_a"), b = scratch_dir("repeat_b");
  storage_experiment(config, a);
  config.threads = 3;
  storage_experiment(config, b);
  for (const char* f : {"config.json", "timeline_corrected.csv", "timeline_uncorrected.csv", "summary.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Config, ParsesAndRejects) {
  const ExperimentConfig c = experiment_config_from_json(nlohmann::json::parse(
      R"({"scheme": "NumberStateSymmetrized", "n_logical": 2, "gamma": 0.5, "t_max": 3,
          "trajectories": 10, "seed": 9, "efficiency": 0.9, "latency": 0.1, "grid": 11})"));
  EXPECT_EQ(c.scheme.register_size(), 7);
  EXPECT_DOUBLE_EQ(c.decay.gamma, 0.5);
  EXPECT_DOUBLE_EQ(c.detection.feedback_latency, 0.1);
  const ExperimentConfig back = experiment_config_from_json(experiment_config_to_json(c));
  EXPECT_EQ(experiment_config_to_json(back), experiment_config_to_json(c));

  EXPECT_THROW(experiment_config_from_json(nlohmann::json{{"trajectories", 0}}), ValidationError);
  EXPECT_THROW(experiment_config_from_json(nlohmann::json{{"efficiency", 2.0}}), ValidationError);
  EXPECT_THROW(experiment_config_from_json(nlohmann::json{{"scheme", "Shor"}}), ValidationError);
  EXPECT_THROW(experiment_config_from_json(nlohmann::json{{"t_max", "long"}}), ValidationError);
  EXPECT_ANY_THROW(experiment_config_from_json(
      nlohmann::json{{"scheme", "NumberStateSymmetrized"}, {"n_logical", 6}}));
}

TEST(Verify, AllSuitesPass) {
  const VerifyReport r = verify("all");
  EXPECT_TRUE(r.passed());
  int warnings = 0;
  for (const auto& c : r.checks) {
    EXPECT_NE(c.status, CheckStatus::kFail) << c.suite << "/" << c.name << ": " << c.detail;
    if (c.status == CheckStatus::kWarn) ++warnings;
  }
  EXPECT_GT(warnings, 0);
  EXPECT_EQ(verify_suites().size(), 6u);
  EXPECT_THROW(verify("nonsense"), ValidationError);
}
