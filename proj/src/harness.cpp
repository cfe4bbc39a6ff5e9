#include "ionqec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "ionqec/errors.hpp"

namespace ionqec {

namespace {

constexpr std::int64_t kBlock = 64;

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

// Runs fn(block_index) for every block on a small pool of threads.
template <typename Fn>
void for_each_block(std::int64_t n_blocks, int threads, Fn&& fn) {
  const int n_threads = static_cast<int>(std::min<std::int64_t>(
      n_blocks, threads > 0 ? threads : std::max(1U, std::thread::hardware_concurrency())));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::int64_t b = next++; b < n_blocks; b = next++) {
      try {
        fn(b);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

nlohmann::json logical_to_json(const LogicalState& l) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : l.amplitudes()) arr.push_back({c.real(), c.imag()});
  return arr;
}

nlohmann::json ensemble_summary(const EnsembleStats& stats, double threshold) {
  const auto crossed = time_to_threshold(stats, threshold);
  double lowest = 1.0;
  for (double f : stats.mean_fidelity) lowest = std::min(lowest, f);
  return {{"trajectories", stats.trajectories},
          {"total_jumps", stats.total_jumps},
          {"missed_jumps", stats.missed_jumps},
          {"correction_failures", stats.correction_failures},
          {"final_mean_fidelity", stats.mean_fidelity.back()},
          {"min_mean_fidelity", lowest},
          {"time_to_threshold", crossed ? nlohmann::json(*crossed) : nlohmann::json(nullptr)}};
}

}  // namespace

void TimingModel::validate() const {
  if (!(tau_cnot > 0 && tau_pi > 0 && tau_half_pi > 0 && tau_q > 0)) {
    throw ValidationError("timing model durations must be positive");
  }
}

double decoherence_time(int n_qubits, double tau_q) {
  if (n_qubits < 1) throw ValidationError("decoherence time needs at least one qubit");
  return tau_q / n_qubits;
}

double pulse_duration(const PulseSpec& pulse, const TimingModel& timing) {
  const double area = std::abs(pulse.area);
  if (area == 0.0) return 0.0;
  if (near(area, kPi / 2)) return timing.tau_half_pi;
  if (near(area, kPi)) return timing.tau_pi;
  // Duration scales with area at fixed Rabi frequency.
  return timing.tau_pi * area / kPi;
}

double feedback_wall_time(const FeedbackPlan& plan, const TimingModel& timing) {
  timing.validate();
  double total = 0.0;
  for (const auto& step : plan.steps) {
    if (const auto* p = std::get_if<PulseSpec>(&step)) {
      total += pulse_duration(*p, timing);
    } else {
      total += timing.tau_cnot;
    }
  }
  return total;
}

CostReport cost_report(CodeKind kind, int n_logical, const TimingModel& timing) {
  const CodeScheme scheme = CodeScheme::standard(kind, n_logical);
  const FeedbackPlan plan = plan_for(scheme, scheme.data_ions.front());
  CostReport r{kind,
               scheme.n_logical(),
               scheme.register_size(),
               static_cast<int>(scheme.codeword_ions().size()),
               gate_count(plan),
               table_one_formula(kind, scheme.n_logical()),
               feedback_wall_time(plan, timing),
               decoherence_time(scheme.register_size(), timing.tau_q),
               std::nullopt};
  if (kind == CodeKind::kFourierSymmetrized) r.quoted_feedback_time_s = 0.5;
  if (kind == CodeKind::kNumberStateSymmetrized && scheme.n_logical() == 5) {
    r.quoted_feedback_time_s = 1.1;
  }
  return r;
}

nlohmann::json cost_report_to_json(const CostReport& r) {
  nlohmann::json j = {{"kind", to_string(r.kind)},
                      {"n_logical", r.n_logical},
                      {"register_size", r.register_size},
                      {"codeword_ions", r.codeword_ions},
                      {"constructed", gate_count_to_json(r.constructed)},
                      {"tabulated", gate_count_to_json(r.tabulated)},
                      {"counts_agree", r.constructed == r.tabulated},
                      {"feedback_wall_time_s", r.feedback_wall_time_s},
                      {"register_decoherence_time_s", r.register_decoherence_time_s}};
  if (r.quoted_feedback_time_s) {
    j["quoted_feedback_time_s"] = {{"value", *r.quoted_feedback_time_s},
                                   {"reproducible_from_gate_durations", false}};
  }
  return j;
}

EnsembleStats run_ensemble(const EnsembleSpec& spec, const FeedbackTable* policy) {
  if (spec.trajectories < 1) throw ValidationError("ensemble needs at least one trajectory");
  if (spec.grid < 2) throw ValidationError("fidelity grid needs at least two points");

  struct BlockSums {
    std::vector<double> sum_f, sum_f2, jumps_in_bin;
    std::int64_t jumps = 0, missed = 0, failures = 0;
  };
  const std::int64_t n_blocks = (spec.trajectories + kBlock - 1) / kBlock;
  std::vector<BlockSums> blocks(n_blocks);
  const double dt_grid = spec.t_max / (spec.grid - 1);
  TrajectoryOptions options;
  options.grid = spec.grid;

  for_each_block(n_blocks, spec.threads, [&](std::int64_t b) {
    BlockSums& sums = blocks[b];
    sums.sum_f.assign(spec.grid, 0.0);
    sums.sum_f2.assign(spec.grid, 0.0);
    sums.jumps_in_bin.assign(spec.grid, 0.0);
    const std::int64_t end = std::min(spec.trajectories, (b + 1) * kBlock);
    for (std::int64_t i = b * kBlock; i < end; ++i) {
      Rng rng = make_stream(spec.seed, static_cast<std::uint64_t>(i));
      const TrajectoryResult r =
          run_trajectory(spec.initial, spec.decay, spec.detection, spec.t_max, policy, rng, options);
      for (int g = 0; g < spec.grid; ++g) {
        const double f = r.fidelity_timeline[g].fidelity;
        sums.sum_f[g] += f;
        sums.sum_f2[g] += f * f;
      }
      for (const auto& jump : r.jumps) {
        const int bin = std::clamp(static_cast<int>(std::ceil(jump.time / dt_grid)), 1, spec.grid - 1);
        sums.jumps_in_bin[bin] += 1.0;
      }
      sums.jumps += static_cast<std::int64_t>(r.jumps.size());
      sums.missed += static_cast<std::int64_t>(r.missed_jumps.size());
      sums.failures += r.correction_failures;
    }
  });

  EnsembleStats stats;
  stats.trajectories = spec.trajectories;
  std::vector<double> sum_f(spec.grid, 0.0), sum_f2(spec.grid, 0.0), bins(spec.grid, 0.0);
  for (const auto& b : blocks) {
    for (int g = 0; g < spec.grid; ++g) {
      sum_f[g] += b.sum_f[g];
      sum_f2[g] += b.sum_f2[g];
      bins[g] += b.jumps_in_bin[g];
    }
    stats.total_jumps += b.jumps;
    stats.missed_jumps += b.missed;
    stats.correction_failures += b.failures;
  }
  const auto n = static_cast<double>(spec.trajectories);
  for (int g = 0; g < spec.grid; ++g) {
    stats.times.push_back(spec.t_max * g / (spec.grid - 1));
    const double mean = sum_f[g] / n;
    double var = n > 1 ? (sum_f2[g] - n * mean * mean) / (n - 1) : 0.0;
    var = std::max(0.0, var);
    stats.mean_fidelity.push_back(mean);
    stats.stderr_fidelity.push_back(std::sqrt(var / n));
    stats.jump_rate.push_back(g == 0 ? 0.0 : bins[g] / (n * dt_grid));
  }
  return stats;
}

std::optional<double> time_to_threshold(const EnsembleStats& stats, double threshold) {
  for (std::size_t g = 0; g < stats.times.size(); ++g) {
    if (stats.mean_fidelity[g] < threshold) return stats.times[g];
  }
  return std::nullopt;
}

std::string timeline_csv(const EnsembleStats& stats) {
  std::string out = "time,mean_fidelity,stderr_fidelity,jump_rate\n";
  for (std::size_t g = 0; g < stats.times.size(); ++g) {
    out += format_double(stats.times[g]) + ',' + format_double(stats.mean_fidelity[g]) + ',' +
           format_double(stats.stderr_fidelity[g]) + ',' + format_double(stats.jump_rate[g]) + '\n';
  }
  return out;
}

DensityEstimate estimate_density(const StateVector& initial, const DecayModel& decay,
                                 std::span<const double> times, std::int64_t trajectories,
                                 std::uint64_t seed) {
  if (times.empty()) throw ValidationError("density estimate needs at least one time");
  if (trajectories < 2) throw ValidationError("density estimate needs at least two trajectories");
  const auto d = static_cast<Eigen::Index>(initial.dim());
  const std::size_t n_t = times.size();
  std::vector<Eigen::MatrixXcd> sum(n_t, Eigen::MatrixXcd::Zero(d, d));
  std::vector<Eigen::MatrixXd> sq_re(n_t, Eigen::MatrixXd::Zero(d, d));
  std::vector<Eigen::MatrixXd> sq_im(n_t, Eigen::MatrixXd::Zero(d, d));

  TrajectoryOptions options;
  options.grid = 2;
  options.snapshot_times.assign(times.begin(), times.end());
  double t_max = 0.0;
  for (double t : times) t_max = std::max(t_max, t);
  if (!(t_max > 0.0)) throw ValidationError("density estimate needs a positive time");
  const DetectionModel no_feedback{0.0, 0.0};

  // Snapshot order follows sorted times.
  std::vector<std::size_t> order(n_t);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return times[a] < times[b]; });

  for (std::int64_t i = 0; i < trajectories; ++i) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(i));
    const TrajectoryResult r = run_trajectory(initial, decay, no_feedback, t_max, nullptr, rng, options);
    for (std::size_t s = 0; s < n_t; ++s) {
      const std::size_t slot = order[s];
      Eigen::Map<const Eigen::VectorXcd> v(r.snapshots[s].amplitudes().data(), d);
      const Eigen::MatrixXcd outer = v * v.adjoint();
      sum[slot] += outer;
      sq_re[slot] += outer.real().cwiseAbs2();
      sq_im[slot] += outer.imag().cwiseAbs2();
    }
  }

  DensityEstimate est;
  est.trajectories = trajectories;
  est.times.assign(times.begin(), times.end());
  const auto n = static_cast<double>(trajectories);
  for (std::size_t s = 0; s < n_t; ++s) {
    Eigen::MatrixXcd mean = sum[s] / n;
    auto spread = [&](const Eigen::MatrixXd& sq, const Eigen::MatrixXd& m) {
      Eigen::MatrixXd var = (sq - n * m.cwiseAbs2()) / (n - 1);
      return Eigen::MatrixXd(var.cwiseMax(0.0).cwiseSqrt() / std::sqrt(n));
    };
    est.stderr_re.push_back(spread(sq_re[s], mean.real()));
    est.stderr_im.push_back(spread(sq_im[s], mean.imag()));
    est.mean.push_back(std::move(mean));
  }
  return est;
}

OracleComparison compare_to_reference(const DensityEstimate& estimate,
                                      std::span<const DensityMatrix> reference, double n_sigma) {
  if (reference.size() != estimate.mean.size()) {
    throw ValidationError("reference and estimate cover different times");
  }
  OracleComparison cmp;
  for (std::size_t s = 0; s < reference.size(); ++s) {
    const auto& ref = reference[s].entries();
    const auto& est = estimate.mean[s];
    for (Eigen::Index k = 0; k < ref.rows(); ++k) {
      for (Eigen::Index l = 0; l < ref.cols(); ++l) {
        const double parts[2][2] = {{est(k, l).real() - ref(k, l).real(), estimate.stderr_re[s](k, l)},
                                    {est(k, l).imag() - ref(k, l).imag(), estimate.stderr_im[s](k, l)}};
        for (const auto& [diff, se] : parts) {
          const double dev = std::abs(diff);
          cmp.max_abs_error = std::max(cmp.max_abs_error, dev);
          if (se > 0.0) cmp.worst_sigma = std::max(cmp.worst_sigma, dev / se);
          if (dev > n_sigma * se + 1e-9) cmp.within = false;
        }
      }
    }
  }
  return cmp;
}

void ExperimentConfig::validate() const {
  if (trajectories < 1) throw ValidationError("trajectories must be >= 1");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be positive");
  if (grid < 2) throw ValidationError("grid must be >= 2");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
  if (scheme.register_size() > kMaxIons) {
    throw ValidationError("scheme needs " + std::to_string(scheme.register_size()) +
                          " ions, more than the " + std::to_string(kMaxIons) + "-ion limit");
  }
  scheme.validate(scheme.register_size());
  decay.validate(scheme.register_size());
  detection.validate();
  if (logical && logical->n_qubits() != scheme.n_logical()) {
    throw ValidationError("logical state size does not match the scheme");
  }
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    const int n_logical = j.value("n_logical", 1);
    if (j.contains("scheme")) {
      const auto& s = j.at("scheme");
      c.scheme = s.is_string() ? CodeScheme::standard(code_kind_from_string(s.get<std::string>()),
                                                      n_logical)
                               : scheme_from_json(s);
    }
    if (j.contains("logical")) {
      std::vector<Complex> amps;
      for (const auto& p : j.at("logical")) amps.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      c.logical = LogicalState(std::move(amps));
    }
    c.decay.gamma = j.value("gamma", 1.0);
    if (j.contains("per_ion_gamma")) c.decay.per_ion_gamma = j.at("per_ion_gamma").get<std::vector<double>>();
    c.detection.efficiency = j.value("efficiency", 1.0);
    c.detection.feedback_latency = j.value("latency", 0.0);
    c.t_max = j.value("t_max", 10.0);
    c.grid = j.value("grid", 200);
    c.trajectories = j.value("trajectories", std::int64_t{1000});
    c.seed = j.value("seed", std::uint64_t{1});
    c.threshold = j.value("threshold", 0.9);
    c.threads = j.value("threads", 0);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad experiment config: ") + e.what());
  }
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
  nlohmann::json j = {{"scheme", scheme_to_json(c.scheme)},
                      {"gamma", c.decay.gamma},
                      {"t_max", c.t_max},
                      {"trajectories", c.trajectories},
                      {"seed", c.seed},
                      {"efficiency", c.detection.efficiency},
                      {"latency", c.detection.feedback_latency},
                      {"grid", c.grid},
                      {"threshold", c.threshold}};
  if (!c.decay.per_ion_gamma.empty()) j["per_ion_gamma"] = c.decay.per_ion_gamma;
  if (c.logical) j["logical"] = logical_to_json(*c.logical);
  return j;
}

StorageSummary storage_experiment(const ExperimentConfig& config,
                                  const std::optional<std::filesystem::path>& out_dir) {
  config.validate();
  const CodeScheme& scheme = config.scheme;
  StorageSummary out;
  if (config.logical) {
    out.logical = *config.logical;
  } else {
    Rng rng = make_stream(config.seed, ~std::uint64_t{0});
    out.logical = LogicalState::random(scheme.n_logical(), rng);
  }
  const FeedbackTable table(scheme);

  EnsembleSpec spec;
  spec.initial = encode(scheme, out.logical);
  spec.decay = config.decay;
  spec.detection = config.detection;
  spec.t_max = config.t_max;
  spec.grid = config.grid;
  spec.trajectories = config.trajectories;
  spec.seed = config.seed;
  spec.threads = config.threads;
  out.corrected = run_ensemble(spec, &table);

  EnsembleSpec bare = spec;
  bare.detection.efficiency = 0.0;
  out.uncorrected = run_ensemble(bare, &table);

  out.corrected_time_to_threshold = time_to_threshold(out.corrected, config.threshold);
  out.uncorrected_time_to_threshold = time_to_threshold(out.uncorrected, config.threshold);

  nlohmann::json& s = out.summary;
  s["scheme"] = scheme_to_json(scheme);
  s["logical"] = logical_to_json(out.logical);
  s["threshold"] = config.threshold;
  s["trajectories"] = out.corrected.trajectories;
  s["total_jumps"] = out.corrected.total_jumps;
  s["missed_jumps"] = out.corrected.missed_jumps;
  s["correction_failures"] = out.corrected.correction_failures;
  s["corrected"] = ensemble_summary(out.corrected, config.threshold);
  s["uncorrected"] = ensemble_summary(out.uncorrected, config.threshold);
  s["corrected_never_crossed"] = !out.corrected_time_to_threshold.has_value();
  if (out.corrected_time_to_threshold && out.uncorrected_time_to_threshold) {
    s["storage_time_ratio"] = *out.corrected_time_to_threshold / *out.uncorrected_time_to_threshold;
  } else {
    s["storage_time_ratio"] = nullptr;
  }
  const FeedbackPlan plan = plan_for(scheme, scheme.data_ions.front());
  s["feedback_gate_count"] = gate_count_to_json(gate_count(plan));
  s["feedback_wall_time_s"] = feedback_wall_time(plan, TimingModel{});

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_file(*out_dir / "config.json", experiment_config_to_json(config).dump(2) + "\n");
    write_file(*out_dir / "timeline_corrected.csv", timeline_csv(out.corrected));
    write_file(*out_dir / "timeline_uncorrected.csv", timeline_csv(out.uncorrected));
    write_file(*out_dir / "summary.json", s.dump(2) + "\n");
  }
  return out;
}

}  // namespace ionqec
