#include "ionqec/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "ionqec/errors.hpp"

namespace ionqec {

namespace {

// Total decay rate of every basis state: sum of gamma_j over its excited ions.
std::vector<double> basis_rates(int n_ions, const DecayModel& model) {
  std::vector<double> rates(std::size_t{1} << n_ions, 0.0);
  for (int ion = 1; ion <= n_ions; ++ion) {
    const double g = model.rate(ion);
    const std::uint64_t m = ion_mask(ion);
    for (std::size_t k = 0; k < rates.size(); ++k) {
      if (k & m) rates[k] += g;
    }
  }
  return rates;
}

double survival_with(const StateVector& state, const std::vector<double>& rates, double dt) {
  double s = 0.0;
  for (std::size_t k = 0; k < state.dim(); ++k) {
    const double p = std::norm(state[k]);
    if (p != 0.0) s += p * std::exp(-rates[k] * dt);
  }
  return s;
}

StateVector evolve_with(StateVector state, const std::vector<double>& rates, double dt) {
  for (std::size_t k = 0; k < state.dim(); ++k) state[k] *= std::exp(-0.5 * rates[k] * dt);
  return state;
}

}  // namespace

double DecayModel::rate(int ion) const {
  if (per_ion_gamma.empty()) return gamma;
  if (ion < 1 || ion > static_cast<int>(per_ion_gamma.size())) {
    throw IndexError("no decay rate for ion " + std::to_string(ion));
  }
  return per_ion_gamma[ion - 1];
}

void DecayModel::validate(int n_ions) const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError("gamma must be positive");
  if (!per_ion_gamma.empty()) {
    if (static_cast<int>(per_ion_gamma.size()) != n_ions) {
      throw ValidationError("per-ion rates given for " + std::to_string(per_ion_gamma.size()) +
                            " ions, register has " + std::to_string(n_ions));
    }
    for (double g : per_ion_gamma) {
      if (!(g > 0.0) || !std::isfinite(g)) throw ValidationError("per-ion rates must be positive");
    }
  }
}

void DetectionModel::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw ValidationError("detection efficiency must lie in [0, 1]");
  }
  if (!(feedback_latency >= 0.0) || !std::isfinite(feedback_latency)) {
    throw ValidationError("feedback latency must be a finite non-negative time");
  }
}

ConditionalResult conditional_evolve(StateVector state, double dt, const DecayModel& model) {
  if (dt < 0.0) throw ValidationError("conditional evolution needs dt >= 0");
  model.validate(state.n_ions());
  const auto rates = basis_rates(state.n_ions(), model);
  StateVector out = evolve_with(std::move(state), rates, dt);
  const double survival = out.norm_squared();
  return {std::move(out), survival};
}

double survival_probability(const StateVector& state, double dt, const DecayModel& model) {
  if (dt < 0.0) throw ValidationError("survival needs dt >= 0");
  return survival_with(state, basis_rates(state.n_ions(), model), dt);
}

JumpSample sample_jump(const StateVector& state, const DecayModel& model, double t_max, Rng& rng) {
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be finite");
  const auto rates = basis_rates(state.n_ions(), model);
  const double r = uniform_open01(rng);
  if (survival_with(state, rates, t_max) > r) return {false, t_max, 0};

  double lo = 0.0;
  double hi = t_max;
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (survival_with(state, rates, mid) > r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t_jump = 0.5 * (lo + hi);

  std::vector<double> weights(state.n_ions(), 0.0);
  double total = 0.0;
  for (int ion = 1; ion <= state.n_ions(); ++ion) {
    const std::uint64_t m = ion_mask(ion);
    double w = 0.0;
    for (std::size_t k = 0; k < state.dim(); ++k) {
      if (k & m) w += std::norm(state[k]) * std::exp(-rates[k] * t_jump);
    }
    weights[ion - 1] = model.rate(ion) * w;
    total += weights[ion - 1];
  }
  double u = uniform01(rng) * total;
  int chosen = 0;
  for (int i = 0; i < state.n_ions(); ++i) {
    if (weights[i] <= 0.0) continue;
    chosen = i + 1;
    if (u < weights[i]) break;
    u -= weights[i];
  }
  return {true, t_jump, chosen};
}

StateVector apply_jump(const StateVector& state, int ion) {
  return apply_nonunitary_single_ion(state, ion, lowering_operator()).state.normalized();
}

TrajectoryResult run_trajectory(const StateVector& initial, const DecayModel& decay,
                                const DetectionModel& detection, double t_max,
                                const FeedbackTable* policy, Rng& rng,
                                const TrajectoryOptions& options) {
  decay.validate(initial.n_ions());
  detection.validate();
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be positive");
  if (options.grid < 2) throw ValidationError("fidelity grid needs at least two points");

  const StateVector reference = initial.normalized();
  const auto rates = basis_rates(initial.n_ions(), decay);

  TrajectoryResult result;
  result.fidelity_timeline.reserve(options.grid);
  result.snapshots.reserve(options.snapshot_times.size());
  std::vector<double> snapshot_times = options.snapshot_times;
  std::sort(snapshot_times.begin(), snapshot_times.end());

  StateVector state = reference;
  double t = 0.0;
  int next_grid = 0;
  std::size_t next_snapshot = 0;
  auto grid_time = [&](int i) { return t_max * i / (options.grid - 1); };

  // Records every grid point and snapshot strictly before `until` (or up to and
  // including it when `inclusive`) from the current state.
  auto record_until = [&](double until, bool inclusive) {
    auto due = [&](double g) { return inclusive ? g <= until : g < until; };
    while (next_grid < options.grid && due(grid_time(next_grid))) {
      const double g = grid_time(next_grid);
      const StateVector s = evolve_with(state, rates, std::max(0.0, g - t)).normalized();
      result.fidelity_timeline.push_back({g, fidelity(reference, s)});
      ++next_grid;
    }
    while (next_snapshot < snapshot_times.size() && due(snapshot_times[next_snapshot])) {
      const double g = snapshot_times[next_snapshot];
      result.snapshots.push_back(evolve_with(state, rates, std::max(0.0, g - t)).normalized());
      ++next_snapshot;
    }
  };

  struct Pending {
    double due;
    int ion;
  };
  std::deque<Pending> pending;

  while (t < t_max) {
    if (!pending.empty() && pending.front().due <= t) {
      const Pending p = pending.front();
      pending.pop_front();
      FeedbackEvent ev{t, p.ion, true, 0.0, {}};
      if (const FeedbackPlan* plan = policy->find(p.ion)) {
        CorrectionOutcome outcome = apply_feedback(state, *plan);
        state = outcome.state.normalized();
        ev.success = outcome.success;
        ev.failure = std::move(outcome.failure);
      } else {
        ev.success = false;
        ev.failure = "no feedback plan for ion " + std::to_string(p.ion);
      }
      if (!pending.empty()) {
        ev.success = false;
        ev.failure = "another jump occurred within the feedback latency window";
      }
      ev.fidelity_after = fidelity(reference, state);
      if (!ev.success) ++result.correction_failures;
      result.feedback_events.push_back(std::move(ev));
      continue;
    }

    const double horizon = pending.empty() ? t_max : std::min(t_max, pending.front().due);
    const JumpSample sample = sample_jump(state, decay, horizon - t, rng);
    const double t_event = sample.jumped ? t + sample.wait_time : horizon;
    record_until(t_event, false);
    state = evolve_with(std::move(state), rates, t_event - t).normalized();
    t = t_event;
    if (!sample.jumped) continue;

    state = apply_jump(state, sample.ion);
    const JumpRecord jump{sample.ion, t};
    result.jumps.push_back(jump);
    const bool detected = uniform01(rng) < detection.efficiency;
    if (!detected) {
      result.missed_jumps.push_back(jump);
    } else if (policy != nullptr) {
      pending.push_back({t + detection.feedback_latency, sample.ion});
    }
  }
  record_until(t_max, true);
  result.final_state = std::move(state);
  return result;
}

DensityMatrix master_equation_evolve(const DensityMatrix& rho0, const DecayModel& decay, double t) {
  const int n = rho0.n_ions();
  if (n > kMaxOracleIons) {
    throw SizeError("master-equation reference is limited to " + std::to_string(kMaxOracleIons) +
                    " ions");
  }
  if (t < 0.0) throw ValidationError("master-equation evolution needs t >= 0");
  decay.validate(n);
  if (t == 0.0) return rho0;

  const auto rates = basis_rates(n, decay);
  const auto d = static_cast<Eigen::Index>(rho0.dim());
  std::vector<double> gammas(n);
  for (int ion = 1; ion <= n; ++ion) gammas[ion - 1] = decay.rate(ion);

  auto lindblad = [&](const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd out(d, d);
    for (Eigen::Index l = 0; l < d; ++l) {
      for (Eigen::Index k = 0; k < d; ++k) {
        Complex v = -0.5 * (rates[k] + rates[l]) * rho(k, l);
        for (int j = 0; j < n; ++j) {
          const auto m = static_cast<Eigen::Index>(ion_mask(j + 1));
          if (!(k & m) && !(l & m)) v += gammas[j] * rho(k | m, l | m);
        }
        out(k, l) = v;
      }
    }
    return out;
  };
  auto rk4 = [&](const Eigen::MatrixXcd& y, double h) {
    const Eigen::MatrixXcd k1 = lindblad(y);
    const Eigen::MatrixXcd k2 = lindblad(y + 0.5 * h * k1);
    const Eigen::MatrixXcd k3 = lindblad(y + 0.5 * h * k2);
    const Eigen::MatrixXcd k4 = lindblad(y + h * k3);
    return Eigen::MatrixXcd(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };

  const double max_rate = *std::max_element(rates.begin(), rates.end());
  const double local_tol = 1e-9 * 1e-3;
  Eigen::MatrixXcd y = rho0.entries();
  double now = 0.0;
  double h = std::min(t, 0.05 / std::max(max_rate, 1e-300));
  while (now < t) {
    h = std::min(h, t - now);
    const Eigen::MatrixXcd full = rk4(y, h);
    const Eigen::MatrixXcd half = rk4(rk4(y, 0.5 * h), 0.5 * h);
    const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
    if (err <= local_tol || h < 1e-14 * t) {
      y = half + (half - full) / 15.0;
      now += h;
      if (t - now < 1e-15 * t) now = t;
      const double grow = err > 0.0 ? 0.9 * std::pow(local_tol / err, 0.2) : 2.0;
      h *= std::clamp(grow, 0.2, 2.0);
    } else {
      h *= std::clamp(0.9 * std::pow(local_tol / err, 0.2), 0.1, 0.9);
    }
  }
  return DensityMatrix(n, std::move(y));
}

}  // namespace ionqec
