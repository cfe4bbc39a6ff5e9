// Property suites run by `ionqec verify <suite>`.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "ionqec/errors.hpp"
#include "ionqec/harness.hpp"

namespace ionqec {

namespace {

constexpr int kRandomCases = 100;

const std::vector<CodeKind> kAllKinds = {CodeKind::kFourierPair, CodeKind::kFourierSymmetrized,
                                          CodeKind::kNumberState,
                                          CodeKind::kNumberStateSymmetrized};

// Logical qubit count used when a suite exercises every family.
int suite_logical(CodeKind kind) {
  return kind == CodeKind::kNumberState || kind == CodeKind::kNumberStateSymmetrized ? 2 : 1;
}

StateVector tilde(int which) {
  const double r = 1.0 / std::sqrt(2.0);
  return StateVector(1, {r, which == 0 ? r : -r});
}

double max_amplitude_error(const StateVector& a, const StateVector& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

StateVector scaled(StateVector s, Complex factor) {
  for (auto& a : s.amplitudes()) a *= factor;
  return s;
}

// Two-ion product |s2>_2 (x) |s1>_1.
StateVector product(const StateVector& ion1, const StateVector& ion2) {
  std::vector<Complex> amps(4);
  for (int k = 0; k < 4; ++k) amps[k] = ion1[k & 1] * ion2[(k >> 1) & 1];
  return StateVector(2, std::move(amps));
}

class Suite {
 public:
  Suite(std::string name, VerifyReport& report) : name_(std::move(name)), report_(report) {}

  void check(const std::string& what, bool ok, const std::string& detail) {
    report_.checks.push_back({name_, what, ok ? CheckStatus::kPass : CheckStatus::kFail, detail});
  }
  void warn(const std::string& what, const std::string& detail) {
    report_.checks.push_back({name_, what, CheckStatus::kWarn, detail});
  }

 private:
  std::string name_;
  VerifyReport& report_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

void run_algebra(VerifyReport& report, Rng& rng) {
  Suite s("algebra", report);
  const StateVector zero(1), one = basis_state(1, 1);

  const PulseSpec swap_basis = half_pi_pulse(1);
  double e = std::max(max_amplitude_error(apply_pulse(zero, swap_basis), tilde(0)),
                      max_amplitude_error(apply_pulse(one, swap_basis), scaled(tilde(1), -1.0)));
  s.check("half_pi_swaps_bases", e <= 1e-12, "max amplitude error " + fmt(e));

  const PulseSpec flip = pi_pulse(1);
  e = std::max(max_amplitude_error(apply_pulse(tilde(0), flip), scaled(tilde(1), -1.0)),
               max_amplitude_error(apply_pulse(tilde(1), flip), tilde(0)));
  s.check("pi_flips_tilde_states", e <= 1e-12, "max amplitude error " + fmt(e));

  e = max_amplitude_error(apply_pulse(zero, {kPi / 2, kPi / 2, 1}), tilde(1));
  s.check("half_pi_phase_plus_maps_zero_to_tilde_one", e <= 1e-12, "error " + fmt(e));

  std::uniform_real_distribution<double> angle(-2 * kPi, 2 * kPi);
  double worst = 0.0;
  for (int i = 0; i < kRandomCases; ++i) {
    const double k = angle(rng), phi = angle(rng);
    const Matrix2 prod = pulse_matrix(k, phi) * pulse_matrix(-k, phi);
    worst = std::max(worst, (prod - Matrix2::Identity()).cwiseAbs().maxCoeff());
  }
  s.check("pulse_inverse", worst <= 1e-12, "max deviation " + fmt(worst));

  // L-basis CNOT acts on tilde products with control and target swapped.
  worst = 0.0;
  for (int i1 = 0; i1 < 2; ++i1) {
    for (int i2 = 0; i2 < 2; ++i2) {
      const StateVector in = product(tilde(i1), tilde(i2));
      const StateVector expect = product(tilde(i1 ^ i2), tilde(i2));
      worst = std::max(worst, max_amplitude_error(apply_cnot(in, 1, 2), expect));
    }
  }
  s.check("tilde_cnot_duality", worst <= 1e-12, "max amplitude error " + fmt(worst));

  worst = 0.0;
  double commute = 0.0;
  for (int i = 0; i < kRandomCases; ++i) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const StateVector psi = random_state(n, rng);
    const Matrix2 u = pulse_matrix(angle(rng), angle(rng)) * pulse_matrix(angle(rng), angle(rng)) *
                      std::polar(1.0, angle(rng));
    const int ion = 1 + static_cast<int>(rng() % n);
    worst = std::max(worst, std::abs(apply_single_ion(psi, ion, u).norm_squared() - 1.0));
    if (n >= 2) {
      const int other = ion % n + 1;
      const Matrix2 v = pulse_matrix(angle(rng), angle(rng));
      commute = std::max(commute, max_amplitude_error(
                                      apply_single_ion(apply_single_ion(psi, ion, u), other, v),
                                      apply_single_ion(apply_single_ion(psi, other, v), ion, u)));
    }
  }
  s.check("unitary_preserves_norm", worst <= 1e-12, "max norm drift " + fmt(worst));
  s.check("disjoint_ions_commute", commute <= 1e-12, "max difference " + fmt(commute));

  bool involution = true;
  for (int n = 1; n <= kMaxIons; ++n) {
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); k += std::max<std::uint64_t>(1, k / 7 + 1)) {
      const BasisIndex b(k, n);
      involution = involution && b.complement().complement() == b;
    }
  }
  s.check("complement_involution", involution, "n = 1..14");
}

void run_codewords(VerifyReport& report, Rng& rng) {
  Suite s("codewords", report);
  for (CodeKind kind : kAllKinds) {
    const CodeScheme scheme = CodeScheme::standard(kind, suite_logical(kind));
    double worst = 0.0;
    bool in_space = true;
    for (int i = 0; i < kRandomCases; ++i) {
      const LogicalState logical = LogicalState::random(scheme.n_logical(), rng);
      const StateVector code = encode(scheme, logical);
      in_space = in_space && codeword_report(code, scheme).in_code_space;
      worst = std::max(worst, 1.0 - logical_fidelity(logical, decode(scheme, code)));
    }
    s.check("round_trip_" + to_string(kind), worst <= 1e-12 && in_space,
            "max infidelity " + fmt(worst));
  }

  Rng local = rng;
  const auto sym = codeword_report(
      encode(CodeScheme::fourier_symmetrized(), LogicalState::random(1, local)),
      CodeScheme::fourier_symmetrized());
  s.check("fourier_symmetrized_weight_two", sym.excitation_weights == std::set<int>{2}, "");

  bool uniform = true;
  for (int m = 0; m <= 3; ++m) {
    const CodeScheme scheme = CodeScheme::number_state_symmetrized(m);
    const auto rep = codeword_report(encode(scheme, LogicalState::random(m, rng)), scheme);
    uniform = uniform && rep.excitation_weights == std::set<int>{m + 1};
  }
  s.check("number_symmetrized_weight_n", uniform, "N = 1..4 number-state ions per set");

  const CodeScheme three = CodeScheme::number_state(2);
  const StateVector code3 = encode(three, LogicalState::random(2, rng));
  s.check("number_state_weights_not_uniform",
          codeword_report(code3, three).excitation_weights == std::set<int>{0, 1, 2, 3}, "");
  double asym = 0.0;
  for (std::uint64_t k = 0; k < 8; ++k) asym = std::max(asym, std::abs(code3[k] - code3[7 - k]));
  s.check("complement_pair_symmetry", asym <= 1e-12, "max |c(k) - c(~k)| " + fmt(asym));
}

void run_recovery(VerifyReport& report, Rng& rng) {
  Suite s("recovery", report);
  for (CodeKind kind : kAllKinds) {
    const CodeScheme scheme = CodeScheme::standard(kind, suite_logical(kind));
    const FeedbackTable table(scheme);
    double worst = 0.0;
    int failures = 0;
    for (int ion : scheme.codeword_ions()) {
      for (int i = 0; i < kRandomCases; ++i) {
        const StateVector code = encode(scheme, LogicalState::random(scheme.n_logical(), rng));
        if (code.excited_population(ion) < 1e-12) continue;
        const auto out = apply_feedback(apply_jump(code, ion), *table.find(ion));
        failures += out.success ? 0 : 1;
        worst = std::max(worst, 1.0 - fidelity(code, out.state));
      }
    }
    s.check("single_jump_" + to_string(kind), worst <= 1e-10 && failures == 0,
            "max infidelity " + fmt(worst) + ", failures " + std::to_string(failures));
  }

  for (CodeKind kind : kAllKinds) {
    const CodeScheme scheme = CodeScheme::standard(kind, suite_logical(kind));
    const FeedbackTable table(scheme);
    const StateVector code = encode(scheme, LogicalState::random(scheme.n_logical(), rng));
    const auto ions = scheme.codeword_ions();
    StateVector state = code;
    for (int round = 0; round < 20; ++round) {
      int ion = ions[rng() % ions.size()];
      while (state.excited_population(ion) < 1e-12) ion = ions[rng() % ions.size()];
      state = apply_feedback(apply_jump(state, ion), *table.find(ion)).state;
    }
    const double infid = 1.0 - fidelity(code, state);
    s.check("repeated_jumps_" + to_string(kind), infid <= 1e-9, "infidelity " + fmt(infid));
  }

  for (CodeKind kind : kAllKinds) {
    const CodeScheme scheme = CodeScheme::standard(kind, suite_logical(kind));
    const FeedbackTable table(scheme);
    const auto ions = scheme.codeword_ions();
    double best = 0.0;
    for (int i = 0; i < 10; ++i) {
      const StateVector code = encode(scheme, LogicalState::random(scheme.n_logical(), rng));
      for (int jumped : ions) {
        for (int planned : ions) {
          if (planned == jumped) continue;
          const auto out = apply_feedback(apply_jump(code, jumped), *table.find(planned));
          best = std::max(best, fidelity(code, out.state));
        }
      }
    }
    s.check("wrong_ion_plan_fails_" + to_string(kind), best < 1.0 - 1e-3,
            "best fidelity with a mismatched plan " + fmt(best));
  }
}

void run_invariance(VerifyReport& report, Rng& rng) {
  Suite s("invariance", report);
  const DecayModel decay{1.0, {}};
  std::uniform_real_distribution<double> times(1e-6, 5.0);
  for (CodeKind kind : {CodeKind::kFourierSymmetrized, CodeKind::kNumberStateSymmetrized}) {
    const CodeScheme scheme = CodeScheme::standard(kind, suite_logical(kind));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const StateVector code = encode(scheme, LogicalState::random(scheme.n_logical(), rng));
      const auto evolved = conditional_evolve(code, times(rng), decay);
      worst = std::max(worst, 1.0 - fidelity(code, evolved.state.normalized()));
    }
    s.check("no_jump_invariant_" + to_string(kind), worst <= 1e-12, "max infidelity " + fmt(worst));
  }
  const CodeScheme three = CodeScheme::number_state(2);
  const StateVector code = encode(three, LogicalState({1.0, 0.0, 0.0, 0.0}));
  const double f = fidelity(code, conditional_evolve(code, 1.0, decay).state.normalized());
  // (|0> + e^{-3/2}|7>)/sqrt2 against the original.
  const double expect = std::pow(1.0 + std::exp(-1.5), 2) / (2.0 * (1.0 + std::exp(-3.0)));
  s.check("number_state_distorts", f < 1.0 - 1e-3 && std::abs(f - expect) <= 1e-12,
          "fidelity " + fmt(f) + " (closed form " + fmt(expect) + ")");
}

void run_oracle(VerifyReport& report, Rng& rng) {
  Suite s("oracle", report);
  const DecayModel decay{1.0, {}};
  const std::vector<double> times = {0.5, 1.0, 2.0};
  for (int n : {1, 2}) {
    const StateVector psi = random_state(n, rng);
    const auto est = estimate_density(psi, decay, times, 10000, rng());
    std::vector<DensityMatrix> ref;
    for (double t : times) ref.push_back(master_equation_evolve(pure_to_density(psi), decay, t));
    const auto cmp = compare_to_reference(est, ref, 3.0);
    s.check("mcwf_matches_master_equation_" + std::to_string(n) + "_ion", cmp.within,
            "worst deviation " + fmt(cmp.worst_sigma) + " sigma");
  }
}

void run_counts(VerifyReport& report, Rng&) {
  Suite s("counts", report);
  const CostReport fourier = cost_report(CodeKind::kFourierSymmetrized, 1);
  s.check("fourier_matches_table", fourier.constructed == GateCount{2, 5},
          "constructed (" + std::to_string(fourier.constructed.rotations) + ", " +
              std::to_string(fourier.constructed.cnots) + ")");
  for (int m = 1; m <= 5; ++m) {
    const CostReport c = cost_report(CodeKind::kNumberStateSymmetrized, m);
    const bool ladder = c.constructed == GateCount{2, c.codeword_ions + 1};
    const std::string detail = "N = " + std::to_string(m) + ": constructed " +
                               std::to_string(c.constructed.cnots) + " CNOTs over " +
                               std::to_string(c.codeword_ions) + " codeword ions, tabulated " +
                               std::to_string(c.tabulated.cnots);
    s.check("number_state_ladder_N" + std::to_string(m), ladder, detail);
    if (c.constructed != c.tabulated) s.warn("number_state_table_convention_N" + std::to_string(m), detail);
  }

  const TimingModel timing;
  double worst = 0.0;
  for (int n = 3; n <= 12; ++n) {
    CodeScheme scheme = CodeScheme::number_state(n - 1);
    const double t0 = feedback_wall_time(plan_for(scheme, 1), timing);
    scheme = CodeScheme::number_state(n);
    const double t1 = feedback_wall_time(plan_for(scheme, 1), timing);
    worst = std::max(worst, std::abs((t1 - t0) - timing.tau_cnot));
  }
  s.check("wall_time_linear", worst <= 1e-15, "max slope error " + fmt(worst) + " s");
  const double td = decoherence_time(13, timing.tau_q);
  s.check("register_decoherence_13", td >= 4.5 && td <= 5.0, "tau_d = " + fmt(td) + " s");
}

using SuiteFn = std::function<void(VerifyReport&, Rng&)>;

const std::vector<std::pair<std::string, SuiteFn>>& suite_table() {
  static const std::vector<std::pair<std::string, SuiteFn>> table = {
      {"algebra", run_algebra},     {"codewords", run_codewords}, {"recovery", run_recovery},
      {"invariance", run_invariance}, {"oracle", run_oracle},     {"counts", run_counts}};
  return table;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::kFail; });
}

std::vector<std::string> verify_suites() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : suite_table()) names.push_back(name);
  return names;
}

VerifyReport verify(const std::string& suite, std::uint64_t seed) {
  VerifyReport report;
  bool found = false;
  for (std::size_t i = 0; i < suite_table().size(); ++i) {
    const auto& [name, fn] = suite_table()[i];
    if (suite != "all" && suite != name) continue;
    found = true;
    Rng rng = make_stream(seed, i);
    fn(report, rng);
  }
  if (!found) throw ValidationError("unknown verify suite '" + suite + "'");
  return report;
}

void print_report(const VerifyReport& report, std::ostream& out) {
  for (const auto& c : report.checks) {
    const char* status = c.status == CheckStatus::kPass ? "PASS"
                         : c.status == CheckStatus::kWarn ? "WARN"
                                                          : "FAIL";
    nlohmann::json line = {{"suite", c.suite}, {"check", c.name}, {"status", status}, {"detail", c.detail}};
    out << line.dump() << '\n';
  }
}

}  // namespace ionqec
