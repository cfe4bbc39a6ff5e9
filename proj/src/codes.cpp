#include "ionqec/codes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "ionqec/errors.hpp"

namespace ionqec {

namespace {

std::uint64_t mask_of(std::span<const int> ions) {
  std::uint64_t m = 0;
  for (int ion : ions) m |= ion_mask(ion);
  return m;
}

// Spreads the bits of k onto the given ions, ions[0] least significant.
std::uint64_t place_bits(std::uint64_t k, std::span<const int> ions) {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < ions.size(); ++i) {
    if ((k >> i) & 1U) out |= ion_mask(ions[i]);
  }
  return out;
}

void require_ground(const StateVector& reg, int ion, const char* role) {
  reg.check_ion(ion);
  if (reg.excited_population(ion) > kCodeSpaceTolerance) {
    throw ValidationError(std::string(role) + " ion " + std::to_string(ion) + " is not in |0>");
  }
}

StateVector run_steps(StateVector reg, std::span<const CircuitStep> steps) {
  return run_circuit(std::move(reg), steps).state;
}

void require_code_space(const StateVector& reg, const CodeScheme& scheme) {
  const double deficit = projection_deficit(reg, scheme);
  if (deficit >= kCodeSpaceTolerance) {
    throw DecodeError("register is outside the " + to_string(scheme.kind) +
                      " code space (projection deficit " + std::to_string(deficit) + ")");
  }
}

CodeScheme pair_scheme(int a, int b) {
  CodeScheme s;
  s.kind = CodeKind::kFourierPair;
  s.data_ions = {a, b};
  return s;
}

LogicalState tilde_amplitudes(const LogicalState& l_basis) {
  const double r = 1.0 / std::sqrt(2.0);
  return LogicalState({r * (l_basis[0] + l_basis[1]), r * (l_basis[0] - l_basis[1])});
}

}  // namespace

std::string to_string(CodeKind kind) {
  switch (kind) {
    case CodeKind::kFourierPair: return "FourierPair";
    case CodeKind::kFourierSymmetrized: return "FourierSymmetrized";
    case CodeKind::kNumberState: return "NumberState";
    case CodeKind::kNumberStateSymmetrized: return "NumberStateSymmetrized";
  }
  return "unknown";
}

CodeKind code_kind_from_string(const std::string& name) {
  for (auto kind : {CodeKind::kFourierPair, CodeKind::kFourierSymmetrized, CodeKind::kNumberState,
                    CodeKind::kNumberStateSymmetrized}) {
    if (to_string(kind) == name) return kind;
  }
  throw ValidationError("unknown code scheme kind '" + name + "'");
}

CodeScheme CodeScheme::fourier_pair() { return pair_scheme(1, 2); }

CodeScheme CodeScheme::fourier_symmetrized() {
  CodeScheme s;
  s.kind = CodeKind::kFourierSymmetrized;
  s.data_ions = {1, 2};
  s.partner_ions = {3, 4};
  s.ancilla = 5;
  return s;
}

CodeScheme CodeScheme::number_state(int n_logical) {
  if (n_logical < 0) throw ValidationError("negative logical qubit count");
  CodeScheme s;
  s.kind = CodeKind::kNumberState;
  s.data_ions.resize(n_logical + 1);
  std::iota(s.data_ions.begin(), s.data_ions.end(), 1);
  s.ancilla = n_logical + 2;
  return s;
}

CodeScheme CodeScheme::number_state_symmetrized(int n_logical) {
  if (n_logical < 0) throw ValidationError("negative logical qubit count");
  CodeScheme s;
  s.kind = CodeKind::kNumberStateSymmetrized;
  const int n = n_logical + 1;
  s.data_ions.resize(n);
  std::iota(s.data_ions.begin(), s.data_ions.end(), 1);
  s.partner_ions.resize(n);
  std::iota(s.partner_ions.begin(), s.partner_ions.end(), n + 1);
  s.ancilla = 2 * n + 1;
  return s;
}

CodeScheme CodeScheme::standard(CodeKind kind, int n_logical) {
  switch (kind) {
    case CodeKind::kFourierPair: return fourier_pair();
    case CodeKind::kFourierSymmetrized: return fourier_symmetrized();
    case CodeKind::kNumberState: return number_state(n_logical);
    case CodeKind::kNumberStateSymmetrized: return number_state_symmetrized(n_logical);
  }
  throw ValidationError("unknown code kind");
}

std::vector<int> CodeScheme::codeword_ions() const {
  std::vector<int> ions = data_ions;
  ions.insert(ions.end(), partner_ions.begin(), partner_ions.end());
  return ions;
}

int CodeScheme::n_logical() const {
  switch (kind) {
    case CodeKind::kFourierPair:
    case CodeKind::kFourierSymmetrized: return 1;
    default: return static_cast<int>(data_ions.size()) - 1;
  }
}

int CodeScheme::register_size() const {
  int top = 0;
  for (int ion : codeword_ions()) top = std::max(top, ion);
  if (ancilla) top = std::max(top, *ancilla);
  return top;
}

void CodeScheme::validate(int n_ions) const {
  const std::string name = to_string(kind);
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) throw ValidationError(name + " scheme: " + what);
  };
  switch (kind) {
    case CodeKind::kFourierPair:
      expect(data_ions.size() == 2 && partner_ions.empty(), "needs ions a, b and no partners");
      break;
    case CodeKind::kFourierSymmetrized:
      expect(data_ions.size() == 2 && partner_ions.size() == 2, "needs ions a, b and partners c, d");
      expect(ancilla.has_value(), "needs a complementing ancilla");
      break;
    case CodeKind::kNumberState:
      expect(!data_ions.empty() && partner_ions.empty(), "needs at least one data ion, no partners");
      expect(ancilla.has_value(), "needs a complementing ancilla");
      break;
    case CodeKind::kNumberStateSymmetrized:
      expect(!data_ions.empty() && partner_ions.size() == data_ions.size(),
             "needs equally sized data and partner sets");
      expect(ancilla.has_value(), "needs a complementing ancilla");
      break;
  }
  std::vector<int> all = codeword_ions();
  if (ancilla) all.push_back(*ancilla);
  for (int ion : all) {
    if (ion < 1 || ion > n_ions) {
      throw IndexError(name + " scheme uses ion " + std::to_string(ion) + " of a " +
                       std::to_string(n_ions) + "-ion register");
    }
  }
  std::sort(all.begin(), all.end());
  expect(std::adjacent_find(all.begin(), all.end()) == all.end(), "ion roles overlap");
}

nlohmann::json scheme_to_json(const CodeScheme& scheme) {
  nlohmann::json j = {{"kind", to_string(scheme.kind)},
                      {"data_ions", scheme.data_ions},
                      {"partner_ions", scheme.partner_ions}};
  j["ancilla"] = scheme.ancilla ? nlohmann::json(*scheme.ancilla) : nlohmann::json(nullptr);
  return j;
}

CodeScheme scheme_from_json(const nlohmann::json& j) {
  try {
    CodeScheme s;
    s.kind = code_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("data_ions")) {
      s.data_ions = j.at("data_ions").get<std::vector<int>>();
    } else {
      // Only a kind (and optionally n_logical): use the standard layout.
      return CodeScheme::standard(s.kind, j.value("n_logical", 1));
    }
    if (j.contains("partner_ions")) s.partner_ions = j.at("partner_ions").get<std::vector<int>>();
    if (j.contains("ancilla") && !j.at("ancilla").is_null()) s.ancilla = j.at("ancilla").get<int>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad scheme descriptor: ") + e.what());
  }
}

LogicalState::LogicalState(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
  const std::size_t n = amplitudes_.size();
  if (n == 0 || !std::has_single_bit(n)) {
    throw ValidationError("logical state needs a power-of-two number of amplitudes");
  }
  n_qubits_ = std::countr_zero(n);
  double total = 0.0;
  for (const auto& c : amplitudes_) total += std::norm(c);
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw ValidationError("logical amplitudes are not normalized (sum |c|^2 = " +
                          std::to_string(total) + ")");
  }
}

LogicalState LogicalState::random(int n_qubits, Rng& rng) {
  std::normal_distribution<double> gauss;
  std::vector<Complex> amps(std::size_t{1} << n_qubits);
  double total = 0.0;
  for (auto& c : amps) {
    c = {gauss(rng), gauss(rng)};
    total += std::norm(c);
  }
  for (auto& c : amps) c /= std::sqrt(total);
  return LogicalState(std::move(amps));
}

double logical_fidelity(const LogicalState& a, const LogicalState& b) {
  if (a.n_qubits() != b.n_qubits()) throw ValidationError("logical states of different size");
  Complex overlap{0.0, 0.0};
  for (std::size_t k = 0; k < a.amplitudes().size(); ++k) overlap += std::conj(a[k]) * b[k];
  return std::min(1.0, std::norm(overlap));
}

StateVector load_logical(StateVector reg, std::span<const int> ions, const LogicalState& logical) {
  if (static_cast<int>(ions.size()) != logical.n_qubits()) {
    throw ValidationError("logical state has " + std::to_string(logical.n_qubits()) +
                          " qubits but " + std::to_string(ions.size()) + " carrier ions given");
  }
  for (int ion : ions) require_ground(reg, ion, "logical carrier");
  const std::uint64_t carriers = mask_of(ions);
  std::vector<Complex> out(reg.dim(), Complex{0.0, 0.0});
  for (std::size_t r = 0; r < reg.dim(); ++r) {
    if ((r & carriers) || reg[r] == Complex{0.0, 0.0}) continue;
    for (std::size_t k = 0; k < logical.amplitudes().size(); ++k) {
      out[r | place_bits(k, ions)] += reg[r] * logical[k];
    }
  }
  return StateVector(reg.n_ions(), std::move(out));
}

LogicalState read_logical(const StateVector& reg, std::span<const int> ions) {
  for (int ion : ions) reg.check_ion(ion);
  std::vector<Complex> amps(std::size_t{1} << ions.size());
  double total = 0.0;
  for (std::size_t k = 0; k < amps.size(); ++k) {
    amps[k] = reg[place_bits(k, ions)];
    total += std::norm(amps[k]);
  }
  if (total < 1.0 - kCodeSpaceTolerance) {
    throw DecodeError("register does not factor into the logical ions times |0...0>");
  }
  for (auto& c : amps) c /= std::sqrt(total);
  return LogicalState(std::move(amps));
}

Circuit fourier_pair_encoder(int ion_a, int ion_b) {
  // The L-basis CNOT with control b acts in the tilde basis with control a.
  return {half_pi_pulse(ion_a), half_pi_pulse(ion_b), CnotSpec{ion_b, ion_a}};
}

StateVector encode_fourier_pair_in_place(StateVector reg, int ion_a, int ion_b) {
  require_ground(reg, ion_b, "pair partner");
  return run_steps(std::move(reg), fourier_pair_encoder(ion_a, ion_b));
}

StateVector encode_fourier_pair(Complex c0, Complex c1, int ion_a, int ion_b, StateVector reg) {
  // c0|0> - c1|1> turns into c0|~0> + c1|~1> under the pi/2 pulse.
  const int a[] = {ion_a};
  reg = load_logical(std::move(reg), a, LogicalState({c0, -c1}));
  return encode_fourier_pair_in_place(std::move(reg), ion_a, ion_b);
}

StateVector decode_fourier_pair(StateVector reg, int ion_a, int ion_b) {
  require_code_space(reg, pair_scheme(ion_a, ion_b));
  reg = apply_cnot(std::move(reg), ion_b, ion_a);
  return apply_pulse(std::move(reg), PulseSpec{-kPi / 2, -kPi / 2, ion_b});
}

Circuit symmetrizer(std::span<const int> data_ions, std::span<const int> partner_ions) {
  if (data_ions.size() != partner_ions.size()) {
    throw ValidationError("symmetrizing needs one partner per data ion");
  }
  Circuit steps;
  for (int p : partner_ions) steps.emplace_back(pi_pulse(p));
  for (std::size_t i = 0; i < data_ions.size(); ++i) {
    steps.emplace_back(CnotSpec{data_ions[i], partner_ions[i]});
  }
  return steps;
}

StateVector symmetrize(StateVector reg, std::span<const int> data_ions,
                       std::span<const int> partner_ions) {
  for (int p : partner_ions) require_ground(reg, p, "symmetrizing partner");
  return run_steps(std::move(reg), symmetrizer(data_ions, partner_ions));
}

StateVector encode_fourier_symmetrized(Complex c0, Complex c1, int ion_a, int ion_b, int ion_c,
                                       int ion_d, StateVector reg) {
  require_ground(reg, ion_c, "symmetrizing partner");
  require_ground(reg, ion_d, "symmetrizing partner");
  reg = encode_fourier_pair(c0, c1, ion_a, ion_b, std::move(reg));
  const int data[] = {ion_a, ion_b};
  const int partners[] = {ion_c, ion_d};
  return symmetrize(std::move(reg), data, partners);
}

Circuit number_state_encoder(std::span<const int> data_ions, int ancilla_x) {
  // The fresh ion reads 0 in every ket before complementing, so the
  // disentangling CNOT has to fire on |0>.
  Circuit steps =
      complement_circuit(data_ions, ancilla_x, data_ions.back(), ControlPolarity::kOnZero);
  steps.emplace_back(ancilla_reset(ancilla_x));
  return steps;
}

StateVector encode_number_state_in_place(StateVector reg, std::span<const int> data_ions,
                                         int ancilla_x) {
  if (data_ions.empty()) throw ValidationError("number-state code needs at least one ion");
  require_ground(reg, data_ions.back(), "fresh");
  require_ground(reg, ancilla_x, "ancilla");
  reg = complement_register(std::move(reg), data_ions, ancilla_x, data_ions.back(),
                            ControlPolarity::kOnZero);
  return apply_pulse(std::move(reg), ancilla_reset(ancilla_x));
}

StateVector encode_number_state(const LogicalState& logical, std::span<const int> data_ions,
                                int ancilla_x, StateVector reg) {
  if (data_ions.empty()) throw ValidationError("number-state code needs at least one ion");
  require_ground(reg, data_ions.back(), "fresh");
  reg = load_logical(std::move(reg), data_ions.first(data_ions.size() - 1), logical);
  return encode_number_state_in_place(std::move(reg), data_ions, ancilla_x);
}

LogicalState decode_number_state(const StateVector& reg, std::span<const int> data_ions,
                                 int ancilla_x) {
  CodeScheme scheme;
  scheme.kind = CodeKind::kNumberState;
  scheme.data_ions.assign(data_ions.begin(), data_ions.end());
  scheme.ancilla = ancilla_x;
  require_code_space(reg, scheme);
  const Circuit undo = inverse_circuit(number_state_encoder(data_ions, ancilla_x));
  const StateVector plain = run_steps(reg, undo);
  return read_logical(plain, data_ions.first(data_ions.size() - 1));
}

StateVector encode_number_symmetrized(const LogicalState& logical, std::span<const int> data_ions,
                                      std::span<const int> partner_ions, int ancilla_x,
                                      StateVector reg) {
  for (int p : partner_ions) require_ground(reg, p, "symmetrizing partner");
  reg = encode_number_state(logical, data_ions, ancilla_x, std::move(reg));
  return symmetrize(std::move(reg), data_ions, partner_ions);
}

StateVector encode(const CodeScheme& scheme, const LogicalState& logical) {
  return encode(scheme, logical, StateVector(scheme.register_size()));
}

StateVector encode(const CodeScheme& scheme, const LogicalState& logical, StateVector reg) {
  scheme.validate(reg.n_ions());
  if (logical.n_qubits() != scheme.n_logical()) {
    throw ValidationError(to_string(scheme.kind) + " scheme stores " +
                          std::to_string(scheme.n_logical()) + " logical qubits, got " +
                          std::to_string(logical.n_qubits()));
  }
  const auto& d = scheme.data_ions;
  const auto& p = scheme.partner_ions;
  switch (scheme.kind) {
    case CodeKind::kFourierPair:
      return encode_fourier_pair(logical[0], logical[1], d[0], d[1], std::move(reg));
    case CodeKind::kFourierSymmetrized:
      return encode_fourier_symmetrized(logical[0], logical[1], d[0], d[1], p[0], p[1],
                                        std::move(reg));
    case CodeKind::kNumberState:
      return encode_number_state(logical, d, *scheme.ancilla, std::move(reg));
    case CodeKind::kNumberStateSymmetrized:
      return encode_number_symmetrized(logical, d, p, *scheme.ancilla, std::move(reg));
  }
  throw ValidationError("unknown code kind");
}

LogicalState decode(const CodeScheme& scheme, const StateVector& reg) {
  scheme.validate(reg.n_ions());
  require_code_space(reg, scheme);
  const auto& d = scheme.data_ions;
  const auto& p = scheme.partner_ions;
  switch (scheme.kind) {
    case CodeKind::kFourierPair:
    case CodeKind::kFourierSymmetrized: {
      StateVector r = reg;
      if (scheme.kind == CodeKind::kFourierSymmetrized) {
        r = run_steps(std::move(r), inverse_circuit(symmetrizer(d, p)));
      }
      r = decode_fourier_pair(std::move(r), d[0], d[1]);
      const int a[] = {d[0]};
      return tilde_amplitudes(read_logical(r, a));
    }
    case CodeKind::kNumberState:
      return decode_number_state(reg, d, *scheme.ancilla);
    case CodeKind::kNumberStateSymmetrized: {
      StateVector r = run_steps(reg, inverse_circuit(symmetrizer(d, p)));
      return decode_number_state(r, d, *scheme.ancilla);
    }
  }
  throw ValidationError("unknown code kind");
}

double projection_deficit(const StateVector& reg, const CodeScheme& scheme) {
  // Code space: amplitude(k) = amplitude(complement of k on the codeword ions),
  // partner[i] = NOT data[i] where partners exist, ancilla in |0>. All three
  // projectors commute, so their product is the code-space projector.
  const std::uint64_t flip = mask_of(scheme.codeword_ions());
  const std::uint64_t anc = scheme.ancilla ? ion_mask(*scheme.ancilla) : 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  for (std::size_t i = 0; i < scheme.partner_ions.size(); ++i) {
    pairs.emplace_back(ion_mask(scheme.data_ions[i]), ion_mask(scheme.partner_ions[i]));
  }
  double kept = 0.0;
  for (std::uint64_t k = 0; k < reg.dim(); ++k) {
    if (k & anc) continue;
    const std::uint64_t kc = k ^ flip;
    if (kc < k) continue;
    bool ok = true;
    for (const auto& [dm, pm] : pairs) {
      if (((k & dm) != 0) == ((k & pm) != 0)) {
        ok = false;
        break;
      }
    }
    if (ok) kept += 0.5 * std::norm(reg[k] + reg[kc]);
  }
  return std::max(0.0, reg.norm_squared() - kept);
}

CodewordReport codeword_report(const StateVector& reg, const CodeScheme& scheme) {
  scheme.validate(reg.n_ions());
  CodewordReport report;
  report.projection_deficit = projection_deficit(reg, scheme);
  report.in_code_space = report.projection_deficit < kCodeSpaceTolerance;
  const std::uint64_t ions = mask_of(scheme.codeword_ions());
  for (std::uint64_t k = 0; k < reg.dim(); ++k) {
    if (std::norm(reg[k]) > 1e-20) report.excitation_weights.insert(hamming_weight(k & ions));
  }
  return report;
}

}  // namespace ionqec
