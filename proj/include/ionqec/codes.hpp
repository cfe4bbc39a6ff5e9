#pragma once

// Codeword families protecting stored qubits against spontaneous emission.
//
//   FourierPair             c0|~0~0> + c1|~1~1> on ions a, b
//   FourierSymmetrized      the pair extended by complementary partners c, d
//   NumberState             sum_k c_k (|k> + |~k>)/sqrt2 over N ions
//   NumberStateSymmetrized  sum_k c_k (|k>|~k> + |~k>|k>)/sqrt2 over N + N ions
//
// Here ~k is the bitwise complement. The symmetrized families have a fixed
// number of excited ions in every basis ket, which makes them invariant under
// the no-jump evolution.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ionqec/gates.hpp"
#include "ionqec/random.hpp"
#include "ionqec/state.hpp"

namespace ionqec {

inline constexpr double kCodeSpaceTolerance = 1e-9;

enum class CodeKind { kFourierPair, kFourierSymmetrized, kNumberState, kNumberStateSymmetrized };

std::string to_string(CodeKind kind);
CodeKind code_kind_from_string(const std::string& name);

/// Which codeword family a register holds and which ion plays which role.
///
/// `data_ions` is the primary codeword set: {a, b} for the Fourier schemes, the N
/// number-state ions for the number-state schemes (the fresh ion that carries
/// no logical information is the last entry). `partner_ions[i]` holds the
/// complement of `data_ions[i]` in the symmetrized schemes. `ancilla` is the
/// complementing ion x.
struct CodeScheme {
  CodeKind kind = CodeKind::kFourierPair;
  std::vector<int> data_ions;
  std::vector<int> partner_ions;
  std::optional<int> ancilla;

  // Default layouts on a register holding exactly this scheme.
  static CodeScheme fourier_pair();
  static CodeScheme fourier_symmetrized();
  static CodeScheme number_state(int n_logical);
  static CodeScheme number_state_symmetrized(int n_logical);
  static CodeScheme standard(CodeKind kind, int n_logical);

  std::vector<int> codeword_ions() const;
  int n_logical() const;
  // Smallest register containing every role.
  int register_size() const;
  bool is_symmetrized() const {
    return kind == CodeKind::kFourierSymmetrized || kind == CodeKind::kNumberStateSymmetrized;
  }
  void validate(int n_ions) const;
};

nlohmann::json scheme_to_json(const CodeScheme& scheme);
CodeScheme scheme_from_json(const nlohmann::json& j);

/// Logical amplitudes c_k over M qubits. For the Fourier schemes the
/// amplitudes are in the |~0>, |~1> basis.
class LogicalState {
 public:
  explicit LogicalState(std::vector<Complex> amplitudes);

  static LogicalState random(int n_qubits, Rng& rng);

  int n_qubits() const { return n_qubits_; }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t k) const { return amplitudes_[k]; }

 private:
  std::vector<Complex> amplitudes_;
  int n_qubits_;
};

double logical_fidelity(const LogicalState& a, const LogicalState& b);

struct CodewordReport {
  bool in_code_space = false;
  std::set<int> excitation_weights;
  double projection_deficit = 1.0;
};

// Writes c_k onto `ions` (ions[0] least significant). The ions must be in |0>.
StateVector load_logical(StateVector reg, std::span<const int> ions, const LogicalState& logical);
// Inverse of load_logical for a register whose other ions are all in |0>.
LogicalState read_logical(const StateVector& reg, std::span<const int> ions);

// Fourier pair. The in-place variant expects ion a to hold c0|0> - c1|1> and b in |0>.
Circuit fourier_pair_encoder(int ion_a, int ion_b);
StateVector encode_fourier_pair_in_place(StateVector reg, int ion_a, int ion_b);
StateVector encode_fourier_pair(Complex c0, Complex c1, int ion_a, int ion_b, StateVector reg);
// Leaves ion b in |0> and ion a in c0|~0> + c1|~1>.
StateVector decode_fourier_pair(StateVector reg, int ion_a, int ion_b);

// Complementary extension: partners prepared in |1>, then CNOT data[i] -> partner[i].
Circuit symmetrizer(std::span<const int> data_ions, std::span<const int> partner_ions);
StateVector symmetrize(StateVector reg, std::span<const int> data_ions,
                       std::span<const int> partner_ions);

StateVector encode_fourier_symmetrized(Complex c0, Complex c1, int ion_a, int ion_b, int ion_c,
                                       int ion_d, StateVector reg);

/// Complementing encoder for the number-state code. The logical state occupies
/// all but the last of `data_ions`; the last one is the fresh ion in |0>.
Circuit number_state_encoder(std::span<const int> data_ions, int ancilla_x);
StateVector encode_number_state_in_place(StateVector reg, std::span<const int> data_ions,
                                         int ancilla_x);
StateVector encode_number_state(const LogicalState& logical, std::span<const int> data_ions,
                                int ancilla_x, StateVector reg);
LogicalState decode_number_state(const StateVector& reg, std::span<const int> data_ions,
                                 int ancilla_x);

StateVector encode_number_symmetrized(const LogicalState& logical, std::span<const int> data_ions,
                                      std::span<const int> partner_ions, int ancilla_x,
                                      StateVector reg);

// Scheme-level entry points on a fresh register of scheme.register_size() ions.
StateVector encode(const CodeScheme& scheme, const LogicalState& logical);
StateVector encode(const CodeScheme& scheme, const LogicalState& logical, StateVector reg);
LogicalState decode(const CodeScheme& scheme, const StateVector& reg);

// 1 - <psi|P|psi> for the projector P onto the scheme's code space.
double projection_deficit(const StateVector& reg, const CodeScheme& scheme);
CodewordReport codeword_report(const StateVector& reg, const CodeScheme& scheme);

}  // namespace ionqec
