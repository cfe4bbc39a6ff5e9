#pragma once

// Dense pure and mixed states over registers of two-level ions.
//
// Bit ordering: ion j (1-based) occupies bit j-1 of the basis index, so the
// index of a product state is k = S_N*2^(N-1) + ... + S_1*2^0.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "ionqec/random.hpp"

namespace ionqec {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr int kMaxIons = 14;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kUnitaryTolerance = 1e-10;

inline constexpr std::uint64_t ion_mask(int ion) { return std::uint64_t{1} << (ion - 1); }

inline int hamming_weight(std::uint64_t k) { return __builtin_popcountll(k); }

class BasisIndex {
 public:
  BasisIndex(std::uint64_t value, int n_ions);

  std::uint64_t value() const { return value_; }
  int n_ions() const { return n_ions_; }

  BasisIndex complement() const;
  // Bit S_ion of this index.
  int bit(int ion) const;
  // Bits written S_N ... S_1, most significant ion first.
  std::string bit_string() const;

  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;

 private:
  std::uint64_t value_;
  int n_ions_;
};

class StateVector {
 public:
  // |0...0> on n_ions.
  explicit StateVector(int n_ions);
  StateVector(int n_ions, std::vector<Complex> amplitudes);

  int n_ions() const { return n_ions_; }
  std::size_t dim() const { return amplitudes_.size(); }

  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> amplitudes() { return amplitudes_; }
  const Complex& operator[](std::size_t k) const { return amplitudes_[k]; }
  Complex& operator[](std::size_t k) { return amplitudes_[k]; }

  double norm_squared() const;
  StateVector normalized() const;

  // Probability that the given ion is found in |1>.
  double excited_population(int ion) const;

  void check_ion(int ion) const;

 private:
  int n_ions_;
  std::vector<Complex> amplitudes_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(int n_ions);
  DensityMatrix(int n_ions, Eigen::MatrixXcd entries);

  int n_ions() const { return n_ions_; }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  Complex operator()(std::size_t row, std::size_t col) const { return entries_(row, col); }

  double trace() const;
  // Throws ValidationError unless Hermitian, unit trace and positive semidefinite.
  void validate(double hermitian_tol = 1e-12, double trace_tol = 1e-12,
                double eigen_tol = 1e-10) const;

 private:
  int n_ions_;
  Eigen::MatrixXcd entries_;
};

StateVector basis_state(int n_ions, BasisIndex k);
StateVector basis_state(int n_ions, std::uint64_t k);

bool is_unitary(const Matrix2& u, double tol = kUnitaryTolerance);

StateVector apply_single_ion(StateVector state, int ion, const Matrix2& u);

struct NonunitaryResult {
  StateVector state;  // not renormalized
  double norm_squared;
};

NonunitaryResult apply_nonunitary_single_ion(StateVector state, int ion, const Matrix2& m);

Complex inner_product(const StateVector& a, const StateVector& b);
double fidelity(const StateVector& a, const StateVector& b);

DensityMatrix pure_to_density(const StateVector& s);
DensityMatrix mix(std::span<const std::pair<double, StateVector>> states);

// Haar-distributed pure state (normalized complex Gaussian vector).
StateVector random_state(int n_ions, Rng& rng);

// Lowering operator |0><1|.
Matrix2 lowering_operator();

nlohmann::json state_to_json(const StateVector& s);
StateVector state_from_json(const nlohmann::json& j);

}  // namespace ionqec
