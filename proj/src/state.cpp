#include "ionqec/state.hpp"

#include <cmath>
#include <string>

#include "ionqec/errors.hpp"

namespace ionqec {

namespace {

void check_register_size(int n_ions) {
  if (n_ions < 1) {
    throw ValidationError("register needs at least one ion, got " + std::to_string(n_ions));
  }
  if (n_ions > kMaxIons) {
    throw SizeError("register of " + std::to_string(n_ions) + " ions exceeds the " +
                    std::to_string(kMaxIons) + "-ion limit");
  }
}

}  // namespace

BasisIndex::BasisIndex(std::uint64_t value, int n_ions) : value_(value), n_ions_(n_ions) {
  check_register_size(n_ions);
  if (value >= (std::uint64_t{1} << n_ions)) {
    throw IndexError("basis index " + std::to_string(value) + " out of range for " +
                     std::to_string(n_ions) + " ions");
  }
}

BasisIndex BasisIndex::complement() const {
  const std::uint64_t all = (std::uint64_t{1} << n_ions_) - 1;
  return BasisIndex(all - value_, n_ions_);
}

int BasisIndex::bit(int ion) const {
  if (ion < 1 || ion > n_ions_) throw IndexError("ion " + std::to_string(ion) + " out of range");
  return static_cast<int>((value_ >> (ion - 1)) & 1U);
}

std::string BasisIndex::bit_string() const {
  std::string out;
  out.reserve(n_ions_);
  for (int ion = n_ions_; ion >= 1; --ion) out.push_back(bit(ion) ? '1' : '0');
  return out;
}

StateVector::StateVector(int n_ions) : n_ions_(n_ions) {
  check_register_size(n_ions);
  amplitudes_.assign(std::size_t{1} << n_ions, Complex{0.0, 0.0});
  amplitudes_[0] = 1.0;
}

StateVector::StateVector(int n_ions, std::vector<Complex> amplitudes)
    : n_ions_(n_ions), amplitudes_(std::move(amplitudes)) {
  check_register_size(n_ions);
  if (amplitudes_.size() != (std::size_t{1} << n_ions)) {
    throw ValidationError("expected " + std::to_string(std::size_t{1} << n_ions) +
                          " amplitudes, got " + std::to_string(amplitudes_.size()));
  }
}

double StateVector::norm_squared() const {
  double total = 0.0;
  for (const auto& a : amplitudes_) total += std::norm(a);
  return total;
}

StateVector StateVector::normalized() const {
  const double n2 = norm_squared();
  if (n2 < 1e-300) throw AnnihilationError("cannot normalize a zero state");
  StateVector out = *this;
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& a : out.amplitudes_) a *= scale;
  return out;
}

double StateVector::excited_population(int ion) const {
  check_ion(ion);
  const std::uint64_t mask = ion_mask(ion);
  double p = 0.0;
  for (std::size_t k = 0; k < amplitudes_.size(); ++k) {
    if (k & mask) p += std::norm(amplitudes_[k]);
  }
  return p;
}

void StateVector::check_ion(int ion) const {
  if (ion < 1 || ion > n_ions_) {
    throw IndexError("ion " + std::to_string(ion) + " out of range 1.." + std::to_string(n_ions_));
  }
}

DensityMatrix::DensityMatrix(int n_ions) : n_ions_(n_ions) {
  check_register_size(n_ions);
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_ions);
  entries_ = Eigen::MatrixXcd::Zero(d, d);
  entries_(0, 0) = 1.0;
}

DensityMatrix::DensityMatrix(int n_ions, Eigen::MatrixXcd entries)
    : n_ions_(n_ions), entries_(std::move(entries)) {
  check_register_size(n_ions);
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_ions);
  if (entries_.rows() != d || entries_.cols() != d) {
    throw ValidationError("density matrix shape does not match " + std::to_string(n_ions) + " ions");
  }
}

double DensityMatrix::trace() const { return entries_.trace().real(); }

void DensityMatrix::validate(double hermitian_tol, double trace_tol, double eigen_tol) const {
  const double asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > hermitian_tol) {
    throw ValidationError("density matrix not Hermitian (deviation " + std::to_string(asym) + ")");
  }
  if (std::abs(entries_.trace() - Complex{1.0, 0.0}) > trace_tol) {
    throw ValidationError("density matrix trace " + std::to_string(trace()) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -eigen_tol) {
    throw ValidationError("density matrix has a negative eigenvalue");
  }
}

StateVector basis_state(int n_ions, BasisIndex k) {
  if (k.n_ions() != n_ions) throw ValidationError("basis index built for a different register");
  StateVector s(n_ions);
  s[0] = 0.0;
  s[k.value()] = 1.0;
  return s;
}

StateVector basis_state(int n_ions, std::uint64_t k) { return basis_state(n_ions, BasisIndex(k, n_ions)); }

bool is_unitary(const Matrix2& u, double tol) {
  return ((u.adjoint() * u) - Matrix2::Identity()).cwiseAbs().maxCoeff() <= tol;
}

namespace {

void apply_matrix_in_place(StateVector& state, int ion, const Matrix2& m) {
  const std::uint64_t mask = ion_mask(ion);
  for (std::size_t k = 0; k < state.dim(); ++k) {
    if (k & mask) continue;
    const Complex a0 = state[k];
    const Complex a1 = state[k | mask];
    state[k] = m(0, 0) * a0 + m(0, 1) * a1;
    state[k | mask] = m(1, 0) * a0 + m(1, 1) * a1;
  }
}

}  // namespace

StateVector apply_single_ion(StateVector state, int ion, const Matrix2& u) {
  state.check_ion(ion);
  if (!is_unitary(u)) throw ValidationError("single-ion operator is not unitary");
  apply_matrix_in_place(state, ion, u);
  return state;
}

NonunitaryResult apply_nonunitary_single_ion(StateVector state, int ion, const Matrix2& m) {
  state.check_ion(ion);
  apply_matrix_in_place(state, ion, m);
  const double n2 = state.norm_squared();
  if (n2 < 1e-300) {
    throw AnnihilationError("operator on ion " + std::to_string(ion) + " annihilates the state");
  }
  return {std::move(state), n2};
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (a.n_ions() != b.n_ions()) throw ValidationError("fidelity between registers of different size");
  Complex total{0.0, 0.0};
  for (std::size_t k = 0; k < a.dim(); ++k) total += std::conj(a[k]) * b[k];
  return total;
}

double fidelity(const StateVector& a, const StateVector& b) {
  const double f = std::norm(inner_product(a, b));
  return f > 1.0 ? 1.0 : f;
}

DensityMatrix pure_to_density(const StateVector& s) {
  Eigen::Map<const Eigen::VectorXcd> v(s.amplitudes().data(), static_cast<Eigen::Index>(s.dim()));
  return DensityMatrix(s.n_ions(), v * v.adjoint());
}

DensityMatrix mix(std::span<const std::pair<double, StateVector>> states) {
  if (states.empty()) throw ValidationError("mixture needs at least one state");
  const int n = states.front().second.n_ions();
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  double weight_sum = 0.0;
  for (const auto& [w, s] : states) {
    if (w < 0.0) throw ValidationError("negative mixture weight");
    if (s.n_ions() != n) throw ValidationError("mixture of registers with different sizes");
    weight_sum += w;
    Eigen::Map<const Eigen::VectorXcd> v(s.amplitudes().data(), d);
    rho += w * (v * v.adjoint());
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    throw ValidationError("mixture weights sum to " + std::to_string(weight_sum));
  }
  return DensityMatrix(n, std::move(rho));
}

StateVector random_state(int n_ions, Rng& rng) {
  std::normal_distribution<double> gauss;
  std::vector<Complex> amps(std::size_t{1} << n_ions);
  for (auto& a : amps) a = {gauss(rng), gauss(rng)};
  return StateVector(n_ions, std::move(amps)).normalized();
}

Matrix2 lowering_operator() {
  Matrix2 m = Matrix2::Zero();
  m(0, 1) = 1.0;
  return m;
}

nlohmann::json state_to_json(const StateVector& s) {
  nlohmann::json amps = nlohmann::json::array();
  for (const auto& a : s.amplitudes()) amps.push_back({a.real(), a.imag()});
  return {{"n_ions", s.n_ions()}, {"amplitudes", std::move(amps)}};
}

StateVector state_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n_ions").get<int>();
    std::vector<Complex> amps;
    for (const auto& pair : j.at("amplitudes")) {
      if (!pair.is_array() || pair.size() != 2) throw ValidationError("amplitude must be [re, im]");
      amps.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return StateVector(n, std::move(amps));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad state snapshot: ") + e.what());
  }
}

}  // namespace ionqec
