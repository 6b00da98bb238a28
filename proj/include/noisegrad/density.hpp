// Copyright 2026 The noisegrad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace noisegrad {

/// Generator of an encoded single-qubit rotation.
enum class PauliAxis : std::uint8_t { X, Y, Z };

/// Single-qubit Pauli letter, including the identity.
enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(PauliAxis axis);
char to_char(Pauli p);
PauliAxis parse_axis(char c);
Pauli parse_pauli(char c);

template <typename Scalar>
using DensityMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
using DensityMatrixd = DensityMatrix<double>;

template <typename Scalar>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

/// Qubit q is stored at bit (n - 1 - q) of a basis index, so that qubit 0 is
/// the leftmost tensor factor.
inline Eigen::Index qubit_mask(int n, int qubit) {
  return Eigen::Index{1} << (n - 1 - qubit);
}

template <typename Derived>
int qubit_count(const Eigen::MatrixBase<Derived>& rho) {
  const auto dim = static_cast<std::uint64_t>(rho.rows());
  if (rho.rows() != rho.cols() || dim == 0 || !std::has_single_bit(dim)) {
    throw std::invalid_argument("density matrix must be square with power-of-two dimension");
  }
  return std::countr_zero(dim);
}

inline void check_qubit(int qubit, int n) {
  if (qubit < 0 || qubit >= n) {
    throw std::out_of_range("qubit index " + std::to_string(qubit) + " outside [0, " +
                            std::to_string(n) + ")");
  }
}

template <typename Scalar>
DensityMatrix<Scalar> zero_state(int n) {
  if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
  const Eigen::Index dim = Eigen::Index{1} << n;
  DensityMatrix<Scalar> rho = DensityMatrix<Scalar>::Zero(dim, dim);
  rho(0, 0) = Scalar(1);
  return rho;
}

template <typename Scalar>
DensityMatrix<Scalar> maximally_mixed(int n) {
  if (n < 1) throw std::invalid_argument("qubit count must be >= 1");
  const Eigen::Index dim = Eigen::Index{1} << n;
  return DensityMatrix<Scalar>::Identity(dim, dim) / Scalar(dim);
}

/// Deviation of a matrix from the density-matrix invariants.
struct DensityCheck {
  double hermiticity_error = 0.0;  ///< max |rho - rho^dagger| entrywise
  double trace_error = 0.0;        ///< |tr(rho) - 1|
  double min_eigenvalue = 0.0;

  bool ok(double herm_tol = 1e-12, double trace_tol = 1e-12, double eig_tol = 1e-10) const {
    return hermiticity_error <= herm_tol && trace_error <= trace_tol && min_eigenvalue >= -eig_tol;
  }
};

template <typename Scalar>
DensityCheck check_density(const DensityMatrix<Scalar>& rho) {
  DensityCheck c;
  c.hermiticity_error = static_cast<double>((rho - rho.adjoint()).cwiseAbs().maxCoeff());
  c.trace_error = static_cast<double>(std::abs(rho.trace() - std::complex<Scalar>(1)));
  const DensityMatrix<Scalar> herm = (rho + rho.adjoint()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<DensityMatrix<Scalar>> es(herm, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = static_cast<double>(es.eigenvalues().minCoeff());
  return c;
}

template <typename Scalar>
Scalar purity(const DensityMatrix<Scalar>& rho) {
  return (rho * rho).trace().real();
}

/// rho -> U rho U^dagger for a 2x2 unitary acting on one qubit.
template <typename Scalar>
DensityMatrix<Scalar> apply_single_qubit(DensityMatrix<Scalar> rho, int qubit,
                                         const Matrix2c<Scalar>& u) {
  const int n = qubit_count(rho);
  check_qubit(qubit, n);
  const Eigen::Index mask = qubit_mask(n, qubit);
  const Eigen::Index dim = rho.rows();
  const Matrix2c<Scalar> uc = u.conjugate();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & mask) continue;
    const Eigen::Index j = i | mask;
    const Eigen::Matrix<std::complex<Scalar>, 1, Eigen::Dynamic> r0 = rho.row(i);
    rho.row(i) = u(0, 0) * r0 + u(0, 1) * rho.row(j);
    rho.row(j) = u(1, 0) * r0 + u(1, 1) * rho.row(j);
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & mask) continue;
    const Eigen::Index j = i | mask;
    const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> c0 = rho.col(i);
    rho.col(i) = uc(0, 0) * c0 + uc(0, 1) * rho.col(j);
    rho.col(j) = uc(1, 0) * c0 + uc(1, 1) * rho.col(j);
  }
  return rho;
}

/// exp(-i angle P / 2).
template <typename Scalar>
Matrix2c<Scalar> rotation_matrix(PauliAxis axis, Scalar angle) {
  using C = std::complex<Scalar>;
  const Scalar c = std::cos(angle / 2);
  const Scalar s = std::sin(angle / 2);
  Matrix2c<Scalar> r;
  switch (axis) {
    case PauliAxis::X:
      r << C(c, 0), C(0, -s), C(0, -s), C(c, 0);
      break;
    case PauliAxis::Y:
      r << C(c, 0), C(-s, 0), C(s, 0), C(c, 0);
      break;
    case PauliAxis::Z:
      r << C(c, -s), C(0, 0), C(0, 0), C(c, s);
      break;
  }
  return r;
}

template <typename Scalar>
DensityMatrix<Scalar> apply_rotation(DensityMatrix<Scalar> rho, int qubit, PauliAxis axis,
                                     Scalar angle) {
  return apply_single_qubit(std::move(rho), qubit, rotation_matrix(axis, angle));
}

template <typename Scalar>
DensityMatrix<Scalar> apply_cnot(DensityMatrix<Scalar> rho, int control, int target) {
  const int n = qubit_count(rho);
  check_qubit(control, n);
  check_qubit(target, n);
  if (control == target) throw std::invalid_argument("CNOT control and target must differ");
  const Eigen::Index cmask = qubit_mask(n, control);
  const Eigen::Index tmask = qubit_mask(n, target);
  const Eigen::Index dim = rho.rows();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if ((i & cmask) && !(i & tmask)) rho.row(i).swap(rho.row(i | tmask));
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if ((i & cmask) && !(i & tmask)) rho.col(i).swap(rho.col(i | tmask));
  }
  return rho;
}

/// Tensor product of Pauli letters, one per qubit.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<Pauli> letters);
  static PauliString parse(std::string_view text);

  int size() const { return static_cast<int>(letters_.size()); }
  const std::vector<Pauli>& letters() const { return letters_; }
  Pauli operator[](int q) const { return letters_.at(static_cast<std::size_t>(q)); }
  bool is_identity() const;
  std::string str() const;

  /// Basis bits flipped by the operator (X or Y letters).
  Eigen::Index flip_mask() const;
  /// Basis bits contributing a (-1)^bit sign (Y or Z letters).
  Eigen::Index sign_mask() const;
  int y_count() const;

  bool operator==(const PauliString&) const = default;

 private:
  std::vector<Pauli> letters_;
};

/// Traceless Pauli observable: at least one non-identity letter.
class PauliObservable {
 public:
  explicit PauliObservable(PauliString letters);
  static PauliObservable parse(std::string_view text) { return PauliObservable(PauliString::parse(text)); }
  /// X, Y, Z repeated cyclically over n qubits.
  static PauliObservable cyclic_xyz(int n);

  const PauliString& letters() const { return letters_; }
  int size() const { return letters_.size(); }
  std::string str() const { return letters_.str(); }

 private:
  PauliString letters_;
};

/// Complex trace tr(rho P) for a Pauli string.
template <typename Scalar>
std::complex<Scalar> pauli_trace(const DensityMatrix<Scalar>& rho, const PauliString& p) {
  const int n = qubit_count(rho);
  if (p.size() != n) throw std::invalid_argument("Pauli string size does not match state");
  const Eigen::Index flip = p.flip_mask();
  const Eigen::Index sign = p.sign_mask();
  static constexpr std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::complex<double> ip = kIPow[p.y_count() % 4];
  const std::complex<Scalar> phase(static_cast<Scalar>(ip.real()), static_cast<Scalar>(ip.imag()));
  std::complex<Scalar> acc(0);
  for (Eigen::Index b = 0; b < rho.rows(); ++b) {
    const bool odd = std::popcount(static_cast<std::uint64_t>(b & sign)) & 1;
    const std::complex<Scalar> v = rho(b, b ^ flip);
    acc += odd ? -v : v;
  }
  return phase * acc;
}

/// tr(rho O); the imaginary residue must stay below 1e-10.
template <typename Scalar>
Scalar expectation(const DensityMatrix<Scalar>& rho, const PauliObservable& obs) {
  const std::complex<Scalar> t = pauli_trace(rho, obs.letters());
  if (std::abs(t.imag()) > Scalar(1e-10)) {
    throw std::runtime_error("expectation has non-negligible imaginary part");
  }
  return t.real();
}

}  // namespace noisegrad
