#pragma once

// Scalar-generic dense helpers over Eigen expressions. Everything here works
// on any MatrixBase, so callers can pass blocks, maps or lazy products.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <complex>
#include <type_traits>

namespace qdgate {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXc = MatrixX<std::complex<double>>;
using VectorXc = VectorX<std::complex<double>>;

/// Kronecker product a ⊗ b with row-major-by-factor index order:
/// (i_a, i_b) maps to i_a * rows(b) + i_b.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                     typename DerivedB::Scalar>::ReturnType;
  MatrixX<Scalar> out = Eigen::kroneckerProduct(a.derived().template cast<Scalar>().eval(),
                                                b.derived().template cast<Scalar>().eval());
  return out;
}

/// Largest absolute entry, or zero for an empty matrix.
template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().maxCoeff();
}

/// Hermiticity relative to the largest entry; an all-zero matrix is Hermitian.
template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, typename Derived::RealScalar rel_tol) {
  if (m.rows() != m.cols()) return false;
  const auto scale = std::max<typename Derived::RealScalar>(max_abs(m), 1e-300);
  return max_abs(m - m.adjoint()) <= rel_tol * scale;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, typename Derived::RealScalar tol) {
  if (u.rows() != u.cols()) return false;
  using Scalar = typename Derived::Scalar;
  const auto id = MatrixX<Scalar>::Identity(u.rows(), u.cols());
  return max_abs(u.adjoint() * u - id) <= tol;
}

template <typename DerivedA, typename DerivedB>
auto commutator(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return (a * b - b * a).eval();
}

template <typename DerivedA, typename DerivedB>
auto anticommutator(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return (a * b + b * a).eval();
}

/// Lindblad dissipator D[L]ρ = LρL† − ½{L†L, ρ}.
template <typename DerivedL, typename DerivedR>
auto dissipator(const Eigen::MatrixBase<DerivedL>& l, const Eigen::MatrixBase<DerivedR>& rho) {
  const auto ldl = (l.adjoint() * l).eval();
  return (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl)).eval();
}

/// exp(−i·H·dt/ħ) for Hermitian H through its spectral decomposition.
template <typename Derived>
auto unitary_exp(const Eigen::MatrixBase<Derived>& h, typename Derived::RealScalar dt,
                 typename Derived::RealScalar hbar) {
  using Real = typename Derived::RealScalar;
  using C = std::complex<Real>;
  Eigen::SelfAdjointEigenSolver<MatrixX<C>> eig(h.derived().template cast<C>());
  VectorX<C> phases(eig.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k)
    phases(k) = std::exp(C(0, -eig.eigenvalues()(k) * dt / hbar));
  MatrixX<C> out = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
  return out;
}

}  // namespace qdgate
