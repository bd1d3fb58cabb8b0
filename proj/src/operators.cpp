#include "qdgate/operators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace qdgate {

Basis::Basis(std::string name, std::vector<std::string> labels)
    : name_(std::move(name)), labels_(std::move(labels)), factor_dims_{labels_.size()} {
  std::set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size())
    throw std::invalid_argument("basis '" + name_ + "' has duplicate labels");
}

std::size_t Basis::index(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw UnknownLabel(std::string(label));
  return static_cast<std::size_t>(it - labels_.begin());
}

bool Basis::contains(std::string_view label) const noexcept {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

Basis product(const Basis& a, const Basis& b) {
  std::vector<std::string> labels;
  labels.reserve(a.dim() * b.dim());
  for (const auto& la : a.labels())
    for (const auto& lb : b.labels()) labels.push_back(la + lb);
  Basis out(a.name() + "⊗" + b.name(), std::move(labels));
  out.factor_dims_ = a.factor_dims_;
  out.factor_dims_.insert(out.factor_dims_.end(), b.factor_dims_.begin(), b.factor_dims_.end());
  return out;
}

namespace bases {

const Basis& single_dot() {
  static const Basis b("dot", {"0", "1", "X"});
  return b;
}

const Basis& lambda_dot() {
  static const Basis b("lambda", {"0", "1", "e", "s"});
  return b;
}

const Basis& two_dot() {
  static const Basis b = product(single_dot(), single_dot());
  return b;
}

const Basis& up_up_block() {
  static const Basis b("up-up", {"11", "1X", "X1", "XX"});
  return b;
}

const Basis& psi_subspace() {
  static const Basis b("psi", {"11", "psi_p", "psi_m", "XX"});
  return b;
}

const Basis& spectator_b() {
  static const Basis b("spectator-01", {"01", "0X"});
  return b;
}

const Basis& spectator_a() {
  static const Basis b("spectator-10", {"10", "X0"});
  return b;
}

const Basis& blocked() {
  static const Basis b("blocked-00", {"00"});
  return b;
}

}  // namespace bases

Operator::Operator(MatrixXc matrix, Basis basis, Frame frame, OperatorKind kind)
    : m_(std::move(matrix)), basis_(std::move(basis)), frame_(frame), kind_(kind) {
  if (m_.rows() != m_.cols())
    throw std::invalid_argument("operator matrix must be square");
  if (static_cast<std::size_t>(m_.rows()) != basis_.dim())
    throw BasisMismatch("operator dimension " + std::to_string(m_.rows()) +
                        " does not match basis '" + basis_.name() + "' of dimension " +
                        std::to_string(basis_.dim()));
  if (!m_.allFinite()) throw std::invalid_argument("operator has non-finite entries");
  if (kind_ == OperatorKind::Hamiltonian && !is_hermitian(m_, kHermitianTol))
    throw std::invalid_argument("Hamiltonian on basis '" + basis_.name() + "' is not Hermitian");
}

Operator Operator::zero(const Basis& basis, Frame frame, OperatorKind kind) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  return {MatrixXc::Zero(n, n), basis, frame, kind};
}

Operator Operator::identity(const Basis& basis, Frame frame) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  return {MatrixXc::Identity(n, n), basis, frame, OperatorKind::Generic};
}

Complex Operator::element(std::string_view ket, std::string_view bra) const {
  return m_(basis_.index(ket), basis_.index(bra));
}

Operator Operator::adjoint() const { return {m_.adjoint(), basis_, frame_, kind_}; }

namespace {

void require_same_space(const Operator& a, const Operator& b, const char* what) {
  if (!(a.basis() == b.basis()))
    throw BasisMismatch(std::string(what) + ": basis '" + a.basis().name() + "' vs '" +
                        b.basis().name() + "'");
  if (!(a.frame() == b.frame())) throw BasisMismatch(std::string(what) + ": frame mismatch");
}

}  // namespace

Operator operator+(const Operator& a, const Operator& b) {
  require_same_space(a, b, "operator+");
  const auto kind = a.kind() == b.kind() && a.kind() != OperatorKind::Propagator
                        ? a.kind()
                        : OperatorKind::Generic;
  return {a.matrix() + b.matrix(), a.basis(), a.frame(), kind};
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_space(a, b, "operator*");
  const auto kind = a.kind() == OperatorKind::Propagator && b.kind() == OperatorKind::Propagator
                        ? OperatorKind::Propagator
                        : OperatorKind::Generic;
  return {a.matrix() * b.matrix(), a.basis(), a.frame(), kind};
}

Operator operator*(Complex s, const Operator& a) {
  const auto kind = a.kind() == OperatorKind::Hamiltonian && s.imag() == 0.0
                        ? OperatorKind::Hamiltonian
                        : OperatorKind::Generic;
  return {s * a.matrix(), a.basis(), a.frame(), kind};
}

QuantumState::QuantumState(VectorXc amplitudes, Basis basis, Frame frame)
    : amps_(std::move(amplitudes)), basis_(std::move(basis)), frame_(frame) {
  if (static_cast<std::size_t>(amps_.size()) != basis_.dim())
    throw BasisMismatch("state dimension does not match basis '" + basis_.name() + "'");
}

QuantumState QuantumState::basis_state(const Basis& basis, std::string_view label, Frame frame) {
  VectorXc v = VectorXc::Zero(static_cast<Eigen::Index>(basis.dim()));
  v(basis.index(label)) = 1.0;
  return {std::move(v), basis, frame};
}

DensityMatrix::DensityMatrix(MatrixXc rho, Basis basis, Frame frame)
    : rho_(std::move(rho)), basis_(std::move(basis)), frame_(frame) {
  if (rho_.rows() != rho_.cols() || static_cast<std::size_t>(rho_.rows()) != basis_.dim())
    throw BasisMismatch("density matrix shape does not match basis '" + basis_.name() + "'");
  if (max_abs(rho_ - rho_.adjoint()) > 1e-9)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - Complex(1.0)) > 1e-9)
    throw std::invalid_argument("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<MatrixXc> eig(rho_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9)
    throw std::invalid_argument("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const QuantumState& psi) {
  const VectorXc& a = psi.amplitudes();
  return {a * a.adjoint(), psi.basis(), psi.frame()};
}

double DensityMatrix::population(std::string_view label) const {
  const auto i = basis_.index(label);
  return rho_(i, i).real();
}

Operator tensor(const Operator& a, const Operator& b) {
  if (a.basis().factor_dims().size() != 1 || b.basis().factor_dims().size() != 1)
    throw BasisMismatch("tensor: operands must be single-dot operators");
  require_same_space(a, b, "tensor");
  const auto kind = a.kind() == OperatorKind::Propagator && b.kind() == OperatorKind::Propagator
                        ? OperatorKind::Propagator
                        : OperatorKind::Generic;
  return {kron(a.matrix(), b.matrix()), product(a.basis(), b.basis()), a.frame(), kind};
}

Operator projector(const Basis& basis, std::string_view ket, std::string_view bra, Frame frame) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  MatrixXc m = MatrixXc::Zero(n, n);
  m(basis.index(ket), basis.index(bra)) = 1.0;
  return {std::move(m), basis, frame};
}

Operator basis_change(const Operator& op, const Operator& u) {
  if (u.dim() != op.dim())
    throw BasisMismatch("basis_change: rotation dimension differs from operator");
  if (!is_unitary(u.matrix(), 1e-10)) throw BasisMismatch("basis_change: rotation is not unitary");
  MatrixXc m = u.matrix().adjoint() * op.matrix() * u.matrix();
  if (op.kind() == OperatorKind::Hamiltonian) m = 0.5 * (m + m.adjoint()).eval();
  return {std::move(m), u.basis(), op.frame(), op.kind()};
}

Operator matrix_exponential(const Operator& h, double dt) {
  if (!std::isfinite(dt)) throw std::invalid_argument("matrix_exponential: non-finite dt");
  if (!is_hermitian(h.matrix(), kHermitianTol))
    throw std::invalid_argument("matrix_exponential: input is not Hermitian");
  return {unitary_exp(h.matrix(), dt, kHbar), h.basis(), h.frame(), OperatorKind::Propagator};
}

Operator restrict_to(const Operator& op, const Basis& sub) {
  const auto n = static_cast<Eigen::Index>(sub.dim());
  std::vector<std::size_t> idx;
  for (const auto& l : sub.labels()) idx.push_back(op.basis().index(l));
  MatrixXc m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = op(idx[i], idx[j]);
  return {std::move(m), sub, op.frame(), op.kind()};
}

QuantumState embed(const QuantumState& psi, const Basis& target) {
  VectorXc v = VectorXc::Zero(static_cast<Eigen::Index>(target.dim()));
  for (std::size_t i = 0; i < psi.basis().dim(); ++i)
    v(target.index(psi.basis().label(i))) = psi.amplitudes()(i);
  return {std::move(v), target, psi.frame()};
}

}  // namespace qdgate
