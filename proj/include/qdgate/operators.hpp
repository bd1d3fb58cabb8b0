#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdgate/errors.hpp"
#include "qdgate/linalg.hpp"
#include "qdgate/units.hpp"

namespace qdgate {

/// An ordered list of unique level labels. Index order is part of the
/// contract: every test vector and CSV column order depends on it.
class Basis {
 public:
  Basis() = default;
  Basis(std::string name, std::vector<std::string> labels);

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }

  /// Throws UnknownLabel.
  std::size_t index(std::string_view label) const;
  bool contains(std::string_view label) const noexcept;

  /// Dimensions of the tensor factors; a single entry for an unfactored basis.
  const std::vector<std::size_t>& factor_dims() const noexcept { return factor_dims_; }

  friend bool operator==(const Basis& a, const Basis& b) { return a.labels_ == b.labels_; }

 private:
  friend Basis product(const Basis& a, const Basis& b);

  std::string name_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> factor_dims_;
};

/// Product basis, dot-A major: (i_a, i_b) -> i_a * dim(b) + i_b, labels concatenated.
Basis product(const Basis& a, const Basis& b);

namespace bases {
/// |0⟩=0, |1⟩=1, |X⟩=2.
const Basis& single_dot();
/// Λ-system dot for Raman rotations: |0⟩, |1⟩, light-hole trion |e⟩, decay sink |s⟩.
const Basis& lambda_dot();
/// single_dot ⊗ single_dot: 00,01,0X,10,11,1X,X0,X1,XX.
const Basis& two_dot();
/// {|11⟩, |1X⟩, |X1⟩, |XX⟩}, the raw doubly-spin-up block.
const Basis& up_up_block();
/// {|11⟩, |ψ₊⟩, |ψ₋⟩, |XX⟩} with ψ± = (|1X⟩ ± |X1⟩)/√2.
const Basis& psi_subspace();
/// {|01⟩, |0X⟩}: dot B driven, dot A blocked.
const Basis& spectator_b();
/// {|10⟩, |X0⟩}: dot A driven, dot B blocked.
const Basis& spectator_a();
/// {|00⟩}.
const Basis& blocked();
}  // namespace bases

/// Reference frame of a matrix or state.
struct Frame {
  enum class Kind { Lab, Rotating };
  Kind kind = Kind::Lab;
  /// Carrier energy of the rotating frame (meV); zero in the lab frame.
  double omega_l = 0.0;

  static Frame lab() { return {}; }
  static Frame rotating(double omega_l) { return {Kind::Rotating, omega_l}; }
  friend bool operator==(const Frame&, const Frame&) = default;
};

enum class OperatorKind { Hamiltonian, Propagator, Generic };

/// Relative Hermiticity tolerance applied to Hamiltonian-tagged operators.
inline constexpr double kHermitianTol = 1e-12;

/// Dense square complex matrix tagged with basis and frame. Immutable.
class Operator {
 public:
  /// Validates shape against the basis; Hamiltonian-tagged matrices must be Hermitian.
  Operator(MatrixXc matrix, Basis basis, Frame frame = Frame::lab(),
           OperatorKind kind = OperatorKind::Generic);

  static Operator zero(const Basis& basis, Frame frame = Frame::lab(),
                       OperatorKind kind = OperatorKind::Generic);
  static Operator identity(const Basis& basis, Frame frame = Frame::lab());

  const MatrixXc& matrix() const noexcept { return m_; }
  const Basis& basis() const noexcept { return basis_; }
  const Frame& frame() const noexcept { return frame_; }
  OperatorKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return basis_.dim(); }

  Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  /// ⟨ket|O|bra⟩ looked up by label.
  Complex element(std::string_view ket, std::string_view bra) const;

  Operator adjoint() const;
  Operator with_kind(OperatorKind kind) const { return {m_, basis_, frame_, kind}; }

 private:
  MatrixXc m_;
  Basis basis_;
  Frame frame_;
  OperatorKind kind_;
};

/// Sum of two operators on the same basis and frame; keeps the kind if both agree.
Operator operator+(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex s, const Operator& a);

/// Pure state. Norm is not enforced at construction; builders produce unit norm.
class QuantumState {
 public:
  QuantumState(VectorXc amplitudes, Basis basis, Frame frame = Frame::lab());

  /// Unit vector on one basis label.
  static QuantumState basis_state(const Basis& basis, std::string_view label,
                                  Frame frame = Frame::lab());

  const VectorXc& amplitudes() const noexcept { return amps_; }
  const Basis& basis() const noexcept { return basis_; }
  const Frame& frame() const noexcept { return frame_; }

  Complex amplitude(std::string_view label) const { return amps_(basis_.index(label)); }
  double population(std::string_view label) const { return std::norm(amplitude(label)); }
  double norm() const { return amps_.norm(); }

 private:
  VectorXc amps_;
  Basis basis_;
  Frame frame_;
};

/// Mixed state. Construction checks Hermiticity, unit trace (1e−9) and
/// eigenvalues ≥ −1e−9.
class DensityMatrix {
 public:
  DensityMatrix(MatrixXc rho, Basis basis, Frame frame = Frame::lab());
  static DensityMatrix from_pure(const QuantumState& psi);

  const MatrixXc& matrix() const noexcept { return rho_; }
  const Basis& basis() const noexcept { return basis_; }
  const Frame& frame() const noexcept { return frame_; }
  double population(std::string_view label) const;

 private:
  MatrixXc rho_;
  Basis basis_;
  Frame frame_;
};

/// a ⊗ b. Both operands must live on the same single-factor basis and frame.
Operator tensor(const Operator& a, const Operator& b);

/// |ket⟩⟨bra| on the given basis. Throws UnknownLabel.
Operator projector(const Basis& basis, std::string_view ket, std::string_view bra,
                   Frame frame = Frame::lab());

/// u†·op·u. The columns of u are the new basis vectors written in op's basis,
/// so the result is tagged with u's basis. Throws BasisMismatch if u is not
/// unitary to 1e−10 or its dimension differs.
Operator basis_change(const Operator& op, const Operator& u);

/// exp(−i·h·dt/ħ) as a Propagator-tagged operator. h must be Hermitian.
Operator matrix_exponential(const Operator& h, double dt);

/// Submatrix of op on the listed labels (in that order), tagged with `sub`.
Operator restrict_to(const Operator& op, const Basis& sub);

/// Embeds the amplitudes of a state on a subspace basis into a larger basis.
QuantumState embed(const QuantumState& psi, const Basis& target);

}  // namespace qdgate
