#include <doctest.h>

#include <cmath>

#include "qdgate/model.hpp"
#include "support.hpp"

using namespace qdgate;
using qdgate::test::Rng;

namespace {

Operator dot_op(const MatrixXc& m) { return {m, bases::single_dot()}; }

}  // namespace

TEST_CASE("basis labels and index map") {
  const Basis& b = bases::two_dot();
  REQUIRE(b.dim() == 9);
  const std::vector<std::string> expected{"00", "01", "0X", "10", "11", "1X", "X0", "X1", "XX"};
  CHECK(b.labels() == expected);
  CHECK(b.index("1X") == 5);
  CHECK(b.index("X1") == 7);
  CHECK(b.factor_dims() == std::vector<std::size_t>{3, 3});
  CHECK_THROWS_AS(b.index("2X"), UnknownLabel);
  CHECK_THROWS_AS(Basis("dup", {"a", "a"}), std::invalid_argument);
}

TEST_CASE("tensor of identities") {
  const Operator id = Operator::identity(bases::single_dot());
  const Operator id9 = tensor(id, id);
  CHECK(id9.basis() == bases::two_dot());
  CHECK(max_abs(id9.matrix() - MatrixXc::Identity(9, 9)) == 0.0);
}

TEST_CASE("tensor(|X><X|, I) occupies indices 6, 7, 8") {
  const Operator xx = projector(bases::single_dot(), "X", "X");
  const MatrixXc m = tensor(xx, Operator::identity(bases::single_dot())).matrix();
  for (Eigen::Index i = 0; i < 9; ++i)
    for (Eigen::Index j = 0; j < 9; ++j) {
      const bool unit = i == j && i >= 6;
      CHECK(m(i, j) == Complex(unit ? 1.0 : 0.0));
    }
}

TEST_CASE("tensor matches element-wise double loop") {
  Rng rng(11);
  for (int draw = 0; draw < 20; ++draw) {
    const MatrixXc a = test::random_matrix(3, rng), b = test::random_matrix(3, rng);
    const MatrixXc t = tensor(dot_op(a), dot_op(b)).matrix();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) CHECK(t(3 * i + j, 3 * k + l) == a(i, k) * b(j, l));
  }
}

TEST_CASE("tensor rejects mismatched operands") {
  const Operator a = Operator::identity(bases::single_dot());
  const Operator b = Operator::identity(bases::lambda_dot());
  CHECK_THROWS_AS(tensor(a, b), BasisMismatch);
  const Operator c = Operator::identity(bases::single_dot(), Frame::rotating(1.0));
  CHECK_THROWS_AS(tensor(a, c), BasisMismatch);
}

TEST_CASE("mixed product and associativity on random inputs") {
  Rng rng(12);
  for (int draw = 0; draw < 25; ++draw) {
    const MatrixXc a = test::random_matrix(3, rng), b = test::random_matrix(3, rng);
    const MatrixXc c = test::random_matrix(3, rng), d = test::random_matrix(3, rng);
    const Operator lhs = tensor(dot_op(a), dot_op(b)) * tensor(dot_op(c), dot_op(d));
    const Operator rhs = tensor(dot_op(a * c), dot_op(b * d));
    CHECK(max_abs(lhs.matrix() - rhs.matrix()) < 1e-12 * (1.0 + max_abs(rhs.matrix())));

    const MatrixXc left = kron(kron(a, b), c);
    const MatrixXc right = kron(a, kron(b, c));
    CHECK(max_abs(left - right) < 1e-12 * (1.0 + max_abs(left)));
  }
}

TEST_CASE("projector entries") {
  const Basis& b = bases::two_dot();
  const MatrixXc p00 = projector(b, "00", "00").matrix();
  CHECK(p00(0, 0) == Complex(1.0));
  CHECK(p00.cwiseAbs().sum() == 1.0);
  const MatrixXc hop = projector(b, "1X", "X1").matrix();
  CHECK(hop(5, 7) == Complex(1.0));
  CHECK(hop.cwiseAbs().sum() == 1.0);
  CHECK_THROWS_AS(projector(b, "1X", "Y1"), UnknownLabel);
}

TEST_CASE("projector pairs are Hermitian for all label pairs") {
  const Basis& b = bases::two_dot();
  for (const auto& ket : b.labels())
    for (const auto& bra : b.labels()) {
      const MatrixXc s = projector(b, ket, bra).matrix() + projector(b, bra, ket).matrix();
      CHECK(is_hermitian(s, 0.0));
    }
}

TEST_CASE("Hamiltonian-tagged operators must be Hermitian") {
  MatrixXc m = MatrixXc::Zero(3, 3);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(Operator(m, bases::single_dot(), Frame::lab(), OperatorKind::Hamiltonian),
                  std::invalid_argument);
  CHECK_NOTHROW(Operator(m, bases::single_dot()));
  CHECK_THROWS_AS(Operator(MatrixXc::Zero(2, 2), bases::single_dot()), BasisMismatch);
}

TEST_CASE("basis_change with identity is a no-op") {
  Rng rng(13);
  const MatrixXc h = test::random_hermitian(3, rng);
  const Operator op(h, bases::single_dot(), Frame::lab(), OperatorKind::Hamiltonian);
  const Operator out = basis_change(op, Operator::identity(bases::single_dot()));
  CHECK(max_abs(out.matrix() - h) < 1e-14);
}

TEST_CASE("basis_change preserves eigenvalues") {
  Rng rng(14);
  for (int draw = 0; draw < 20; ++draw) {
    const MatrixXc h = test::random_hermitian(4, rng);
    Eigen::HouseholderQR<MatrixXc> qr(test::random_matrix(4, rng));
    const MatrixXc q = qr.householderQ();
    const Operator op(h, bases::up_up_block());
    const Operator out = basis_change(op, Operator(q, bases::psi_subspace()));
    CHECK(out.basis() == bases::psi_subspace());
    const Eigen::VectorXd before = Eigen::SelfAdjointEigenSolver<MatrixXc>(h).eigenvalues();
    const Eigen::VectorXd after = Eigen::SelfAdjointEigenSolver<MatrixXc>(out.matrix()).eigenvalues();
    CHECK((before - after).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("basis_change rejects non-unitary matrices") {
  MatrixXc u = MatrixXc::Identity(3, 3);
  u(0, 0) = 1.0 + 1e-6;
  CHECK_THROWS_AS(basis_change(Operator::identity(bases::single_dot()), Operator(u, bases::single_dot())),
                  BasisMismatch);
}

TEST_CASE("exchange block diagonalises in the psi basis at zero drive") {
  const DotPairParams p;
  const LaserDrive off{PulseEnvelope::square(0.0, 0.0), p.resonant_carrier()};
  const Basis exchange("exchange", {"1X", "X1"});
  const Operator block = restrict_to(full_hamiltonian(p, off, 0.0), exchange);
  const double s = 1.0 / std::sqrt(2.0);
  MatrixXc u(2, 2);
  u << s, s, s, -s;
  const MatrixXc d = basis_change(block, Operator(u, Basis("psi", {"psi_p", "psi_m"}))).matrix();
  CHECK(d(0, 0).real() == doctest::Approx(p.omega_a + p.v_f).epsilon(1e-15));
  CHECK(d(1, 1).real() == doctest::Approx(p.omega_a - p.v_f).epsilon(1e-15));
  CHECK(std::abs(d(0, 1)) < 1e-9);
  CHECK(std::abs(d(1, 0)) < 1e-9);
}

TEST_CASE("exponential of the zero matrix is the identity") {
  const Operator u = matrix_exponential(Operator::zero(bases::single_dot(), Frame::lab(),
                                                       OperatorKind::Hamiltonian),
                                        3.7);
  CHECK(u.kind() == OperatorKind::Propagator);
  CHECK(max_abs(u.matrix() - MatrixXc::Identity(3, 3)) == 0.0);
}

TEST_CASE("two-level exponential is a closed-form Rabi rotation") {
  const Basis two("two", {"g", "e"});
  for (double rabi : {0.05, 0.3, 1.7})
    for (double dt : {0.1, 5.0, 42.0}) {
      MatrixXc h(2, 2);
      h << 0.0, 0.5 * rabi, 0.5 * rabi, 0.0;
      const MatrixXc u = matrix_exponential(Operator(h, two, Frame::lab(), OperatorKind::Hamiltonian), dt)
                             .matrix();
      const double a = rabi * dt / (2.0 * kHbar);
      MatrixXc expected(2, 2);
      expected << std::cos(a), -kI * std::sin(a), -kI * std::sin(a), std::cos(a);
      CHECK(max_abs(u - expected) < 1e-12);
    }
}

TEST_CASE("propagators of random Hamiltonians are unitary") {
  Rng rng(15);
  for (int draw = 0; draw < 50; ++draw) {
    const MatrixXc h = test::random_hermitian(4, rng);
    const double dt = test::uniform(rng, -10.0, 10.0);
    const MatrixXc u =
        matrix_exponential(Operator(h, bases::lambda_dot(), Frame::lab(), OperatorKind::Hamiltonian), dt)
            .matrix();
    CHECK(max_abs(MatrixXc(u.adjoint() * u) - MatrixXc::Identity(4, 4)) < 1e-12);
  }
}

TEST_CASE("n equal steps compose to the single-step exponential") {
  Rng rng(16);
  for (int draw = 0; draw < 10; ++draw) {
    const Operator h(test::random_hermitian(3, rng), bases::single_dot(), Frame::lab(),
                     OperatorKind::Hamiltonian);
    const double dt = test::uniform(rng, 0.1, 4.0);
    const int n = 1 + draw * 7;
    const MatrixXc step = matrix_exponential(h, dt / n).matrix();
    MatrixXc total = MatrixXc::Identity(3, 3);
    for (int k = 0; k < n; ++k) total = step * total;
    CHECK(max_abs(total - matrix_exponential(h, dt).matrix()) < 1e-10);
  }
}

TEST_CASE("matrix_exponential rejects non-Hermitian input") {
  MatrixXc m = MatrixXc::Zero(3, 3);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(matrix_exponential(Operator(m, bases::single_dot()), 1.0), std::invalid_argument);
}

TEST_CASE("density matrix validation") {
  const QuantumState psi = QuantumState::basis_state(bases::lambda_dot(), "e");
  const DensityMatrix rho = DensityMatrix::from_pure(psi);
  CHECK(rho.population("e") == 1.0);
  CHECK_THROWS_AS(DensityMatrix(2.0 * rho.matrix(), bases::lambda_dot()), std::invalid_argument);
  MatrixXc neg = MatrixXc::Zero(4, 4);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(neg, bases::lambda_dot()), std::invalid_argument);
}

TEST_CASE("embed places subspace amplitudes by label") {
  Rng rng(17);
  const VectorXc v = test::random_state(2, rng);
  const QuantumState sub(v, bases::spectator_a());
  const QuantumState full = embed(sub, bases::two_dot());
  CHECK(full.amplitude("10") == v(0));
  CHECK(full.amplitude("X0") == v(1));
  CHECK(full.norm() == doctest::Approx(1.0));
}
