#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "jcanyon/fock.hpp"

using namespace jcanyon;
using testing::max_abs;

TEST_CASE("basis dimensions") {
  CHECK(BasisSpec::sector_exact(0, 0, 2).dim() == 2 * (1 + 3));
  CHECK(BasisSpec::sector_exact(2, 1, 3).dim() == 2 * (4 + 7));
  for (int n = 0; n <= 6; ++n) CHECK(BasisSpec::truncated(n).dim() == (n + 1) * (n + 2));
  CHECK(BasisSpec::truncated(3, false).dim() == 10);
  // (0,0) and (m,m) pair sectors: 1 + (m+1)^2 boson states, times the qubit.
  CHECK(BasisSpec::two_anyon(2).dim() == 2 * (1 + 9));
}

TEST_CASE("basis enumeration and lookup") {
  const BasisSpec b = BasisSpec::sector_exact(0, 0, 2);
  for (Index i = 0; i < b.dim(); ++i) CHECK(b.index_of(b.state(i)) == i);
  CHECK(b.state(0).qubit == Qubit::Up);
  CHECK_THROWS_AS(b.index_of({Qubit::Up, {1, 0, 0, 0}}), Error);
  CHECK_FALSE(b.find({Qubit::Down, {5, 0, 0, 0}}).has_value());
}

TEST_CASE("ladder operators: adjoint, commutator, overflow") {
  const BasisSpec b = BasisSpec::truncated(6);
  for (Mode mode : {Mode::A, Mode::B}) {
    const FockOperator up = build_ladder(b, mode, LadderKind::Create);
    const FockOperator down = build_ladder(b, mode, LadderKind::Annihilate);
    CHECK(max_abs(up.matrix - down.matrix.adjoint()) == 0.0);
    CHECK(up.has_overflow());
    CHECK_FALSE(down.has_overflow());
    const CMatrix c = (down * up - up * down).matrix;
    for (Index i = 0; i < b.dim(); ++i) {
      const auto& s = b.state(i);
      if (s.occupation[0] + s.occupation[1] < 6) CHECK(std::abs(c(i, i) - 1.0) < 1e-12);
    }
  }
  const StateVector top = StateVector::basis_state(b, {Qubit::Up, {6, 0, 0, 0}});
  CHECK_THROWS_AS(apply(build_ladder(b, Mode::A, LadderKind::Create), top, true), Error);
  CHECK_THROWS_AS(build_ladder(b, Mode::A, LadderKind::Create, true), Error);
}

TEST_CASE("ladder matrix elements") {
  const BasisSpec b = BasisSpec::truncated(4);
  const FockOperator a = build_ladder(b, Mode::A, LadderKind::Annihilate);
  const StateVector s = StateVector::basis_state(b, {Qubit::Down, {3, 1, 0, 0}});
  const StateVector r = apply(a, s);
  CHECK(std::abs(r.amplitudes(b.index_of({Qubit::Down, {2, 1, 0, 0}})) - std::sqrt(3.0)) < 1e-15);
  CHECK(std::abs(r.norm() - std::sqrt(3.0)) < 1e-15);
  const FockOperator n = build_number(b, Mode::A);
  CHECK(std::abs(expectation(n, s) - 3.0) < 1e-15);
}

TEST_CASE("monomial and sideband") {
  const BasisSpec b = BasisSpec::sector_exact(0, 0, 3);
  const FockOperator s = build_sideband(b, {3, 0, 0, 0}, LadderKind::Annihilate);
  const StateVector down = StateVector::basis_state(b, {Qubit::Down, {3, 0, 0, 0}});
  const StateVector r = apply(s, down);
  // sigma_+ a^3 |down,3> = sqrt(3!) |up,0>
  CHECK(std::abs(r.amplitudes(b.index_of({Qubit::Up, {0, 0, 0, 0}})) - std::sqrt(6.0)) < 1e-14);
  CHECK(max_abs(build_sideband(b, {3, 0, 0, 0}, LadderKind::Create).matrix - s.matrix.adjoint()) == 0.0);
}

TEST_CASE("pauli operators") {
  const BasisSpec b = BasisSpec::sector_exact(0, 0, 1);
  const FockOperator plus = build_pauli(b, PauliKind::Plus);
  const FockOperator minus = build_pauli(b, PauliKind::Minus);
  const FockOperator z = build_pauli(b, PauliKind::Z);
  CHECK(max_abs(commutator(plus, minus).matrix - z.matrix) < 1e-15);
  const StateVector down = StateVector::basis_state(b, {Qubit::Down, {1, 0, 0, 0}});
  CHECK(std::abs(apply(plus, down).amplitudes(b.index_of({Qubit::Up, {1, 0, 0, 0}})) - 1.0) == 0.0);
  CHECK_THROWS_AS(build_pauli(BasisSpec::truncated(2, false), PauliKind::Z), Error);
}

TEST_CASE("operator algebra rejects mixed bases") {
  const FockOperator x = identity(BasisSpec::truncated(2));
  const FockOperator y = identity(BasisSpec::truncated(3));
  CHECK_THROWS_AS(x + y, Error);
  CHECK_THROWS_AS(x * y, Error);
}

TEST_CASE("matrix exponential") {
  testing::Rng rng(11);
  SUBCASE("diagonal oracle") {
    Eigen::VectorXd d(5);
    d << 0.3, -1.2, 2.5, 0.0, -0.7;
    const CMatrix e = matrix_exponential(CMatrix(d.cast<Complex>().asDiagonal()), Complex(0.0, -1.0));
    for (int i = 0; i < 5; ++i) CHECK(std::abs(e(i, i) - std::polar(1.0, -d(i))) < 1e-14);
  }
  SUBCASE("anti-Hermitian input is unitary") {
    for (int c = 0; c < 50; ++c) {
      const Index dim = rng.integer(2, 30);
      const CMatrix a = rng.matrix(dim);
      CMatrix h = 0.5 * (a + a.adjoint());
      h *= rng.real(0.01, 20.0) / h.cwiseAbs().colwise().sum().maxCoeff();
      const CMatrix u = matrix_exponential(h, Complex(0.0, -1.0));
      CHECK(max_abs(u.adjoint() * u - CMatrix::Identity(dim, dim)) < kTolerances.unitary);
    }
  }
  SUBCASE("two-level rotation oracle") {
    // exp(-i t sigma_x) = cos t - i sin t sigma_x
    CMatrix sx(2, 2);
    sx << 0, 1, 1, 0;
    const double t = 0.77;
    const CMatrix u = matrix_exponential(sx, Complex(0.0, -t));
    CHECK(std::abs(u(0, 0) - std::cos(t)) < 1e-15);
    CHECK(std::abs(u(0, 1) - Complex(0.0, -std::sin(t))) < 1e-15);
  }
  SUBCASE("norm limit") {
    CMatrix big = CMatrix::Identity(3, 3) * 2000.0;
    CHECK_THROWS_AS(matrix_exponential(big, Complex(0.0, -1.0)), Error);
  }
}

TEST_CASE("apply_unitary checks the norm") {
  const BasisSpec b = BasisSpec::truncated(1);
  const StateVector s = StateVector::basis_state(b, b.state(0));
  const FockOperator twice = Complex(2.0) * identity(b);
  CHECK_THROWS_AS(apply_unitary(twice, s), Error);
  CHECK(std::abs(apply_unitary(identity(b), s).norm() - 1.0) < 1e-15);
}

TEST_CASE("partial trace and linear entropy") {
  const BasisSpec b = BasisSpec::sector_exact(0, 0, 2);
  const Subsystem qubit[] = {Subsystem::Qubit};
  SUBCASE("product state is pure") {
    const StateVector s = StateVector::basis_state(b, {Qubit::Down, {1, 1, 0, 0}});
    const DensityMatrix r = partial_trace(DensityMatrix::pure(s), qubit);
    CHECK(r.dim() == 2);
    CHECK(std::abs(linear_entropy(r)) < 1e-15);
  }
  SUBCASE("maximally entangled pair") {
    StateVector s = StateVector::basis_state(b, {Qubit::Up, {0, 0, 0, 0}});
    s.amplitudes += StateVector::basis_state(b, {Qubit::Down, {2, 0, 0, 0}}).amplitudes;
    s.amplitudes /= std::sqrt(2.0);
    const DensityMatrix r = partial_trace(DensityMatrix::pure(s), qubit);
    CHECK(std::abs(linear_entropy(r) - 0.5) < 1e-15);
    const Subsystem mode_a[] = {Subsystem::A};
    CHECK(std::abs(linear_entropy(partial_trace(DensityMatrix::pure(s), mode_a)) - 0.5) < 1e-15);
  }
  SUBCASE("random states keep trace and Hermiticity") {
    testing::Rng rng(5);
    for (int c = 0; c < 1000; ++c) {
      const BasisSpec basis = BasisSpec::sector_exact(rng.integer(0, 2), rng.integer(0, 2), rng.integer(1, 3));
      const CMatrix a = rng.matrix(basis.dim());
      CMatrix rho = a * a.adjoint();
      rho /= rho.trace().real();
      const std::vector<Subsystem> keep =
          c % 3 == 0 ? std::vector{Subsystem::Qubit}
                     : (c % 3 == 1 ? std::vector{Subsystem::A, Subsystem::B} : std::vector{Subsystem::B});
      const DensityMatrix r = partial_trace(DensityMatrix::from_matrix(basis, rho), keep);
      CHECK(std::abs(r.matrix.trace() - Complex(1.0)) < kTolerances.trace);
      CHECK(max_abs(r.matrix - r.matrix.adjoint()) < kTolerances.hermitian);
      const double s = linear_entropy(r);
      CHECK(s >= -1e-12);
      CHECK(s <= 1.0 - 1.0 / static_cast<double>(r.dim()) + 1e-12);
    }
  }
  SUBCASE("errors") {
    const DensityMatrix rho = DensityMatrix::pure(StateVector::basis_state(b, b.state(0)));
    const Subsystem dup[] = {Subsystem::A, Subsystem::A};
    CHECK_THROWS_AS(partial_trace(rho, dup), Error);
    const Subsystem absent[] = {Subsystem::C};
    CHECK_THROWS_AS(partial_trace(rho, absent), Error);
    CMatrix bad = CMatrix::Identity(b.dim(), b.dim());
    CHECK_THROWS_AS(DensityMatrix::from_matrix(b, bad).validate(), Error);
  }
}
