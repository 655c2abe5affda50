#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

#include "jcanyon/model.hpp"
#include "jcanyon/parampath.hpp"

using namespace jcanyon;
using std::numbers::pi;

namespace {

// Straightforward long-double evaluation of the dressed-state ratio and phase,
// (m/2) lambda^2 k / (Lambda^2 + Lambda Delta/2), without the rearrangement
// the library uses for negative detuning.
long double oracle_x(int m, int n, long double lambda, long double delta) {
  long double k = 1.0L;
  for (int j = n + 1; j <= n + m; ++j) k *= j;
  const long double big = std::sqrt(delta * delta / 4.0L + lambda * lambda * k);
  return 0.5L * m * lambda * lambda * k / (big * big + big * delta / 2.0L);
}

long double oracle_phase(int m, int n, int np, long double lambda, long double delta, long double omega) {
  return omega / 2.0L * (n - np + oracle_x(m, n, lambda, delta));
}

ModelParams params(int m, double lambda, double delta, int n = 0, int np = 0) {
  ModelParams p;
  p.m = m;
  p.lambda = lambda;
  p.delta = delta;
  p.n = n;
  p.n_prime = np;
  return p;
}

}  // namespace

TEST_CASE("frozen closed-form values") {
  // Fixed from a 30-digit evaluation of the same expressions as the oracle.
  const double r_m1 = 0.0194193243090798403791876713418;
  const double alpha_m2 = 0.0377495513506237258180853658301;
  const double r_m3 = 0.101973489866125496432343338884;
  const double general = 4.78097284214514793196737976306;
  const double entropy = 0.235294117647058823529411764706;

  CHECK(std::abs(static_cast<double>(oracle_x(1, 0, 1, 10) * 2.0L) - r_m1) < 1e-15);
  CHECK(std::abs(statistical_factor(params(1, 1, 10), 4 * pi).ratio - r_m1) < 1e-15);
  CHECK(std::abs(statistical_factor(params(2, 1, 10), 4 * pi).alpha - alpha_m2) < 1e-15);
  CHECK(std::abs(statistical_factor(params(3, 1, 10), 2 * pi).ratio - r_m3) < 1e-15);

  const double omega = 2 * pi * (1 - std::cos(1.1));
  CHECK(std::abs(static_cast<double>(oracle_phase(3, 2, 1, 1, -3, omega)) - general) < 1e-14);
  CHECK(std::abs(analytic_berry_phase(params(3, 1, -3, 2, 1), omega) - general) < 1e-14);
  CHECK(std::abs(entropy_vs_detuning(params(2, 1, 3)) - entropy) < 1e-15);
}

TEST_CASE("statistics endpoints") {
  CHECK(statistical_factor(params(2, 1, 0), 4 * pi).alpha == 1.0);
  CHECK(statistical_factor(params(1, 1, 0), 4 * pi).alpha == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(statistical_factor(params(2, 1, 1e6), 4 * pi).alpha < 1e-10);
  for (int m = 1; m <= 3; ++m) {
    CHECK(statistical_factor(params(m, 0.7, 0), 1.0).ratio == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(entropy_vs_detuning(params(m, 0.7, 0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(analytic_berry_phase(params(m, 1.3, 0), 2.0) == doctest::Approx(m / 4.0 * 2.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(statistical_factor(params(2, 1, 0, 1, 0), 4 * pi), Error);
}

TEST_CASE("analytic phase matches the oracle over the grid") {
  testing::Rng rng(7);
  for (int c = 0; c < 300; ++c) {
    const int m = rng.integer(1, 3), n = rng.integer(0, 2), np = rng.integer(0, 2);
    const double lambda = rng.real(0.1, 3.0), delta = rng.real(-10, 10) * lambda, omega = rng.real(0, 4 * pi);
    const double expected = static_cast<double>(oracle_phase(m, n, np, lambda, delta, omega));
    CHECK(std::abs(analytic_berry_phase(params(m, lambda, delta, n, np), omega) - expected) < 1e-12);
  }
}

TEST_CASE("dressed states are eigenvectors and give Omega <J_z>") {
  for (int m = 1; m <= 3; ++m)
    for (int n = 0; n <= 2; ++n)
      for (int np = 0; np <= 2; ++np)
        for (double d = -10; d <= 10; d += 2.5) {
          const ModelParams p = params(m, 1.0, d, n, np);
          const BasisSpec basis = BasisSpec::sector_exact(n, np, m);
          const FockOperator h = build_interaction_hamiltonian(p, basis);
          const SchwingerFrame frame(basis);
          const auto [plus, minus] = analytic_eigensystem(p);
          CHECK(std::abs(plus.c_up * plus.c_up + plus.c_down * plus.c_down - 1.0) < 1e-12);
          for (const DressedState& s : {plus, minus}) {
            const StateVector v = s.to_state(basis);
            CHECK((h.matrix * v.amplitudes - s.energy() * v.amplitudes).norm() < kTolerances.eigen_residual);
            const double omega = 1.7;
            const double jz = expectation(frame.jz(), v).real();
            CHECK(std::abs(analytic_berry_phase(p, omega, s.branch) - omega * jz) < 1e-12);
          }
          CHECK(std::abs(plus.to_state(basis).inner(minus.to_state(basis))) < 1e-14);
        }
}

TEST_CASE("branches") {
  for (int m = 1; m <= 3; ++m) {
    const ModelParams p = params(m, 0.9, 0.0, 1, 2);
    CHECK(std::abs(analytic_berry_phase(p, 3.0, Branch::Plus) - analytic_berry_phase(p, 3.0, Branch::Minus)) < 1e-14);
  }
  // Off resonance the minus branch carries (Omega/2)(n - n' + m - x).
  const ModelParams p = params(2, 1.0, 2.0, 1, 0);
  const double x = static_cast<double>(oracle_x(2, 1, 1.0, 2.0));
  CHECK(std::abs(analytic_berry_phase(p, 2.0, Branch::Minus) - (1.0 + 2 - x)) < 1e-14);
}

TEST_CASE("ratio and entropy shape") {
  for (int m = 1; m <= 3; ++m) {
    double prev_r = 2.0, prev_s = 1.0;
    for (int k = 0; k <= 200; ++k) {
      const double d = 0.05 * k;
      const double r = statistical_factor(params(m, 1, d), 4 * pi).ratio;
      const double s = entropy_vs_detuning(params(m, 1, d));
      CHECK(r < prev_r);
      CHECK(s < prev_s);
      prev_r = r;
      prev_s = s;
      CHECK(std::abs(statistical_factor(params(m, 1, -d), 4 * pi).ratio - (2.0 - r)) < 1e-13);
      CHECK(std::abs(entropy_vs_detuning(params(m, 1, -d)) - s) < 1e-15);
    }
  }
}

TEST_CASE("entropy equals the partial-trace value") {
  testing::Rng rng(3);
  const Subsystem keep[] = {Subsystem::Qubit};
  for (int c = 0; c < 200; ++c) {
    const ModelParams p = params(rng.integer(1, 3), rng.real(0.1, 2), rng.real(-20, 20), rng.integer(0, 2),
                                 rng.integer(0, 2));
    const BasisSpec basis = BasisSpec::sector_exact(p.n, p.n_prime, p.m);
    const double traced =
        linear_entropy(partial_trace(DensityMatrix::pure(analytic_eigensystem(p).first.to_state(basis)), keep));
    CHECK(std::abs(traced - entropy_vs_detuning(p)) < 1e-12);
  }
}

TEST_CASE("large negative detuning stays accurate") {
  for (double d : {-1e3, -1e6, -1e8}) {
    const ModelParams p = params(2, 1.0, d);
    // r(-D) = 2 - r(D), and r(D) is tiny and well conditioned for D > 0.
    const double r_pos = statistical_factor(params(2, 1.0, -d), 4 * pi).ratio;
    CHECK(std::abs(statistical_factor(p, 4 * pi).ratio - (2.0 - r_pos)) < 1e-14);
    const auto [plus, minus] = analytic_eigensystem(p);
    CHECK(std::isfinite(plus.c_up));
    CHECK(plus.c_down > 0.999);
  }
}

TEST_CASE("free mode") {
  ModelParams p = params(2, 0.0, 1.0, 1, 0);
  CHECK_THROWS_AS(p.validate(), Error);
  p.free_mode = true;
  CHECK(analytic_berry_phase(p, 2.0) == doctest::Approx(1.0));
  p.delta = -1.0;
  CHECK(analytic_berry_phase(p, 2.0) == doctest::Approx(1.0 + 2.0));
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(params(0, 1, 0).validate(), Error);
  CHECK_THROWS_AS(params(1, -1, 0).validate(), Error);
  CHECK_THROWS_AS(params(1, 1, std::nan("")).validate(), Error);
  const ModelParams lab = ModelParams::lab_frame(2, 0.5, 3.0, 7.0);
  CHECK(lab.delta == 1.0);
  lab.validate();
  ModelParams bad = lab;
  bad.delta = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(check_solid_angle(-0.1), Error);
  CHECK_THROWS_AS(check_solid_angle(4 * pi + 1e-6), Error);
}

TEST_CASE("lab-frame Hamiltonian holds the dressed pair") {
  const ModelParams p = ModelParams::lab_frame(2, 0.4, 1.5, 3.3, 1, 1);
  const BasisSpec basis = BasisSpec::sector_exact(1, 1, 2);
  const FockOperator h = build_full_hamiltonian(p, basis);
  CHECK(h.is_hermitian());
  const double shift = p.nu * (p.n + p.n_prime + 0.5 * p.m);
  for (const DressedState& s : {analytic_eigensystem(p).first, analytic_eigensystem(p).second}) {
    const CVector v = s.to_state(basis).amplitudes;
    CHECK((h.matrix * v - (shift + s.energy()) * v).norm() < 1e-12);
  }
}

TEST_CASE("factorial ratio") {
  CHECK(factorial_ratio(2, 3) == 60.0);
  CHECK(factorial_ratio(0, 0) == 1.0);
  CHECK(factorial_ratio(30, 3) == doctest::Approx(31.0 * 32.0 * 33.0).epsilon(1e-13));
}

TEST_CASE("two-anyon pair") {
  for (int m = 1; m <= 2; ++m) {
    TwoAnyonParams tp;
    tp.m = m;
    tp.lambda = 0.8;
    const BasisSpec basis = BasisSpec::two_anyon(m);
    const FockOperator h = build_two_anyon_hamiltonian(tp, basis);
    CHECK(h.is_hermitian());
    const double energy = tp.lambda * std::tgamma(m + 1.0);
    const CVector v = two_anyon_eigenstate(tp, basis).amplitudes;
    CHECK((h.matrix * v - energy * v).norm() < 1e-12);
    CHECK(two_anyon_analytic_phase(m, 2 * pi) == doctest::Approx(m * pi));
  }
  TwoAnyonParams tp;
  CHECK_THROWS_AS(build_two_anyon_hamiltonian(tp, BasisSpec::sector_exact(0, 0, 1)), Error);
}
