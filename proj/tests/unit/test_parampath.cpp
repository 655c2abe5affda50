#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

#include "jcanyon/model.hpp"
#include "jcanyon/parampath.hpp"

using namespace jcanyon;
using std::numbers::pi;
using testing::max_abs;

namespace {

// Girard's theorem for a convex geodesic polygon: area = sum of interior
// angles - (n - 2) pi.
double girard_area(const std::vector<SpherePoint>& v) {
  const std::size_t n = v.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d a = v[(i + n - 1) % n].cartesian(), b = v[i].cartesian(), c = v[(i + 1) % n].cartesian();
    const Eigen::Vector3d t1 = (a - a.dot(b) * b).normalized(), t2 = (c - c.dot(b) * b).normalized();
    sum += std::acos(std::clamp(t1.dot(t2), -1.0, 1.0));
  }
  return sum - (static_cast<double>(n) - 2.0) * pi;
}

std::vector<SpherePoint> latitude_ring(double theta, int count) {
  std::vector<SpherePoint> v;
  for (int k = 0; k < count; ++k) v.push_back({theta, 2 * pi * k / count});
  return v;
}

}  // namespace

TEST_CASE("solid angle of latitude circles") {
  for (double theta : {0.0, 0.3, pi / 3, pi / 2, 2.0, pi}) {
    const double omega = latitude_solid_angle(theta);
    CHECK(omega == doctest::Approx(2 * pi * (1 - std::cos(theta))).epsilon(1e-15));
    CHECK(std::abs(theta_for_solid_angle(omega) - theta) < 1e-7);
  }
  CHECK(theta_for_solid_angle(4 * pi) == doctest::Approx(pi));
  CHECK_THROWS_AS(theta_for_solid_angle(-1.0), Error);
}

TEST_CASE("polygon solid angle") {
  SUBCASE("octant") {
    const std::vector<SpherePoint> tri = {{0, 0}, {pi / 2, 0}, {pi / 2, pi / 2}};
    CHECK(std::abs(polygon_solid_angle(tri) - pi / 2) < 1e-12);
    const std::vector<SpherePoint> rev = {{0, 0}, {pi / 2, pi / 2}, {pi / 2, 0}};
    CHECK(std::abs(polygon_solid_angle(rev) - (4 * pi - pi / 2)) < 1e-12);
  }
  SUBCASE("equator is exact") {
    CHECK(std::abs(polygon_solid_angle(latitude_ring(pi / 2, 360)) - 2 * pi) < 1e-6);
    const LoopPath loop = constant_latitude_loop(pi / 2, 360);
    CHECK(std::abs(polygon_solid_angle(loop) - 2 * pi) < 1e-6);
  }
  SUBCASE("agrees with Girard on sampled caps") {
    for (double theta : {0.2, pi / 6, pi / 3, 1.3}) {
      for (int count : {5, 17, 360}) {
        const auto ring = latitude_ring(theta, count);
        CHECK(std::abs(polygon_solid_angle(ring) - girard_area(ring)) < 1e-9);
      }
    }
  }
  SUBCASE("sampled caps approach the circle") {
    const double theta = pi / 3, step = 2 * pi / 360;
    const double gap = std::abs(polygon_solid_angle(latitude_ring(theta, 360)) - latitude_solid_angle(theta));
    const double predicted = 2 * pi * step * step * std::cos(theta) * std::sin(theta) * std::sin(theta) / 12;
    CHECK(gap == doctest::Approx(predicted).epsilon(0.01));
  }
  SUBCASE("degenerate input") {
    const std::vector<SpherePoint> two = {{0.1, 0}, {0.5, 1}};
    CHECK_THROWS_AS(polygon_solid_angle(two), Error);
  }
}

TEST_CASE("loop builders") {
  SUBCASE("constant latitude") {
    const LoopPath p = constant_latitude_loop(1.0, 64, 2);
    CHECK(p.samples.size() == 129);
    CHECK(p.samples.back().phi == doctest::Approx(4 * pi));
    CHECK(p.omega_solid == doctest::Approx(latitude_solid_angle(1.0)));
    CHECK(p.revolutions == 2);
    CHECK_THROWS_AS(constant_latitude_loop(-0.1, 64), Error);
    CHECK_THROWS_AS(constant_latitude_loop(1.0, 4), Error);
  }
  SUBCASE("pole anchored") {
    const LoopPath p = pole_anchored_loop(2.0, 256);
    CHECK(p.segment_starts.size() == 3);
    CHECK(p.samples.front().theta == 0.0);
    CHECK(p.samples.back().theta == doctest::Approx(0.0));
    for (std::size_t len : p.segment_lengths()) CHECK(len % 2 == 0);
    CHECK(p.omega_solid == doctest::Approx(latitude_solid_angle(2.0)));
  }
  SUBCASE("spherical polygon") {
    const std::vector<SpherePoint> tri = {{0.3, 0}, {1.2, 0.4}, {1.0, 2.0}};
    const LoopPath p = spherical_polygon_loop(tri, 15);
    for (std::size_t len : p.segment_lengths()) CHECK(len == 16);
    CHECK(p.omega_solid == doctest::Approx(polygon_solid_angle(tri)));
    CHECK(std::abs(polygon_solid_angle(p) - p.omega_solid) < 1e-9);
    const std::vector<SpherePoint> antipodal = {{0, 0}, {pi, 0}, {pi / 2, 1}};
    CHECK_THROWS_AS(spherical_polygon_loop(antipodal, 8), Error);
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(custom_loop({{0.5, 0}, {0.5, 1}, {0.7, 2}}, 1.0), Error);
    LoopPath big = constant_latitude_loop(1.0, 16);
    big.omega_solid = 5 * pi;
    CHECK_THROWS_AS(big.validate(), Error);
  }
}

TEST_CASE("path JSON round trip") {
  for (const LoopPath& p : {constant_latitude_loop(0.7, 32, 2), pole_anchored_loop(1.4, 64),
                            spherical_polygon_loop({{0.3, 0}, {1.2, 0.4}, {1.0, 2.0}}, 6)}) {
    const LoopPath q = LoopPath::from_json(nlohmann::json::parse(p.to_json().dump()));
    CHECK(q.kind == p.kind);
    REQUIRE(q.samples.size() == p.samples.size());
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
      CHECK(std::abs(q.samples[i].theta - p.samples[i].theta) < 1e-15);
      CHECK(std::abs(q.samples[i].phi - p.samples[i].phi) < 1e-15);
    }
    CHECK(q.segment_starts == p.segment_starts);
    CHECK(q.omega_solid == p.omega_solid);
  }
}

TEST_CASE("Schwinger algebra") {
  testing::Rng rng(21);
  const Complex i(0, 1);
  for (int c = 0; c < 40; ++c) {
    const BasisSpec b = c % 4 == 3 ? BasisSpec::two_anyon(rng.integer(1, 2))
                                   : BasisSpec::sector_exact(rng.integer(0, 3), rng.integer(0, 3), rng.integer(1, 3));
    const SchwingerFrame f(b);
    CHECK(max_abs(commutator(f.jy(), f.jz()).matrix - i * f.jx().matrix) < 1e-12);
    CHECK(f.jx().is_hermitian());
    CHECK(f.jy().is_hermitian());
    if (b.mode_count() == 2) {
      const FockOperator n = build_number(b, Mode::A) + build_number(b, Mode::B);
      CHECK(max_abs(commutator(f.jy(), n).matrix) == 0.0);
      CHECK(max_abs(commutator(f.jz(), n).matrix) == 0.0);
    }
  }
}

TEST_CASE("dressed states have no transverse spin") {
  for (int m = 1; m <= 3; ++m)
    for (double d : {-4.0, 0.0, 2.5}) {
      ModelParams p;
      p.m = m;
      p.delta = d;
      p.n = 1;
      const BasisSpec b = BasisSpec::sector_exact(1, 0, m);
      const SchwingerFrame f(b);
      for (const auto& s : {analytic_eigensystem(p).first, analytic_eigensystem(p).second}) {
        CHECK(std::abs(expectation(f.jx(), s.to_state(b))) < 1e-14);
        CHECK(std::abs(expectation(f.jy(), s.to_state(b))) < 1e-14);
      }
    }
}

TEST_CASE("rotations") {
  testing::Rng rng(4);
  const BasisSpec b = BasisSpec::sector_exact(1, 2, 3);
  const SchwingerFrame f(b);
  for (int c = 0; c < 30; ++c) {
    const double theta = rng.real(0, pi), phi = rng.real(-7, 7);
    const CVector v = rng.unit(b.dim());
    const FockOperator u = build_unitary(f, theta, phi);
    CHECK(std::abs((u.matrix * v).norm() - 1.0) < kTolerances.unitary);
    CHECK((f.rotate(v, theta, phi, FrameGauge::Literal) - u.matrix * v).norm() < 1e-12);
    CHECK((f.rotate(v, theta, phi, FrameGauge::Anchored) - anchored_unitary(f, theta, phi).matrix * v).norm() < 1e-12);
    const auto r = f.rotation(theta, phi, FrameGauge::Anchored);
    CHECK((r.apply_adjoint(r.apply(v)) - v).norm() < 1e-12);
  }
  // Anchored and literal agree on the phi = 0 meridian.
  CHECK(max_abs(anchored_unitary(f, 0.8, 0.0).matrix - build_unitary(f, 0.8, 0.0).matrix) < 1e-14);
  // Anchored gauge is the identity at the pole for every phi.
  CHECK(max_abs(anchored_unitary(f, 0.0, 2.3).matrix - CMatrix::Identity(b.dim(), b.dim())) < 1e-14);
  // Literal gauge after a full turn: exp(-i 2 pi J_z) = diag exp(-i pi (n_a - n_b)).
  const CMatrix turn = build_unitary(f, 0.0, 2 * pi).matrix;
  for (Index k = 0; k < b.dim(); ++k) {
    const auto& s = b.state(k);
    CHECK(std::abs(turn(k, k) - std::polar(1.0, -pi * (s.occupation[0] - s.occupation[1]))) < 1e-13);
  }
}

TEST_CASE("rotated Hamiltonian") {
  ModelParams p;
  p.m = 2;
  p.delta = 0.4;
  const BasisSpec b = BasisSpec::sector_exact(0, 0, 2);
  const SchwingerFrame f(b);
  const FockOperator h = build_interaction_hamiltonian(p, b);
  CHECK(max_abs(rotated_hamiltonian(h, f, 0.0, 0.0).matrix - h.matrix) == 0.0);
  const FockOperator r = rotated_hamiltonian(h, f, 1.1, 0.6);
  CHECK(r.is_hermitian());
  const FockOperator u = build_unitary(f, 1.1, 0.6);
  CHECK(max_abs(r.matrix - u.matrix * h.matrix * u.matrix.adjoint()) < 1e-12);
  CHECK_THROWS_AS(rotated_hamiltonian(identity(BasisSpec::truncated(2)), f, 0.1, 0.1), Error);
}

TEST_CASE("default revolutions") {
  CHECK(default_revolutions(BasisSpec::sector_exact(0, 0, 1)) == 2);
  CHECK(default_revolutions(BasisSpec::sector_exact(0, 0, 2)) == 1);
  CHECK(default_revolutions(BasisSpec::sector_exact(1, 1, 3)) == 2);
}
