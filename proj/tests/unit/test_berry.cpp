#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

#include "jcanyon/berry.hpp"
#include "jcanyon/kernels.hpp"

using namespace jcanyon;
using std::numbers::pi;

namespace {

ModelParams params(int m, double delta, int n = 0, int np = 0, double lambda = 1.0) {
  ModelParams p;
  p.m = m;
  p.lambda = lambda;
  p.delta = delta;
  p.n = n;
  p.n_prime = np;
  return p;
}

PhaseReport holonomy_of(const ModelParams& p, double theta, int steps, HolonomyOptions opts = {},
                        Branch branch = Branch::Plus) {
  const BasisSpec basis = BasisSpec::sector_exact(p.n, p.n_prime, p.m);
  const SchwingerFrame frame(basis);
  const auto pair = analytic_eigensystem(p);
  const DressedState& s = branch == Branch::Plus ? pair.first : pair.second;
  return holonomy_phase(s.to_state(basis), frame, constant_latitude_loop(theta, steps, default_revolutions(basis)),
                        opts);
}

}  // namespace

TEST_CASE("Bargmann phase of explicit overlaps") {
  const std::vector<Complex> ov = {std::polar(0.9, 0.1), std::polar(0.8, -0.3), std::polar(1.0, 0.5)};
  const BargmannResult r = bargmann_phase(ov);
  CHECK(r.phase == doctest::Approx(-(0.1 - 0.3 + 0.5)).epsilon(1e-15));
  CHECK(r.min_overlap == doctest::Approx(0.8));
  const std::vector<Complex> dead = {1.0, 1e-9, 1.0};
  CHECK_THROWS_AS(bargmann_phase(dead), Error);
}

TEST_CASE("sign convention") {
  CHECK(calibrate_sign_convention() == -1);
  CHECK(sign_convention() == -1);
}

TEST_CASE("holonomy reproduces the closed form") {
  SUBCASE("resonant full sphere, m = 1 and 2") {
    for (int m = 1; m <= 2; ++m) {
      const PhaseReport r = holonomy_of(params(m, 0.0), pi - 1e-9, 1024);
      CHECK(std::abs(r.gamma - analytic_berry_phase(params(m, 0.0), latitude_solid_angle(pi - 1e-9))) < 1e-8);
    }
  }
  SUBCASE("random sectors and detunings") {
    testing::Rng rng(9);
    for (int c = 0; c < 25; ++c) {
      const ModelParams p = params(rng.integer(1, 3), rng.real(-6, 6), rng.integer(0, 2), rng.integer(0, 2),
                                   rng.real(0.5, 2));
      const double theta = rng.real(0.2, pi - 0.2);
      const PhaseReport r = holonomy_of(p, theta, 1024);
      CHECK(std::abs(r.gamma - analytic_berry_phase(p, latitude_solid_angle(theta))) < 1e-8);
      CHECK(r.diagnostics.discretization_estimate < 1e-3);
      CHECK(r.winding_resolved);
      CHECK(std::abs(r.gamma - r.principal - 2 * pi * r.winding) < 1e-12);
    }
  }
  SUBCASE("two-anyon pair") {
    for (int m = 1; m <= 2; ++m) {
      TwoAnyonParams tp;
      tp.m = m;
      const BasisSpec basis = BasisSpec::two_anyon(m);
      const SchwingerFrame frame(basis);
      const LoopPath path = constant_latitude_loop(pi / 2, 1024, 2);
      const PhaseReport r = holonomy_phase(two_anyon_eigenstate(tp, basis), frame, path);
      CHECK(std::abs(r.gamma - two_anyon_analytic_phase(m, 2 * pi)) < 1e-8);
    }
  }
}

TEST_CASE("plain Bargmann phase converges quadratically") {
  const ModelParams p = params(2, 1.5, 1, 0);
  const double theta = 1.2, exact = analytic_berry_phase(p, latitude_solid_angle(theta));
  HolonomyOptions opts;
  opts.extrapolate = false;
  double prev = 0.0;
  for (int steps : {128, 256, 512, 1024}) {
    const double err = std::abs(holonomy_of(p, theta, steps, opts).gamma - exact);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
  opts.extrapolate = true;
  CHECK(std::abs(holonomy_of(p, theta, 128, opts).gamma - exact) < prev);
}

TEST_CASE("gauge invariance") {
  testing::Rng rng(12);
  const ModelParams p = params(3, -2.0, 1, 2);
  const BasisSpec basis = BasisSpec::sector_exact(1, 2, 3);
  const SchwingerFrame frame(basis);
  const LoopPath path = constant_latitude_loop(0.9, 512, default_revolutions(basis));
  auto states = kernels::serial::loop_states(frame, analytic_eigensystem(p).first.to_state(basis).amplitudes,
                                             path.samples, FrameGauge::Anchored);
  const double before = holonomy_from_states(states, path).gamma;
  SUBCASE("small phases leave the unwrapped value unchanged") {
    for (auto& s : states) s *= std::polar(1.0, rng.real(-0.05, 0.05));
    CHECK(std::abs(holonomy_from_states(states, path).gamma - before) < 1e-10);
  }
  SUBCASE("arbitrary phases change the loop phase by multiples of 2 pi") {
    for (auto& s : states) s *= std::polar(1.0, rng.real(-pi, pi));
    const double after = holonomy_from_states(states, path).gamma;
    CHECK(std::abs(std::remainder((after - before) * path.revolutions, 2 * pi)) < 1e-10);
  }
}

TEST_CASE("literal gauge differs from the anchored one") {
  // Without the anchoring phase the closed loop picks up 2 pi <J_z> per turn.
  const ModelParams p = params(2, 0.0);
  HolonomyOptions lit;
  lit.gauge = FrameGauge::Literal;
  const double theta = 1.0;
  const double anchored = holonomy_of(p, theta, 1024).gamma;
  const double literal = holonomy_of(p, theta, 1024, lit).gamma;
  CHECK(std::abs(anchored - literal) > 0.1);
}

TEST_CASE("branches agree at resonance") {
  for (int m = 1; m <= 3; ++m) {
    const ModelParams p = params(m, 0.0, 1, 0, 0.8);
    const double gp = holonomy_of(p, 2.0, 512, {}, Branch::Plus).gamma;
    const double gm = holonomy_of(p, 2.0, 512, {}, Branch::Minus).gamma;
    CHECK(std::abs(gp - gm) < 1e-8);
  }
}

TEST_CASE("serial and OpenMP kernels agree exactly") {
  const ModelParams p = params(3, 2.0, 2, 1);
  const BasisSpec basis = BasisSpec::sector_exact(2, 1, 3);
  const SchwingerFrame frame(basis);
  const LoopPath path = constant_latitude_loop(1.3, 2048, default_revolutions(basis));
  const StateVector psi = analytic_eigensystem(p).first.to_state(basis);
  for (int jobs : {1, 2, 4}) {
    HolonomyOptions opts;
    opts.jobs = jobs;
    const PhaseReport a = holonomy_phase_serial(psi, frame, path, opts);
    const PhaseReport b = holonomy_phase(psi, frame, path, opts);
    CHECK(a.gamma == b.gamma);
    CHECK(a.gamma_plain == b.gamma_plain);
    const auto sa = kernels::serial::loop_states(frame, psi.amplitudes, path.samples, FrameGauge::Anchored);
    const auto sb = kernels::omp::loop_states(frame, psi.amplitudes, path.samples, FrameGauge::Anchored, jobs);
    CHECK(kernels::serial::chain_overlaps(sa, 2) == kernels::omp::chain_overlaps(sb, 2, jobs));
  }
}

TEST_CASE("time profiles") {
  for (TimeProfile prof : {TimeProfile::Uniform, TimeProfile::Smoothstep, TimeProfile::Plateau}) {
    CHECK(profile_position(prof, 0.0, 0.05) == doctest::Approx(0.0));
    CHECK(profile_position(prof, 1.0, 0.05) == doctest::Approx(1.0));
    double prev = -1.0;
    for (int k = 0; k <= 200; ++k) {
      const double u = k / 200.0;
      const double x = profile_position(prof, u, 0.05);
      CHECK(x >= prev);
      prev = x;
      if (k > 0 && k < 200) {
        const double h = 1e-6;
        const double fd = (profile_position(prof, u + h, 0.05) - profile_position(prof, u - h, 0.05)) / (2 * h);
        CHECK(std::abs(fd - profile_rate(prof, u, 0.05)) < 1e-6);
      }
    }
  }
  CHECK(profile_position(TimeProfile::Smoothstep, 0.3, 0) + profile_position(TimeProfile::Smoothstep, 0.7, 0) ==
        doctest::Approx(1.0));
  // Fixed from a 30-digit evaluation of the plateau ramp.
  CHECK(std::abs(profile_position(TimeProfile::Plateau, 0.02, 0.05) - 0.0025597186458878212712333525641) < 1e-15);
}

TEST_CASE("schedule clock") {
  DriveSchedule s;
  s.path = pole_anchored_loop(1.5, 256);
  s.total_time = 120.0;
  const ScheduleClock clock(s);
  double sum = 0.0;
  for (double d : clock.segment_durations()) sum += d;
  CHECK(sum == doctest::Approx(120.0));
  CHECK(clock.at(0.0).theta == doctest::Approx(0.0));
  CHECK(clock.at(120.0).theta == doctest::Approx(0.0).epsilon(1e-12));
  const ScheduleClock weighted(s, {1.0, 2.0, 1.0});
  CHECK(weighted.segment_durations()[1] == doctest::Approx(60.0));
  CHECK(std::abs(weighted.at(30.0).theta - 1.5) < 1e-9);
  const auto [dtheta, dphi] = weighted.velocity(60.0);
  CHECK(dtheta == doctest::Approx(0.0));
  CHECK(dphi > 0.0);
}

TEST_CASE("reversed loop") {
  const LoopPath p = pole_anchored_loop(1.2, 64);
  const LoopPath r = reversed(p);
  REQUIRE(r.samples.size() == p.samples.size());
  CHECK(r.samples.front().phi == p.samples.back().phi);
  CHECK(r.samples.back().theta == p.samples.front().theta);
}

TEST_CASE("schedule validation") {
  DriveSchedule s;
  s.path = constant_latitude_loop(1.0, 64);
  s.total_time = -1.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s.total_time = 200.0;
  s.lambda_m = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("adiabatic evolution") {
  const ModelParams p = params(2, 1.0);
  const BasisSpec basis = BasisSpec::sector_exact(0, 0, 2);
  const SchwingerFrame frame(basis);
  const FockOperator h = build_interaction_hamiltonian(p, basis);
  const StateVector psi = analytic_eigensystem(p).first.to_state(basis);
  const double theta = 1.2, exact = analytic_berry_phase(p, latitude_solid_angle(theta));

  auto run = [&](double time, DynamicPhaseMode mode) {
    DriveSchedule s;
    s.path = pole_anchored_loop(theta, 256);
    s.total_time = time;
    s.dynamic_phase_mode = mode;
    s.throw_on_leak = false;
    return adiabatic_evolution(h, frame, s, psi);
  };

  SUBCASE("subtraction modes converge as 1/T, the echo as 1/T^2") {
    const std::pair<DynamicPhaseMode, double> cases[] = {{DynamicPhaseMode::SubtractExpectation, 2.0},
                                                         {DynamicPhaseMode::SubtractEigenvalue, 2.0},
                                                         {DynamicPhaseMode::Echo, 4.0}};
    for (const auto& [mode, rate] : cases) {
      const AdiabaticResult slow = run(400.0, mode);
      const double e1 = std::abs(run(200.0, mode).report.gamma - exact);
      const double e2 = std::abs(slow.report.gamma - exact);
      CHECK(e1 / e2 == doctest::Approx(rate).epsilon(0.1));
      CHECK(slow.report.diagnostics.norm_drift < kTolerances.adiabatic_norm_drift);
      CHECK(slow.report.diagnostics.max_nonadiabatic_leak < 1e-3);
      CHECK(slow.report.method == PhaseMethod::Adiabatic);
    }
    CHECK(std::abs(run(200.0, DynamicPhaseMode::Echo).report.gamma - exact) < 1e-2);
  }
  SUBCASE("fast loops are rejected") {
    DriveSchedule s;
    s.path = pole_anchored_loop(theta, 256);
    s.total_time = 1.0;
    s.profile = TimeProfile::Uniform;
    CHECK_THROWS_AS(adiabatic_evolution(h, frame, s, psi), Error);
  }
  SUBCASE("report serializes") {
    const auto doc = run(50.0, DynamicPhaseMode::None).report.to_json();
    CHECK(doc["method"] == "adiabatic");
    CHECK(doc["reproducibility"]["total_time"] == 50.0);
  }
}
