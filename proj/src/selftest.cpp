#include "jcanyon/selftest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "jcanyon/iontrap.hpp"
#include "jcanyon/kernels.hpp"

namespace jcanyon {

namespace {

constexpr double kPi = std::numbers::pi;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  Complex gaussian() {
    std::normal_distribution<double> n;
    return {n(rng), n(rng)};
  }
  CMatrix matrix(Index dim) {
    CMatrix a(dim, dim);
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j) a(i, j) = gaussian();
    return a;
  }
  CVector unit_vector(Index dim) {
    CVector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = gaussian();
    return v / v.norm();
  }
  BasisSpec sector_basis() { return BasisSpec::sector_exact(integer(0, 2), integer(0, 2), integer(1, 3)); }
};

PropertyResult make(std::string name, double threshold, bool exact = false) {
  PropertyResult r;
  r.name = std::move(name);
  r.threshold = threshold;
  r.exact = exact;
  return r;
}

void finish(PropertyResult& r) { r.passed = r.exact ? r.worst == 0.0 : r.worst < r.threshold; }

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

nlohmann::json PropertyResult::to_json() const {
  return {{"name", name},     {"cases", cases},   {"worst", worst}, {"threshold", threshold},
          {"exact", exact},   {"passed", passed}, {"detail", detail}};
}

PropertyResult check_unitarity(const SelftestOptions& o) {
  PropertyResult r = make("unitarity", kTolerances.unitary);
  Gen gen(o.seed ^ 0x1);
  for (int c = 0; c < o.cases; ++c) {
    const BasisSpec basis = gen.sector_basis();
    const Index d = basis.dim();
    const CMatrix a = gen.matrix(d);
    CMatrix h = 0.5 * (a + a.adjoint());
    h *= gen.real(0.1, 5.0) / h.cwiseAbs().colwise().sum().maxCoeff();
    const CMatrix u = matrix_exponential(h, Complex(0.0, -1.0));
    r.worst = std::max(r.worst, max_abs(u.adjoint() * u - CMatrix::Identity(d, d)));

    const SchwingerFrame frame(basis);
    const double theta = gen.real(0.0, kPi), phi = gen.real(-2.0 * kPi, 2.0 * kPi);
    const StateVector psi{basis, gen.unit_vector(d)};
    for (const FockOperator& v : {build_unitary(frame, theta, phi), anchored_unitary(frame, theta, phi)}) {
      r.worst = std::max(r.worst, std::abs(apply(v, psi).norm() - 1.0));
    }
    ++r.cases;
  }
  r.detail = "max |U^dag U - I| and |‖U psi‖ - 1| over expm and frame rotations";
  finish(r);
  return r;
}

PropertyResult check_ladder_adjoint(const SelftestOptions& o) {
  PropertyResult r = make("ladder-adjoint", 0.0, true);
  Gen gen(o.seed ^ 0x2);
  for (int c = 0; c < o.cases; ++c) {
    const BasisSpec basis = c % 2 ? gen.sector_basis() : BasisSpec::truncated(gen.integer(1, 8), gen.integer(0, 1));
    for (Mode mode : {Mode::A, Mode::B}) {
      const CMatrix up = build_ladder(basis, mode, LadderKind::Create).matrix;
      const CMatrix down = build_ladder(basis, mode, LadderKind::Annihilate).matrix;
      r.worst = std::max(r.worst, max_abs(up - down.adjoint()));
    }
    ++r.cases;
  }
  r.detail = "creation equals the conjugate transpose of annihilation";
  finish(r);
  return r;
}

PropertyResult check_su2_commutators(const SelftestOptions& o) {
  PropertyResult r = make("su2-commutators", kTolerances.hermitian);
  Gen gen(o.seed ^ 0x3);
  for (int c = 0; c < o.cases; ++c) {
    const BasisSpec basis = c % 3 == 2 ? BasisSpec::two_anyon(gen.integer(1, 3)) : gen.sector_basis();
    const SchwingerFrame f(basis);
    const Complex i(0.0, 1.0);
    r.worst = std::max(r.worst, max_abs(commutator(f.jy(), f.jz()).matrix - i * f.jx().matrix));
    r.worst = std::max(r.worst, max_abs(commutator(f.jz(), f.jx()).matrix - i * f.jy().matrix));
    r.worst = std::max(r.worst, max_abs(commutator(f.jx(), f.jy()).matrix - i * f.jz().matrix));
    ++r.cases;
  }
  r.detail = "[Jy,Jz] = iJx and cyclic, sector-exact and four-mode bases";
  finish(r);
  return r;
}

PropertyResult check_number_conservation(const SelftestOptions& o) {
  PropertyResult r = make("number-conservation", 0.0, true);
  Gen gen(o.seed ^ 0x4);
  for (int c = 0; c < o.cases; ++c) {
    const BasisSpec basis = gen.sector_basis();
    const SchwingerFrame f(basis);
    const FockOperator n = build_number(basis, Mode::A) + build_number(basis, Mode::B);
    r.worst = std::max(r.worst, max_abs(commutator(f.jy(), n).matrix));
    r.worst = std::max(r.worst, max_abs(commutator(f.jz(), n).matrix));
    ++r.cases;
  }
  r.detail = "[J_i, N_a + N_b] = 0 for i in {y, z}";
  finish(r);
  return r;
}

PropertyResult check_partial_trace(const SelftestOptions& o) {
  PropertyResult r = make("partial-trace", kTolerances.trace);
  Gen gen(o.seed ^ 0x5);
  const std::array<std::vector<Subsystem>, 4> keeps = {
      std::vector<Subsystem>{Subsystem::Qubit}, std::vector<Subsystem>{Subsystem::A},
      std::vector<Subsystem>{Subsystem::B}, std::vector<Subsystem>{Subsystem::Qubit, Subsystem::B}};
  const int cases = std::max(o.cases, 1) * 25;
  for (int c = 0; c < cases; ++c) {
    const BasisSpec basis = gen.sector_basis();
    const CMatrix a = gen.matrix(basis.dim());
    CMatrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    const DensityMatrix full = DensityMatrix::from_matrix(basis, rho);
    const auto& keep = keeps[c % keeps.size()];
    const DensityMatrix red = partial_trace(full, keep);
    r.worst = std::max(r.worst, std::abs(red.matrix.trace() - Complex(1.0)));
    r.worst = std::max(r.worst, max_abs(red.matrix - red.matrix.adjoint()));
    const double s = linear_entropy(red);
    const double bound = 1.0 - 1.0 / static_cast<double>(red.dim());
    if (s < -kTolerances.trace || s > bound + kTolerances.trace) r.worst = std::max(r.worst, 1.0);
    ++r.cases;
  }
  r.detail = "trace, Hermiticity and entropy range of random reduced states";
  finish(r);
  return r;
}

PropertyResult check_dressed_eigenvectors(const SelftestOptions& o) {
  PropertyResult r = make("dressed-eigenvectors", kTolerances.eigen_residual);
  Gen gen(o.seed ^ 0x6);
  for (int c = 0; c < o.cases; ++c) {
    ModelParams p;
    p.m = gen.integer(1, 3);
    p.n = gen.integer(0, 2);
    p.n_prime = gen.integer(0, 2);
    p.lambda = gen.real(0.2, 3.0);
    p.delta = gen.real(-10.0, 10.0) * p.lambda;
    const BasisSpec basis = BasisSpec::sector_exact(p.n, p.n_prime, p.m);
    const FockOperator h = build_interaction_hamiltonian(p, basis);
    const SchwingerFrame f(basis);
    const double lam = big_lambda(p);
    const auto [plus, minus] = analytic_eigensystem(p);
    for (const auto& [d, e] : {std::pair{plus, lam}, std::pair{minus, -lam}}) {
      const StateVector psi = d.to_state(basis);
      r.worst = std::max(r.worst, (h.matrix * psi.amplitudes - e * psi.amplitudes).norm());
      r.worst = std::max(r.worst, std::abs(psi.norm() - 1.0));
      r.worst = std::max(r.worst, std::abs(expectation(f.jx(), psi)));
      r.worst = std::max(r.worst, std::abs(expectation(f.jy(), psi)));
    }
    ++r.cases;
  }
  r.detail = "H Psi = +-Lambda Psi, unit norm, <Jx> = <Jy> = 0";
  finish(r);
  return r;
}

PropertyResult check_gauge_invariance(const SelftestOptions& o) {
  PropertyResult r = make("gauge-invariance", 1e-10);
  Gen gen(o.seed ^ 0x7);
  for (int c = 0; c < o.cases; ++c) {
    ModelParams p;
    p.m = gen.integer(1, 3);
    p.n = gen.integer(0, 2);
    p.n_prime = gen.integer(0, 2);
    p.delta = gen.real(-5.0, 5.0);
    const BasisSpec basis = BasisSpec::sector_exact(p.n, p.n_prime, p.m);
    const SchwingerFrame frame(basis);
    const LoopPath path = constant_latitude_loop(gen.real(0.2, kPi - 0.2), 256, default_revolutions(basis));
    const CVector psi = analytic_eigensystem(p).first.to_state(basis).amplitudes;
    auto states = kernels::serial::loop_states(frame, psi, path.samples, FrameGauge::Anchored);
    HolonomyOptions opts;
    const double before = holonomy_from_states(states, path, opts).gamma;
    for (auto& s : states) s *= std::polar(1.0, gen.real(-kPi, kPi));
    const double after = holonomy_from_states(states, path, opts).gamma;
    const double shift = std::remainder((after - before) * path.revolutions, 2.0 * kPi);
    r.worst = std::max(r.worst, std::abs(shift));
    ++r.cases;
  }
  r.detail = "random unit phases on every sample state; loop phase compared modulo 2 pi";
  finish(r);
  return r;
}

PropertyResult check_branch_equality(const SelftestOptions& o) {
  PropertyResult r = make("branch-equality", 1e-8);
  Gen gen(o.seed ^ 0x8);
  const int cases = std::max(1, o.cases / 2);
  for (int c = 0; c < cases; ++c) {
    ModelParams p;
    p.m = gen.integer(1, 3);
    p.n = gen.integer(0, 2);
    p.n_prime = gen.integer(0, 2);
    p.lambda = gen.real(0.5, 2.0);
    const BasisSpec basis = BasisSpec::sector_exact(p.n, p.n_prime, p.m);
    const SchwingerFrame frame(basis);
    const LoopPath path = constant_latitude_loop(gen.real(0.2, kPi), 512, default_revolutions(basis));
    const auto [plus, minus] = analytic_eigensystem(p);
    HolonomyOptions opts;
    opts.jobs = o.jobs;
    const double gp = holonomy_phase(plus.to_state(basis), frame, path, opts).gamma;
    const double gm = holonomy_phase(minus.to_state(basis), frame, path, opts).gamma;
    r.worst = std::max(r.worst, std::abs(gp - gm));
    ++r.cases;
  }
  r.detail = "holonomy of Psi+ and Psi- at resonance";
  finish(r);
  return r;
}

PropertyResult check_norm_conservation(const SelftestOptions& o) {
  PropertyResult r = make("norm-conservation", kTolerances.adiabatic_norm_drift);
  Gen gen(o.seed ^ 0x9);
  const int cases = std::clamp(o.cases / 8, 1, 6);
  for (int c = 0; c < cases; ++c) {
    ModelParams p;
    p.m = gen.integer(1, 2);
    p.delta = gen.real(-2.0, 2.0);
    const BasisSpec basis = BasisSpec::sector_exact(0, 0, p.m);
    const SchwingerFrame frame(basis);
    DriveSchedule s;
    s.path = constant_latitude_loop(gen.real(0.3, 2.5), 64, default_revolutions(basis));
    s.total_time = 50.0;
    s.dynamic_phase_mode = DynamicPhaseMode::None;
    s.throw_on_leak = false;
    const StateVector psi = analytic_eigensystem(p).first.to_state(basis);
    const AdiabaticResult res =
        adiabatic_evolution(build_interaction_hamiltonian(p, basis), frame, s, psi);
    r.worst = std::max(r.worst, res.report.diagnostics.norm_drift);
    ++r.cases;
  }
  r.detail = "max |‖psi(t)‖ - 1| over short driven runs";
  finish(r);
  return r;
}

PropertyResult check_coupling_series(const SelftestOptions& o) {
  PropertyResult r = make("coupling-series", 1e-14);
  Gen gen(o.seed ^ 0xa);
  for (int c = 0; c < o.cases; ++c) {
    TrapParams t;
    t.m = gen.integer(0, 3);
    t.eta = gen.real(0.01, 0.4);
    t.g = gen.real(0.5, 2.0);
    const BasisSpec basis = BasisSpec::truncated(gen.integer(2, 12));
    const CMatrix f = effective_coupling_series(t, basis).op.matrix;
    r.worst = std::max(r.worst, max_abs(f - f.adjoint()));
    r.worst = std::max(r.worst, max_abs(f - CMatrix(f.diagonal().asDiagonal())));
    ++r.cases;
  }
  r.detail = "series operator Hermitian and diagonal in the number basis";
  finish(r);
  return r;
}

std::vector<PropertyResult> run_selftest(const SelftestOptions& o) {
  return {check_unitarity(o),           check_ladder_adjoint(o),      check_su2_commutators(o),
          check_number_conservation(o), check_partial_trace(o),       check_dressed_eigenvectors(o),
          check_gauge_invariance(o),    check_branch_equality(o),     check_norm_conservation(o),
          check_coupling_series(o)};
}

}  // namespace jcanyon
