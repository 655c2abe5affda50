#include "jcanyon/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace jcanyon {

namespace {

constexpr double kPi = std::numbers::pi;

// Lambda + Delta/2, written to avoid cancellation when Delta < 0.
double upper_gap(double big_lam, double delta, double coupling_sq) {
  if (delta >= 0.0) return big_lam + 0.5 * delta;
  return coupling_sq / (big_lam - 0.5 * delta);
}

// lambda^2 k / (Lambda (Lambda + Delta/2)), equal to 1 at resonance without
// rounding: Lambda^2 is formed from its definition instead of squaring the root.
double coupling_share(double big_lam, double delta, double coupling_sq) {
  if (delta >= 0.0) return coupling_sq / (0.25 * delta * delta + coupling_sq + 0.5 * big_lam * delta);
  return 1.0 - 0.5 * delta / big_lam;
}

FockOperator coupling_terms(const BasisSpec& basis, const std::array<int, 4>& powers, double lambda) {
  const FockOperator raise = build_sideband(basis, powers, LadderKind::Annihilate);
  const FockOperator lower = build_sideband(basis, powers, LadderKind::Create);
  return Complex(lambda) * (raise + lower);
}

}  // namespace

ModelParams ModelParams::lab_frame(int m, double lambda, double nu, double omega, int n,
                                   int n_prime) {
  ModelParams p;
  p.m = m;
  p.lambda = lambda;
  p.nu = nu;
  p.omega = omega;
  p.delta = omega - m * nu;
  p.n = n;
  p.n_prime = n_prime;
  return p;
}

void ModelParams::validate() const {
  if (m < 1) throw Error(ErrorCode::InvalidParams, "m must be >= 1");
  if (n < 0 || n_prime < 0) throw Error(ErrorCode::InvalidParams, "n and n' must be >= 0");
  if (!std::isfinite(lambda) || !std::isfinite(delta)) {
    throw Error(ErrorCode::InvalidParams, "non-finite coupling or detuning");
  }
  if (nu < 0.0) throw Error(ErrorCode::InvalidParams, "nu must be >= 0");
  if (!free_mode) {
    if (lambda == 0.0) {
      throw Error(ErrorCode::DegenerateCoupling, "lambda_m = 0 requires the free_mode flag");
    }
    if (lambda < 0.0) throw Error(ErrorCode::InvalidParams, "lambda_m must be > 0");
  }
  if (has_lab_frame()) {
    const double mismatch = std::abs(omega - m * nu - delta);
    if (mismatch > 1e-9 * std::max({1.0, std::abs(omega), std::abs(m * nu)})) {
      throw Error(ErrorCode::InvalidParams, "omega - m nu != Delta_m");
    }
  }
}

StateVector DressedState::to_state(const BasisSpec& basis) const {
  StateVector psi{basis, CVector::Zero(basis.dim())};
  BasisState up{Qubit::Up, {params.n, params.n_prime, 0, 0}};
  BasisState down{Qubit::Down, {params.n + params.m, params.n_prime, 0, 0}};
  psi.amplitudes(basis.index_of(up)) = c_up;
  psi.amplitudes(basis.index_of(down)) = c_down;
  return psi;
}

double factorial_ratio(int n, int m) {
  if (n < 0 || m < 0) throw Error(ErrorCode::InvalidParams, "factorial_ratio of negative argument");
  if (n + m <= 20) {
    unsigned long long r = 1;
    for (int k = n + 1; k <= n + m; ++k) r *= static_cast<unsigned long long>(k);
    return static_cast<double>(r);
  }
  return std::exp(std::lgamma(n + m + 1.0) - std::lgamma(n + 1.0));
}

double big_lambda(const ModelParams& p) {
  const double g = p.coupling();
  return std::sqrt(0.25 * p.delta * p.delta + g * g * factorial_ratio(p.n, p.m));
}

FockOperator build_full_hamiltonian(const ModelParams& p, const BasisSpec& basis) {
  p.validate();
  FockOperator h = Complex(p.nu) * (build_number(basis, Mode::A) + build_number(basis, Mode::B)) +
                   Complex(0.5 * p.omega) * build_pauli(basis, PauliKind::Z);
  if (p.coupling() != 0.0) h = h + coupling_terms(basis, {p.m, 0, 0, 0}, p.coupling());
  return h;
}

FockOperator build_interaction_hamiltonian(const ModelParams& p, const BasisSpec& basis) {
  p.validate();
  FockOperator h = Complex(0.5 * p.delta) * build_pauli(basis, PauliKind::Z);
  if (p.coupling() != 0.0) h = h + coupling_terms(basis, {p.m, 0, 0, 0}, p.coupling());
  return h;
}

std::pair<DressedState, DressedState> analytic_eigensystem(const ModelParams& p) {
  p.validate();
  DressedState plus{p, Branch::Plus, 1.0, 0.0, big_lambda(p)};
  if (p.free_mode) {
    if (p.delta < 0.0) {
      plus.c_up = 0.0;
      plus.c_down = 1.0;
    }
  } else {
    const double k = factorial_ratio(p.n, p.m);
    const double lam = plus.big_lambda;
    const double g2k = p.lambda * p.lambda * k;
    const double gap = upper_gap(lam, p.delta, g2k);
    const double denom = std::sqrt(2.0) * std::sqrt(lam * gap);
    plus.c_up = gap / denom;
    plus.c_down = p.lambda * std::sqrt(k) / denom;
  }
  DressedState minus{p, Branch::Minus, plus.c_down, -plus.c_up, plus.big_lambda};
  return {plus, minus};
}

void check_solid_angle(double omega_solid) {
  const double slack = kTolerances.solid_angle_slack;
  if (!std::isfinite(omega_solid) || omega_solid < -slack || omega_solid > 4.0 * kPi + slack) {
    throw Error(ErrorCode::BadSolidAngle,
                "solid angle " + std::to_string(omega_solid) + " outside [0, 4pi]");
  }
}

double analytic_berry_phase(const ModelParams& p, double omega_solid, Branch branch) {
  check_solid_angle(omega_solid);
  p.validate();
  const double spin = p.n - p.n_prime;
  if (p.free_mode) {
    const auto [plus, minus] = analytic_eigensystem(p);
    const DressedState& s = branch == Branch::Plus ? plus : minus;
    return 0.5 * omega_solid * (spin + p.m * s.c_down * s.c_down);
  }
  const double k = factorial_ratio(p.n, p.m);
  const double lam = big_lambda(p);
  const double g2k = p.lambda * p.lambda * k;
  const double entangling = 0.5 * p.m * coupling_share(lam, p.delta, g2k);
  if (branch == Branch::Plus) return 0.5 * omega_solid * (spin + entangling);
  return 0.5 * omega_solid * (spin + p.m - entangling);
}

StatisticalFactor statistical_factor(const ModelParams& p, double omega_solid) {
  check_solid_angle(omega_solid);
  p.validate();
  if (p.n != 0 || p.n_prime != 0) {
    throw Error(ErrorCode::WrongExcitation, "statistical factor is defined for n = n' = 0");
  }
  StatisticalFactor f;
  if (p.free_mode) {
    const auto [plus, minus] = analytic_eigensystem(p);
    f.ratio = 2.0 * plus.c_down * plus.c_down;
  } else {
    const double lam = big_lambda(p);
    const double g2k = p.lambda * p.lambda * factorial_ratio(0, p.m);
    f.ratio = coupling_share(lam, p.delta, g2k);
  }
  f.alpha = 0.25 * p.m * omega_solid / (2.0 * kPi) * f.ratio;
  return f;
}

double entropy_vs_detuning(const ModelParams& p) {
  const auto [plus, minus] = analytic_eigensystem(p);
  return 2.0 * plus.c_up * plus.c_up * plus.c_down * plus.c_down;
}

void TwoAnyonParams::validate() const {
  if (m < 1) throw Error(ErrorCode::InvalidParams, "m must be >= 1");
  if (lambda == 0.0) throw Error(ErrorCode::DegenerateCoupling, "lambda_m = 0");
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidParams, "lambda_m must be > 0");
}

FockOperator build_two_anyon_hamiltonian(const TwoAnyonParams& p, const BasisSpec& basis) {
  p.validate();
  if (basis.mode_count() != 4) throw Error(ErrorCode::BasisMismatch, "two-anyon model needs four modes");
  return coupling_terms(basis, {p.m, 0, p.m, 0}, p.lambda);
}

StateVector two_anyon_eigenstate(const TwoAnyonParams& p, const BasisSpec& basis, Branch branch) {
  p.validate();
  if (basis.mode_count() != 4) throw Error(ErrorCode::BasisMismatch, "two-anyon state needs four modes");
  StateVector psi{basis, CVector::Zero(basis.dim())};
  const double s = 1.0 / std::sqrt(2.0);
  psi.amplitudes(basis.index_of({Qubit::Up, {0, 0, 0, 0}})) = s;
  psi.amplitudes(basis.index_of({Qubit::Down, {p.m, 0, p.m, 0}})) = branch == Branch::Plus ? s : -s;
  return psi;
}

double two_anyon_analytic_phase(int m, double omega_solid) {
  check_solid_angle(omega_solid);
  if (m < 1) throw Error(ErrorCode::InvalidParams, "m must be >= 1");
  return 0.5 * m * omega_solid;
}

}  // namespace jcanyon
