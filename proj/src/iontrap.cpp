#include "jcanyon/iontrap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace jcanyon {

namespace {

constexpr double kPi = std::numbers::pi;

Complex i_power(int m) {
  static const Complex cycle[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  return cycle[((m % 4) + 4) % 4];
}

Verdict grade(double ratio) {
  if (ratio > kTolerances.budget_fail) return Verdict::Fail;
  if (ratio >= kTolerances.budget_pass) return Verdict::Warn;
  return Verdict::Pass;
}

int max_occupation_a(const BasisSpec& basis) {
  int n = 0;
  for (Index i = 0; i < basis.dim(); ++i) n = std::max(n, basis.state(i).occupation[0]);
  return n;
}

FockOperator coupling_diagonal(const TrapParams& t, const BasisSpec& basis) {
  FockOperator op{basis, CMatrix::Zero(basis.dim(), basis.dim()), {}};
  for (Index i = 0; i < basis.dim(); ++i) op.matrix(i, i) = coupling_element(t, basis.state(i).occupation[0]);
  return op;
}

FockOperator qubit_drive(const BasisSpec& basis, double phi) {
  return std::polar(1.0, phi) * build_pauli(basis, PauliKind::Plus) +
         std::polar(1.0, -phi) * build_pauli(basis, PauliKind::Minus);
}

}  // namespace

std::vector<std::string> TrapParams::validate(int n_max) const {
  if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorCode::InvalidParams, "g must be positive");
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidParams, "eta must lie in (0, 1)");
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidParams, "nu must be positive");
  if (m < 0) throw Error(ErrorCode::InvalidParams, "sideband order must be >= 0");
  if (!std::isfinite(delta_m) || !std::isfinite(phi_L)) {
    throw Error(ErrorCode::InvalidParams, "non-finite detuning or laser phase");
  }
  std::vector<std::string> warnings;
  if (n_max >= 0 && eta * eta * (n_max + 1) > 0.1) {
    warnings.push_back("eta^2 (N_max + 1) = " + std::to_string(eta * eta * (n_max + 1)) +
                       " exceeds 0.1; Lamb-Dicke expansion is poor");
  }
  if (std::abs(delta_m) / nu >= kTolerances.budget_pass) {
    warnings.push_back("|Delta_m| / nu = " + std::to_string(std::abs(delta_m) / nu) +
                       "; neighbouring sidebands are not isolated");
  }
  return warnings;
}

nlohmann::json TrapParams::to_json() const {
  return {{"g", g},   {"eta", eta},         {"nu", nu},      {"omega0", omega0},
          {"m", m},   {"delta_m", delta_m}, {"phi_L", phi_L}};
}

double coupling_element(const TrapParams& t, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidParams, "negative occupation");
  const double eta2 = t.eta * t.eta;
  double term = std::pow(t.eta, t.m) / std::tgamma(t.m + 1.0);
  double sum = term;
  for (int l = 0; l < n; ++l) {
    term *= -eta2 * static_cast<double>(n - l) / (static_cast<double>(l + 1) * (l + 1 + t.m));
    sum += term;
    if (std::abs(term) < 1e-16) break;
  }
  return 0.5 * t.g * std::exp(-0.5 * eta2) * sum;
}

CouplingSeries effective_coupling_series(const TrapParams& t, const BasisSpec& basis) {
  CouplingSeries s{coupling_diagonal(t, basis), i_power(t.m), max_occupation_a(basis), {}};
  s.warnings = t.validate(s.n_max);
  // Size of the l = N_max term on |N_max>, relative to g/2.
  const double last = std::exp((2.0 * s.n_max + t.m) * std::log(t.eta) - std::lgamma(s.n_max + t.m + 1.0));
  if (last > 1e-12) {
    s.warnings.push_back("TruncationWarning: l = N_max term " + std::to_string(last) + " exceeds 1e-12");
  }
  return s;
}

Complex lamb_dicke_lambda(const TrapParams& t) {
  const double mag = t.g / (2.0 * std::tgamma(t.m + 1.0)) * std::pow(t.eta, t.m) * std::exp(-0.5 * t.eta * t.eta);
  return mag * i_power(t.m);
}

FockOperator build_ion_hamiltonian(const TrapParams& t, const BasisSpec& basis) {
  t.validate();
  const FockOperator lowering = build_sideband(basis, {t.m, 0, 0, 0}, LadderKind::Annihilate);
  const FockOperator forward = std::polar(1.0, t.phi_L) * (coupling_diagonal(t, basis) * lowering);
  return Complex(0.5 * t.delta_m) * build_pauli(basis, PauliKind::Z) + forward + forward.adjoint();
}

FockOperator build_carrier_hamiltonian(const TrapParams& t, const BasisSpec& basis, double phi) {
  TrapParams carrier = t;
  carrier.m = 0;
  return coupling_diagonal(carrier, basis) * qubit_drive(basis, phi);
}

StateVector apply_carrier_pulse(const TrapParams& t, const StateVector& psi, double phi,
                                double duration, PulseMode mode) {
  const FockOperator h = mode == PulseMode::Finite
                             ? build_carrier_hamiltonian(t, psi.basis, phi)
                             : Complex(0.5 * t.g) * qubit_drive(psi.basis, phi);
  return apply_unitary(matrix_exponential(h, Complex(0.0, -duration)), psi);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Warn: return "warn";
    case Verdict::Fail: return "fail";
  }
  return "fail";
}

nlohmann::json BudgetReport::to_json() const {
  return {{"theta_rate", theta_rate},
          {"phi_rate", phi_rate},
          {"detuning_ratio", detuning_ratio},
          {"theta_verdict", to_string(theta_verdict)},
          {"phi_verdict", to_string(phi_verdict)},
          {"detuning_verdict", to_string(detuning_verdict)},
          {"overall", to_string(overall)}};
}

BudgetReport adiabaticity_budget(const TrapParams& t, const DriveSchedule& schedule,
                                 const std::vector<double>& segment_weights) {
  const ScheduleClock clock(schedule, segment_weights);
  const double lambda = std::abs(lamb_dicke_lambda(t));
  // Dense time sampling; the profiles are smooth within a segment, and the
  // segment boundaries are included explicitly.
  std::vector<double> times;
  const int per_segment = 2048;
  double start = 0.0;
  for (double d : clock.segment_durations()) {
    for (int k = 0; k <= per_segment; ++k) times.push_back(start + d * k / per_segment);
    start += d;
  }
  BudgetReport r;
  for (double time : times) {
    // Evaluate just inside the segment on either side of a boundary.
    for (double eps : {-1e-12, 1e-12}) {
      const auto [dtheta, dphi] = clock.velocity(std::clamp(time + eps * schedule.total_time, 0.0, schedule.total_time));
      r.theta_rate = std::max(r.theta_rate, std::abs(dtheta) / lambda);
      r.phi_rate = std::max(r.phi_rate, std::abs(dphi) / lambda);
    }
  }
  r.detuning_ratio = std::abs(t.delta_m) / t.nu;
  r.theta_verdict = grade(r.theta_rate);
  r.phi_verdict = grade(r.phi_rate);
  r.detuning_verdict = grade(r.detuning_ratio);
  r.overall = std::max({r.theta_verdict, r.phi_verdict, r.detuning_verdict});
  return r;
}

double trap_lambda(const TrapParams& t) { return std::abs(coupling_element(t, 0)); }

double trap_rabi_frequency(const TrapParams& t) {
  const double lam = trap_lambda(t);
  return std::sqrt(0.25 * t.delta_m * t.delta_m + lam * lam * std::tgamma(t.m + 1.0));
}

double splitting_shift(const TrapParams& t, const DriveSchedule& schedule, int samples) {
  if (samples < 2 || samples % 2 != 0) throw Error(ErrorCode::InvalidParams, "samples must be even and >= 2");
  const BasisSpec basis = BasisSpec::sector_exact(0, 0, t.m);
  const SchwingerFrame frame(basis);
  const CMatrix h0 = build_ion_hamiltonian(t, basis).matrix;
  ModelParams model;
  model.m = t.m;
  model.lambda = trap_lambda(t);
  model.delta = t.delta_m;
  const auto [plus, minus] = analytic_eigensystem(model);
  const CVector vp = plus.to_state(basis).amplitudes;
  const CVector vm = minus.to_state(basis).amplitudes;
  std::vector<double> weights;
  if (schedule.timing == SegmentTiming::ByFubiniStudy) {
    weights = fubini_study_lengths(schedule.path, frame, vp, schedule.gauge);
  }
  const ScheduleClock clock(schedule, weights);
  const double rabi = trap_rabi_frequency(t);
  const double tau = schedule.total_time;

  auto unitary = [&](double theta, double phi) {
    return schedule.gauge == FrameGauge::Anchored ? anchored_unitary(frame, theta, phi).matrix
                                                  : build_unitary(frame, theta, phi).matrix;
  };
  auto excess = [&](double time) {
    const SpherePoint p = clock.at(time);
    const auto [dtheta, dphi] = clock.velocity(time);
    const double h = 1e-6;
    const CMatrix u = unitary(p.theta, p.phi);
    const CMatrix du =
        (unitary(p.theta + h * dtheta, p.phi + h * dphi) - unitary(p.theta - h * dtheta, p.phi - h * dphi)) /
        (2.0 * h);
    CMatrix moving = h0 - Complex(0.0, 1.0) * (u.adjoint() * du);
    moving = (0.5 * (moving + moving.adjoint())).eval();
    const Eigen::SelfAdjointEigenSolver<CMatrix> es(moving);
    double best_p = -1.0, best_m = -1.0, e_p = 0.0, e_m = 0.0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double op = std::norm(vp.dot(es.eigenvectors().col(i)));
      const double om = std::norm(vm.dot(es.eigenvectors().col(i)));
      if (op > best_p) best_p = op, e_p = es.eigenvalues()(i);
      if (om > best_m) best_m = om, e_m = es.eigenvalues()(i);
    }
    return 0.5 * (e_p - e_m) - rabi;
  };
  // Composite Simpson.
  double acc = excess(0.0) + excess(tau);
  for (int k = 1; k < samples; ++k) acc += (k % 2 ? 4.0 : 2.0) * excess(tau * k / samples);
  return acc * tau / (3.0 * samples);
}

RamseyRun make_ramsey_run(const TrapParams& t, double omega_solid, double time_units, int n_steps) {
  check_solid_angle(omega_solid);
  RamseyRun run;
  run.trap = t;
  run.path = pole_anchored_loop(theta_for_solid_angle(omega_solid), n_steps);
  run.schedule.path = run.path;
  run.schedule.lambda_m = trap_lambda(t);
  run.schedule.total_time = time_units / run.schedule.lambda_m;
  run.schedule.profile = TimeProfile::Plateau;
  run.schedule.timing = SegmentTiming::ByFubiniStudy;
  run.schedule.dynamic_phase_mode = DynamicPhaseMode::None;
  return run;
}

RamseyRun ramsey_protocol(RamseyRun run) {
  const TrapParams& trap = run.trap;
  if (trap.m < 1) throw Error(ErrorCode::InvalidParams, "the Ramsey loop needs a sideband order m >= 1");
  const BasisSpec basis = BasisSpec::sector_exact(0, 0, trap.m);
  auto warnings = trap.validate(max_occupation_a(basis));

  RamseyResult& res = run.result;
  const double lambda = trap_lambda(trap);
  const double rabi = trap_rabi_frequency(trap);
  run.schedule.path = run.path;
  run.schedule.lambda_m = lambda;
  res.requested_time = run.schedule.total_time;
  auto shift_at = [&](double tau) {
    if (!run.dressed_snap) return 0.0;
    DriveSchedule s = run.schedule;
    s.total_time = tau;
    return splitting_shift(trap, s);
  };
  res.splitting_shift = shift_at(run.schedule.total_time);
  const double cycles = (run.schedule.total_time * rabi + res.splitting_shift) / (2.0 * kPi);
  if (run.snap_to_cycle) {
    run.j_cycles = std::max(1, static_cast<int>(std::lround(cycles)));
    const double target = 2.0 * kPi * run.j_cycles;
    // The shift scales as 1/tau; solve rabi tau + D / tau = target twice,
    // refreshing D from the shift at the new time.
    double tau = run.schedule.total_time;
    for (int pass = 0; pass < 2 && run.dressed_snap; ++pass) {
      const double d = res.splitting_shift * tau;
      const double disc = target * target - 4.0 * rabi * d;
      if (disc < 0.0) break;
      tau = (target + std::sqrt(disc)) / (2.0 * rabi);
      res.splitting_shift = shift_at(tau);
    }
    if (!run.dressed_snap) tau = target / rabi;
    run.schedule.total_time = tau;
    res.cycle_residual = std::abs(std::remainder(rabi * tau + res.splitting_shift, 2.0 * kPi));
  } else {
    run.j_cycles = static_cast<int>(std::lround(cycles));
    res.cycle_residual =
        std::abs(std::remainder(rabi * run.schedule.total_time + res.splitting_shift, 2.0 * kPi));
    if (res.cycle_residual > kTolerances.cycle_mismatch) {
      const double contrast = std::cos(0.5 * res.cycle_residual);
      throw Error(ErrorCode::CycleMismatch,
                  "loop time misses the Rabi cycle by " + std::to_string(res.cycle_residual) +
                      " rad (contrast " + std::to_string(contrast) + ")");
    }
  }
  res.total_time = run.schedule.total_time;

  ModelParams model;
  model.m = trap.m;
  model.lambda = lambda;
  model.delta = trap.delta_m;
  const auto [plus, minus] = analytic_eigensystem(model);
  const StateVector psi_plus = plus.to_state(basis);
  const StateVector psi_minus = minus.to_state(basis);
  const StateVector ground = StateVector::basis_state(basis, {Qubit::Down, {0, 0, 0, 0}});

  const double pulse = kPi / (2.0 * trap.g);
  const StateVector prepared = apply_carrier_pulse(trap, ground, kPi / 2.0, pulse, run.pulses);

  const SchwingerFrame frame(basis);
  const FockOperator h = build_ion_hamiltonian(trap, basis);
  AdiabaticOptions opts;
  opts.followed = {psi_plus, psi_minus, ground};
  opts.timing_state = psi_plus;
  const AdiabaticResult evolved = adiabatic_evolution(h, frame, run.schedule, prepared, opts);
  for (const auto& w : evolved.report.warnings) {
    if (w.find("several followed states") == std::string::npos) warnings.push_back(w);
  }

  const StateVector analysed = apply_carrier_pulse(trap, evolved.final_state, kPi / 2.0, pulse, run.pulses);
  double p_down = 0.0;
  for (Index i = 0; i < basis.dim(); ++i) {
    if (basis.state(i).qubit == Qubit::Down) p_down += std::norm(analysed.amplitudes(i));
  }
  res.norm_drift = std::abs(analysed.norm() - 1.0);
  if (res.norm_drift > kTolerances.adiabatic_norm_drift) {
    throw Error(ErrorCode::NormDrift, "Ramsey state norm drifted by " + std::to_string(res.norm_drift));
  }
  if (p_down < -1e-9 || p_down > 1.0 + 1e-9) {
    throw Error(ErrorCode::InvalidDensity, "p_down outside [0, 1]");
  }
  res.p_down = std::clamp(p_down, 0.0, 1.0);
  res.gamma_inferred = std::acos(std::clamp(1.0 - 2.0 * res.p_down, -1.0, 1.0));
  res.sign_unobservable = true;
  res.gamma_analytic = analytic_berry_phase(model, run.path.omega_solid);
  res.p_down_analytic = 0.5 * (1.0 - std::cos(res.gamma_analytic));
  res.leak = evolved.report.diagnostics.max_nonadiabatic_leak;

  std::vector<double> weights;
  if (run.schedule.timing == SegmentTiming::ByFubiniStudy) {
    weights = fubini_study_lengths(run.path, frame, psi_plus.amplitudes, run.schedule.gauge);
  }
  res.budget = adiabaticity_budget(trap, run.schedule, weights);
  if (trap.delta_m != 0.0) {
    warnings.push_back("off resonance the dressed branches acquire different phases; "
                       "p_down no longer follows (1 - cos gamma)/2");
  }
  run.warnings = std::move(warnings);
  return run;
}

nlohmann::json RamseyRun::to_json() const {
  return {{"trap", trap.to_json()},
          {"schedule", schedule.to_json()},
          {"j_cycles", j_cycles},
          {"snap_to_cycle", snap_to_cycle},
          {"dressed_snap", dressed_snap},
          {"pulses", pulses == PulseMode::Finite ? "finite" : "ideal"},
          {"result",
           {{"p_down", result.p_down},
            {"gamma_inferred", result.gamma_inferred},
            {"sign_unobservable", result.sign_unobservable},
            {"gamma_analytic", result.gamma_analytic},
            {"p_down_analytic", result.p_down_analytic},
            {"leak", result.leak},
            {"total_time", result.total_time},
            {"requested_time", result.requested_time},
            {"cycle_residual", result.cycle_residual},
            {"splitting_shift", result.splitting_shift},
            {"norm_drift", result.norm_drift},
            {"budget", result.budget.to_json()}}},
          {"warnings", warnings}};
}

std::vector<std::string> RamseyRun::csv_header() {
  return {"m",          "eta",     "g",              "delta_m",        "omega_solid",
          "total_time", "p_down",  "gamma_inferred", "gamma_analytic", "leak"};
}

std::vector<double> RamseyRun::csv_row() const {
  return {static_cast<double>(trap.m), trap.eta, trap.g, trap.delta_m, path.omega_solid,
          result.total_time, result.p_down, result.gamma_inferred, result.gamma_analytic, result.leak};
}

}  // namespace jcanyon
