#include "jcanyon/berry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "jcanyon/kernels.hpp"

namespace jcanyon {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool all_even(const std::vector<std::size_t>& lengths) {
  return std::all_of(lengths.begin(), lengths.end(), [](std::size_t n) { return n >= 2 && n % 2 == 0; });
}

PhaseReport holonomy_core(const std::vector<CVector>& states, const LoopPath& path,
                          const HolonomyOptions& options, bool parallel) {
  if (states.size() != path.samples.size()) {
    throw Error(ErrorCode::BadPath, "one state per path sample is required");
  }
  auto overlaps = [&](std::size_t stride) {
    return parallel ? kernels::omp::chain_overlaps(states, stride, options.jobs)
                    : kernels::serial::chain_overlaps(states, stride);
  };
  const BargmannResult fine = bargmann_phase(overlaps(1));

  PhaseReport r;
  r.method = PhaseMethod::Holonomy;
  r.n_steps = static_cast<int>(path.n_intervals());
  r.revolutions = path.revolutions;
  r.sign = options.sign_normalize ? sign_convention() : 1;
  r.diagnostics.min_overlap = fine.min_overlap;

  double raw = fine.phase;
  if (options.extrapolate && all_even(path.segment_lengths())) {
    const BargmannResult coarse = bargmann_phase(overlaps(2));
    // The correction is taken modulo 2 pi so that it stays small in any gauge.
    const double gap = std::remainder(fine.phase - coarse.phase, kTwoPi);
    raw = fine.phase + gap / 3.0;
    r.extrapolated = true;
    r.diagnostics.discretization_estimate = std::abs(gap) / 3.0 / path.revolutions;
  } else if (options.extrapolate) {
    r.warnings.push_back("segment sample counts are not all even; no extrapolation");
  }
  const double per_rev = 1.0 / path.revolutions;
  r.gamma_plain = r.sign * fine.phase * per_rev;
  r.set_gamma(r.sign * raw * per_rev);

  // A single step turning by more than pi/4 makes the winding count suspect.
  const auto ov = overlaps(1);
  const double max_step = std::accumulate(ov.begin(), ov.end(), 0.0, [](double acc, Complex z) {
    return std::max(acc, std::abs(std::arg(z)));
  });
  if (max_step > kPi / 4.0) {
    r.winding_resolved = false;
    r.warnings.push_back("per-step phase exceeds pi/4; winding count unresolved");
  }
  return r;
}

PhaseReport holonomy_dispatch(const StateVector& state, const SchwingerFrame& frame,
                              const LoopPath& path, const HolonomyOptions& options, bool parallel) {
  if (!(state.basis == frame.basis())) {
    throw Error(ErrorCode::BasisMismatch, "state and Schwinger frame use different bases");
  }
  path.validate();
  if (std::abs(state.norm() - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvalidParams, "holonomy requires a normalized state");
  }
  const auto states =
      parallel ? kernels::omp::loop_states(frame, state.amplitudes, path.samples, options.gauge, options.jobs)
               : kernels::serial::loop_states(frame, state.amplitudes, path.samples, options.gauge);
  return holonomy_core(states, path, options, parallel);
}

}  // namespace

const char* to_string(PhaseMethod m) {
  switch (m) {
    case PhaseMethod::Analytic: return "analytic";
    case PhaseMethod::Holonomy: return "holonomy";
    case PhaseMethod::Adiabatic: return "adiabatic";
  }
  return "analytic";
}

const char* to_string(TimeProfile p) {
  switch (p) {
    case TimeProfile::Uniform: return "uniform";
    case TimeProfile::Smoothstep: return "smoothstep";
    case TimeProfile::Plateau: return "plateau";
  }
  return "uniform";
}

const char* to_string(SegmentTiming t) {
  return t == SegmentTiming::BySamples ? "samples" : "fubini-study";
}

void PhaseReport::set_gamma(double g) {
  gamma = g;
  principal = std::remainder(g, kTwoPi);
  if (principal <= -kPi) principal += kTwoPi;
  winding = std::lround((g - principal) / kTwoPi);
}

nlohmann::json PhaseReport::to_json() const {
  nlohmann::json doc{
      {"method", to_string(method)},
      {"gamma", gamma},
      {"principal", principal},
      {"winding", winding},
      {"winding_resolved", winding_resolved},
      {"gamma_plain", gamma_plain},
      {"extrapolated", extrapolated},
      {"dynamic_phase", dynamic_phase},
      {"revolutions", revolutions},
      {"sign", sign},
      {"diagnostics",
       {{"max_nonadiabatic_leak", diagnostics.max_nonadiabatic_leak},
        {"discretization_estimate", diagnostics.discretization_estimate},
        {"min_overlap", diagnostics.min_overlap},
        {"norm_drift", diagnostics.norm_drift}}},
      {"reproducibility", {{"n_steps", n_steps}, {"total_time", total_time}}},
      {"warnings", warnings},
  };
  if (seed) {
    doc["reproducibility"]["seed"] = *seed;
  } else {
    doc["reproducibility"]["seed"] = nullptr;
  }
  return doc;
}

PhaseReport analytic_phase_report(const ModelParams& p, double omega_solid, Branch branch) {
  PhaseReport r;
  r.method = PhaseMethod::Analytic;
  r.set_gamma(analytic_berry_phase(p, omega_solid, branch));
  return r;
}

BargmannResult bargmann_phase(const std::vector<Complex>& overlaps) {
  BargmannResult r;
  for (std::size_t k = 0; k < overlaps.size(); ++k) {
    const double mag = std::abs(overlaps[k]);
    r.min_overlap = std::min(r.min_overlap, mag);
    if (mag < kTolerances.overlap_floor) {
      throw Error(ErrorCode::VanishingOverlap,
                  "overlap " + std::to_string(mag) + " at step " + std::to_string(k) + "; refine the path");
    }
    r.phase -= std::arg(overlaps[k]);
  }
  return r;
}

PhaseReport holonomy_phase(const StateVector& state, const SchwingerFrame& frame,
                           const LoopPath& path, const HolonomyOptions& options) {
  return holonomy_dispatch(state, frame, path, options, true);
}

PhaseReport holonomy_phase_serial(const StateVector& state, const SchwingerFrame& frame,
                                  const LoopPath& path, const HolonomyOptions& options) {
  return holonomy_dispatch(state, frame, path, options, false);
}

PhaseReport holonomy_from_states(const std::vector<CVector>& states, const LoopPath& path,
                                 const HolonomyOptions& options) {
  path.validate();
  return holonomy_core(states, path, options, false);
}

int calibrate_sign_convention() {
  ModelParams p;
  p.m = 2;
  p.lambda = 1.0;
  p.delta = 0.0;
  const BasisSpec basis = BasisSpec::sector_exact(0, 0, p.m);
  const SchwingerFrame frame(basis);
  const StateVector psi = analytic_eigensystem(p).first.to_state(basis);
  const LoopPath path = constant_latitude_loop(0.5, 1024, default_revolutions(basis));
  HolonomyOptions opts;
  opts.sign_normalize = false;
  const double raw = holonomy_phase_serial(psi, frame, path, opts).gamma;
  if (std::abs(raw) < 1e-8) {
    throw Error(ErrorCode::CalibrationAmbiguous, "calibration holonomy vanishes");
  }
  const double reference = analytic_berry_phase(p, path.omega_solid);
  return raw * reference > 0.0 ? 1 : -1;
}

int sign_convention() {
  static const int sign = calibrate_sign_convention();
  return sign;
}

double profile_position(TimeProfile profile, double u, double r) {
  u = std::clamp(u, 0.0, 1.0);
  switch (profile) {
    case TimeProfile::Uniform: return u;
    case TimeProfile::Smoothstep: return u * u * (3.0 - 2.0 * u);
    case TimeProfile::Plateau: {
      const double vmax = 1.0 / (1.0 - r);
      if (u > 1.0 - r) return 1.0 - profile_position(profile, 1.0 - u, r);
      if (u < r) return vmax * (0.5 * u - r / kTwoPi * std::sin(kPi * u / r));
      return vmax * (0.5 * r + (u - r));
    }
  }
  return u;
}

double profile_rate(TimeProfile profile, double u, double r) {
  u = std::clamp(u, 0.0, 1.0);
  switch (profile) {
    case TimeProfile::Uniform: return 1.0;
    case TimeProfile::Smoothstep: return 6.0 * u * (1.0 - u);
    case TimeProfile::Plateau: {
      const double vmax = 1.0 / (1.0 - r);
      const double edge = std::min(u, 1.0 - u);
      if (edge < r) {
        const double s = std::sin(0.5 * kPi * edge / r);
        return vmax * s * s;
      }
      return vmax;
    }
  }
  return 1.0;
}

std::vector<std::string> DriveSchedule::validate() const {
  if (!(total_time > 0.0) || !std::isfinite(total_time)) {
    throw Error(ErrorCode::InvalidParams, "total_time must be positive");
  }
  if (!(lambda_m > 0.0)) throw Error(ErrorCode::InvalidParams, "lambda_m must be positive");
  if (profile == TimeProfile::Plateau && !(plateau_fraction > 0.0 && plateau_fraction <= 0.5)) {
    throw Error(ErrorCode::InvalidParams, "plateau_fraction must lie in (0, 0.5]");
  }
  if (!(leak_threshold > 0.0)) throw Error(ErrorCode::InvalidParams, "leak_threshold must be positive");
  path.validate();
  std::vector<std::string> warnings;
  const double units = total_time * lambda_m;
  if (units < 10.0) {
    warnings.push_back("total_time is below 10/lambda_m; the drive is far from adiabatic");
  } else if (units < 100.0) {
    warnings.push_back("total_time is below the recommended 100/lambda_m");
  }
  return warnings;
}

nlohmann::json DriveSchedule::to_json() const {
  return {{"path", path.to_json()},
          {"total_time", total_time},
          {"lambda_m", lambda_m},
          {"profile", to_string(profile)},
          {"plateau_fraction", plateau_fraction},
          {"timing", to_string(timing)},
          {"dynamic_phase_mode",
           to_string(dynamic_phase_mode)},
          {"gauge", gauge == FrameGauge::Anchored ? "anchored" : "literal"}};
}

ScheduleClock::ScheduleClock(const DriveSchedule& schedule, std::vector<double> weights)
    : schedule_(&schedule), lengths_(schedule.path.segment_lengths()) {
  const std::size_t n = lengths_.size();
  double total = 0.0;
  if (weights.size() == n) total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) {
    weights.assign(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) weights[s] = static_cast<double>(lengths_[s]);
    total = std::accumulate(weights.begin(), weights.end(), 0.0);
  }
  if (!(total > 0.0)) throw Error(ErrorCode::BadPath, "path has no intervals");
  double t = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    starts_.push_back(t);
    durations_.push_back(schedule.total_time * weights[s] / total);
    t += durations_.back();
  }
}

ScheduleClock::Locus ScheduleClock::locate(double t) const {
  t = std::clamp(t, 0.0, schedule_->total_time);
  std::size_t seg = 0;
  bool found = false;
  for (std::size_t s = 0; s < durations_.size(); ++s) {
    if (durations_[s] <= 0.0) continue;
    if (!found || t >= starts_[s]) {
      seg = s;
      found = true;
    }
  }
  const double u = durations_[seg] > 0.0 ? (t - starts_[seg]) / durations_[seg] : 1.0;
  return {seg, std::clamp(u, 0.0, 1.0)};
}

SpherePoint ScheduleClock::at(double t) const {
  const Locus l = locate(t);
  const auto& samples = schedule_->path.samples;
  const std::size_t base = schedule_->path.segment_starts[l.segment];
  const std::size_t len = lengths_[l.segment];
  if (len == 0) return samples[base];
  const double x = profile_position(schedule_->profile, l.u, schedule_->plateau_fraction) * len;
  const std::size_t k = std::min(static_cast<std::size_t>(x), len - 1);
  const double frac = x - static_cast<double>(k);
  const SpherePoint& a = samples[base + k];
  const SpherePoint& b = samples[base + k + 1];
  return {a.theta + frac * (b.theta - a.theta), a.phi + frac * (b.phi - a.phi)};
}

std::pair<double, double> ScheduleClock::velocity(double t) const {
  const Locus l = locate(t);
  const auto& samples = schedule_->path.samples;
  const std::size_t base = schedule_->path.segment_starts[l.segment];
  const std::size_t len = lengths_[l.segment];
  if (len == 0 || durations_[l.segment] <= 0.0) return {0.0, 0.0};
  const double x = profile_position(schedule_->profile, l.u, schedule_->plateau_fraction) * len;
  const std::size_t k = std::min(static_cast<std::size_t>(x), len - 1);
  const double rate =
      profile_rate(schedule_->profile, l.u, schedule_->plateau_fraction) * len / durations_[l.segment];
  const SpherePoint& a = samples[base + k];
  const SpherePoint& b = samples[base + k + 1];
  return {(b.theta - a.theta) * rate, (b.phi - a.phi) * rate};
}

std::vector<double> fubini_study_lengths(const LoopPath& path, const SchwingerFrame& frame,
                                         const CVector& state, FrameGauge gauge) {
  const auto states = kernels::serial::loop_states(frame, state, path.samples, gauge);
  const auto lengths = path.segment_lengths();
  std::vector<double> out;
  for (std::size_t s = 0; s < lengths.size(); ++s) {
    double acc = 0.0;
    const std::size_t base = path.segment_starts[s];
    for (std::size_t k = 0; k < lengths[s]; ++k) {
      const double ov = std::abs(states[base + k].dot(states[base + k + 1]));
      acc += std::acos(std::clamp(ov, 0.0, 1.0));
    }
    out.push_back(acc);
  }
  return out;
}

namespace {

struct Trajectory {
  CVector psi;
  std::vector<double> populations;
  double phase = 0.0;            // unwrapped arg <U(t) f_0 | psi(t)>
  double energy_integral = 0.0;  // integral of <psi|H(t)|psi>
  double leak = 0.0;
  double drift = 0.0;
  long n_steps = 0;
  std::vector<std::string> warnings;
};

Trajectory integrate(const FockOperator& h0, const SchwingerFrame& frame, const DriveSchedule& schedule,
                     const CVector& initial, const std::vector<CVector>& followed,
                     const AdiabaticOptions& options) {
  Trajectory out;
  const FrameGauge gauge = schedule.gauge;
  std::vector<double> weights;
  if (schedule.timing == SegmentTiming::ByFubiniStudy) {
    const CVector& probe = options.timing_state ? options.timing_state->amplitudes : initial;
    weights = fubini_study_lengths(schedule.path, frame, probe, gauge);
    if (std::accumulate(weights.begin(), weights.end(), 0.0) <= 0.0) {
      out.warnings.push_back("all Fubini-Study segment lengths vanish; timing by sample count");
    }
  }
  const ScheduleClock clock(schedule, weights);

  // Step size: resolve the fastest dressed frequency, and keep both the RK4
  // norm loss (|R(ix)|^2 ~ 1 - x^6/72) and its phase error (~ x^5/120 per
  // step) over the whole run within budget.
  const CMatrix& h = h0.matrix;
  const double h_norm = std::max(
      Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff(),
      schedule.lambda_m);
  const double T = schedule.total_time;
  const double units = T * h_norm;
  const double x_drift = std::pow(0.5 * kTolerances.adiabatic_norm_drift * 72.0 / units, 0.2);
  const double x_phase = std::pow(kTolerances.rk4_phase_budget * 120.0 / units, 0.25);
  double dt = std::min({1.0 / (50.0 * h_norm), x_drift / h_norm, x_phase / h_norm});
  if (options.max_step > 0.0) dt = std::min(dt, options.max_step);
  out.n_steps = std::max(1L, static_cast<long>(std::ceil(T / dt)));
  dt = T / static_cast<double>(out.n_steps);

  auto rotation_at = [&](double t) {
    const SpherePoint p = clock.at(t);
    return frame.rotation(p.theta, p.phi, gauge);
  };
  auto apply_h = [&](const SchwingerFrame::Rotation& u, const CVector& v) {
    return u.apply(h * u.apply_adjoint(v));
  };
  auto populations = [&](const SchwingerFrame::Rotation& u, const CVector& psi, std::vector<double>& pops,
                         CVector& ref0) {
    for (std::size_t i = 0; i < followed.size(); ++i) {
      const CVector ref = u.apply(followed[i]);
      pops[i] = std::norm(ref.dot(psi));
      if (i == 0) ref0 = ref;
    }
  };

  SchwingerFrame::Rotation u_now = rotation_at(0.0);
  CVector psi = u_now.apply(initial);
  std::vector<double> pops0(followed.size()), pops(followed.size());
  CVector ref;
  populations(u_now, psi, pops0, ref);

  double phase_prev = std::arg(ref.dot(psi));
  out.phase = phase_prev;
  CVector hpsi = apply_h(u_now, psi);
  double energy_prev = psi.dot(hpsi).real();
  const Complex mi(0.0, -1.0);

  for (long step = 0; step < out.n_steps; ++step) {
    const double t = dt * static_cast<double>(step);
    const double t1 = dt * static_cast<double>(step + 1);
    const SchwingerFrame::Rotation u_mid = rotation_at(t + 0.5 * dt);
    const SchwingerFrame::Rotation u_end = rotation_at(t1);
    const CVector k1 = mi * hpsi;
    const CVector k2 = mi * apply_h(u_mid, psi + 0.5 * dt * k1);
    const CVector k3 = mi * apply_h(u_mid, psi + 0.5 * dt * k2);
    const CVector k4 = mi * apply_h(u_end, psi + dt * k3);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    hpsi = apply_h(u_end, psi);
    const double energy = psi.dot(hpsi).real();
    out.energy_integral += 0.5 * dt * (energy_prev + energy);
    energy_prev = energy;

    populations(u_end, psi, pops, ref);
    double total = 0.0, transfer = 0.0;
    for (std::size_t i = 0; i < pops.size(); ++i) {
      total += pops[i];
      transfer = std::max(transfer, std::abs(pops[i] - pops0[i]));
    }
    out.leak = std::max({out.leak, 1.0 - total, transfer});
    out.drift = std::max(out.drift, std::abs(psi.norm() - 1.0));

    const double phase = std::arg(ref.dot(psi));
    out.phase += std::remainder(phase - phase_prev, kTwoPi);
    phase_prev = phase;
  }
  out.psi = std::move(psi);
  out.populations = std::move(pops);
  return out;
}

}  // namespace

const char* to_string(DynamicPhaseMode m) {
  switch (m) {
    case DynamicPhaseMode::SubtractExpectation: return "subtract-expectation";
    case DynamicPhaseMode::SubtractEigenvalue: return "subtract-eigenvalue";
    case DynamicPhaseMode::Echo: return "echo";
    case DynamicPhaseMode::None: return "none";
  }
  return "none";
}

LoopPath reversed(const LoopPath& path) {
  LoopPath out = path;
  out.kind = LoopKind::Custom;
  std::reverse(out.samples.begin(), out.samples.end());
  const auto lengths = path.segment_lengths();
  out.segment_starts.clear();
  std::size_t start = 0;
  for (auto it = lengths.rbegin(); it != lengths.rend(); ++it) {
    out.segment_starts.push_back(start);
    start += *it;
  }
  out.omega_solid = path.omega_solid > 0.0 ? 4.0 * kPi - path.omega_solid : 0.0;
  out.vertices.clear();
  return out;
}

AdiabaticResult adiabatic_evolution(const FockOperator& h0, const SchwingerFrame& frame,
                                    const DriveSchedule& schedule, const StateVector& initial,
                                    const AdiabaticOptions& options) {
  if (!(h0.basis == frame.basis()) || !(initial.basis == frame.basis())) {
    throw Error(ErrorCode::BasisMismatch, "Hamiltonian, state and frame must share a basis");
  }
  if (std::abs(initial.norm() - 1.0) > 1e-10) {
    throw Error(ErrorCode::InvalidParams, "initial state is not normalized");
  }
  std::vector<std::string> warnings = schedule.validate();

  std::vector<CVector> followed;
  if (options.followed.empty()) {
    followed.push_back(initial.amplitudes);
  } else {
    for (const auto& f : options.followed) {
      if (!(f.basis == frame.basis())) throw Error(ErrorCode::BasisMismatch, "followed state basis");
      followed.push_back(f.amplitudes);
    }
  }
  if (followed.size() != 1) {
    warnings.push_back("several followed states; the geometric phase refers to the first");
  }

  Trajectory fwd = integrate(h0, frame, schedule, initial.amplitudes, followed, options);
  double leak = fwd.leak;
  double drift = fwd.drift;
  double raw = fwd.phase;
  switch (schedule.dynamic_phase_mode) {
    case DynamicPhaseMode::SubtractExpectation:
      raw += fwd.energy_integral;
      break;
    case DynamicPhaseMode::SubtractEigenvalue:
      raw += followed.front().dot(h0.matrix * followed.front()).real() * schedule.total_time;
      break;
    case DynamicPhaseMode::Echo: {
      DriveSchedule back = schedule;
      back.path = reversed(schedule.path);
      const Trajectory rev = integrate(h0, frame, back, initial.amplitudes, followed, options);
      raw = 0.5 * ((fwd.phase + fwd.energy_integral) - (rev.phase + rev.energy_integral));
      leak = std::max(leak, rev.leak);
      drift = std::max(drift, rev.drift);
      break;
    }
    case DynamicPhaseMode::None:
      break;
  }
  warnings.insert(warnings.end(), fwd.warnings.begin(), fwd.warnings.end());

  if (drift > kTolerances.adiabatic_norm_drift) {
    throw Error(ErrorCode::NormDrift, "norm drift " + std::to_string(drift) + " exceeds budget");
  }
  if (schedule.throw_on_leak && leak > schedule.leak_threshold) {
    throw Error(ErrorCode::NonAdiabatic,
                "population leak " + std::to_string(leak) + " exceeds " + std::to_string(schedule.leak_threshold));
  }

  PhaseReport r;
  r.method = PhaseMethod::Adiabatic;
  r.n_steps = static_cast<int>(fwd.n_steps);
  r.total_time = schedule.total_time;
  r.revolutions = schedule.path.revolutions;
  r.sign = sign_convention();
  r.dynamic_phase = -fwd.energy_integral;
  r.diagnostics.max_nonadiabatic_leak = leak;
  r.diagnostics.norm_drift = drift;
  r.set_gamma(r.sign * raw / r.revolutions);
  r.gamma_plain = r.gamma;
  r.warnings = std::move(warnings);

  return {StateVector{initial.basis, std::move(fwd.psi)}, std::move(r), std::move(fwd.populations)};
}

}  // namespace jcanyon
