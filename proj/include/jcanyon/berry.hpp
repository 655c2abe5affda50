#pragma once

// Numerical geometric phases: the discrete Bargmann holonomy along a sampled
// loop, and direct integration of the driven Schrodinger equation with the
// dynamic phase removed.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "jcanyon/model.hpp"
#include "jcanyon/parampath.hpp"

namespace jcanyon {

enum class PhaseMethod { Analytic, Holonomy, Adiabatic };
const char* to_string(PhaseMethod m);

struct PhaseDiagnostics {
  double max_nonadiabatic_leak = 0.0;
  double discretization_estimate = 0.0;
  double min_overlap = 1.0;
  double norm_drift = 0.0;
};

struct PhaseReport {
  PhaseMethod method = PhaseMethod::Analytic;
  double gamma = 0.0;        // unwrapped, per revolution
  double principal = 0.0;    // gamma reduced to (-pi, pi]
  long winding = 0;          // (gamma - principal) / 2 pi
  bool winding_resolved = true;
  double gamma_plain = 0.0;  // holonomy before Richardson extrapolation
  bool extrapolated = false;
  double dynamic_phase = 0.0;
  int n_steps = 0;
  double total_time = 0.0;
  int revolutions = 1;
  int sign = 1;  // global convention applied to the raw phase
  PhaseDiagnostics diagnostics;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> warnings;

  void set_gamma(double g);
  nlohmann::json to_json() const;
};

PhaseReport analytic_phase_report(const ModelParams& p, double omega_solid,
                                  Branch branch = Branch::Plus);

struct BargmannResult {
  double phase = 0.0;  // -sum_k arg <psi_k|psi_k+1>
  double min_overlap = 1.0;
};

/// Throws VanishingOverlap when a consecutive overlap falls below the floor.
BargmannResult bargmann_phase(const std::vector<Complex>& overlaps);

struct HolonomyOptions {
  FrameGauge gauge = FrameGauge::Anchored;
  bool extrapolate = true;
  bool sign_normalize = true;
  int jobs = 0;
};

/// Bargmann holonomy of psi_k = U(theta_k, phi_k) state along the path.
PhaseReport holonomy_phase(const StateVector& state, const SchwingerFrame& frame,
                           const LoopPath& path, const HolonomyOptions& options = {});
PhaseReport holonomy_phase_serial(const StateVector& state, const SchwingerFrame& frame,
                                  const LoopPath& path, const HolonomyOptions& options = {});
/// Holonomy of an explicit chain of sample states (one per path sample).
PhaseReport holonomy_from_states(const std::vector<CVector>& states, const LoopPath& path,
                                 const HolonomyOptions& options = {});

/// Runs the m = 2, Delta = 0, theta = 0.5 loop and returns the factor that
/// maps raw holonomy onto the closed-form phase. Throws CalibrationAmbiguous.
int calibrate_sign_convention();
/// Cached result of the first calibration.
int sign_convention();

enum class TimeProfile { Uniform, Smoothstep, Plateau };
enum class SegmentTiming { BySamples, ByFubiniStudy };
enum class DynamicPhaseMode {
  SubtractExpectation,  // remove the integral of <psi|H(t)|psi>
  SubtractEigenvalue,   // remove the integral of the followed eigenvalue
  Echo,                 // half the difference of forward and reversed runs
  None,
};

const char* to_string(TimeProfile p);
const char* to_string(SegmentTiming t);
const char* to_string(DynamicPhaseMode m);

/// Fraction of a segment traversed at local time u in [0, 1], and its rate.
double profile_position(TimeProfile profile, double u, double plateau_fraction);
double profile_rate(TimeProfile profile, double u, double plateau_fraction);

struct DriveSchedule {
  LoopPath path;
  double total_time = 200.0;
  double lambda_m = 1.0;  // coupling that sets the time unit
  TimeProfile profile = TimeProfile::Smoothstep;
  double plateau_fraction = 0.05;
  SegmentTiming timing = SegmentTiming::BySamples;
  DynamicPhaseMode dynamic_phase_mode = DynamicPhaseMode::Echo;
  FrameGauge gauge = FrameGauge::Anchored;
  double leak_threshold = kTolerances.leak_threshold;
  bool throw_on_leak = true;

  /// Throws InvalidParams; returns advisory warnings.
  std::vector<std::string> validate() const;
  nlohmann::json to_json() const;
};

/// Maps time to a point on the path. Each segment receives a share of the
/// total time proportional to its weight; within a segment the profile sets
/// the progress and positions are interpolated linearly between samples.
class ScheduleClock {
 public:
  explicit ScheduleClock(const DriveSchedule& schedule, std::vector<double> segment_weights = {});

  SpherePoint at(double t) const;
  /// (d theta / dt, d phi / dt)
  std::pair<double, double> velocity(double t) const;
  const std::vector<double>& segment_durations() const { return durations_; }

 private:
  struct Locus {
    std::size_t segment;
    double u;
  };
  Locus locate(double t) const;

  const DriveSchedule* schedule_;
  std::vector<std::size_t> lengths_;
  std::vector<double> durations_;
  std::vector<double> starts_;
};

/// Same loop traversed backwards.
LoopPath reversed(const LoopPath& path);

/// Fubini-Study length of each path segment for the rotated state.
std::vector<double> fubini_study_lengths(const LoopPath& path, const SchwingerFrame& frame,
                                         const CVector& state, FrameGauge gauge);

struct AdiabaticOptions {
  /// Base-frame states whose rotated populations are tracked; defaults to
  /// the initial state.
  std::vector<StateVector> followed;
  /// State used for Fubini-Study segment timing; defaults to the initial state.
  std::optional<StateVector> timing_state;
  double max_step = 0.0;  // 0 selects the step automatically
};

struct AdiabaticResult {
  StateVector final_state;
  PhaseReport report;
  std::vector<double> final_populations;
};

/// Integrates i d psi/dt = U(t) H0 U(t)^dag psi with fixed-step RK4, starting
/// from U(start) initial, where initial is given in the base frame.
AdiabaticResult adiabatic_evolution(const FockOperator& h0, const SchwingerFrame& frame,
                                    const DriveSchedule& schedule, const StateVector& initial,
                                    const AdiabaticOptions& options = {});

}  // namespace jcanyon
