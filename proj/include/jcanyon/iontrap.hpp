#pragma once

// Trapped-ion realization: sideband couplings with the full Lamb-Dicke
// series, carrier pulses, and the Ramsey sequence that reads the geometric
// phase out of the excited-state population.

#include <string>
#include <vector>

#include "json.hpp"

#include "jcanyon/berry.hpp"

namespace jcanyon {

struct TrapParams {
  double g = 1.0;        // carrier coupling
  double eta = 0.1;      // Lamb-Dicke parameter
  double nu = 10.0;      // trap frequency
  double omega0 = 0.0;   // electronic splitting (absorbed by the rotating frame)
  int m = 2;             // red sideband order
  double delta_m = 0.0;  // sideband mistuning
  double phi_L = 0.0;    // laser phase

  /// Throws InvalidParams; returns warnings on Lamb-Dicke quality (for
  /// n_max >= 0) and sideband isolation.
  std::vector<std::string> validate(int n_max = -1) const;
  nlohmann::json to_json() const;
};

/// Real diagonal element f_m(n) of the sideband coupling on |n>_a,
/// (g/2) e^{-eta^2/2} sum_l (-1)^l eta^{2l+m} n! / ((n-l)! l! (l+m)!).
/// The constant factor i^m is returned separately by the series operator.
double coupling_element(const TrapParams& t, int n);

struct CouplingSeries {
  FockOperator op;      // diag f_m(n_a), Hermitian
  Complex phase{1.0};   // i^m, absorbed into the sigma_+ phase reference
  int n_max = 0;
  std::vector<std::string> warnings;
};

CouplingSeries effective_coupling_series(const TrapParams& t, const BasisSpec& basis);

/// (g / (2 m!)) (i eta)^m e^{-eta^2/2}
Complex lamb_dicke_lambda(const TrapParams& t);

/// (Delta_m/2) sigma_z + [e^{i phi_L} f_m(a^dag a) sigma_+ a^m + h.c.]
FockOperator build_ion_hamiltonian(const TrapParams& t, const BasisSpec& basis);
/// m = 0 coupling: f_0(a^dag a) (e^{i phi} sigma_+ + e^{-i phi} sigma_-)
FockOperator build_carrier_hamiltonian(const TrapParams& t, const BasisSpec& basis, double phi);

enum class PulseMode { Finite, Ideal };

/// Carrier pulse of the given phase and duration. Finite uses the full
/// carrier Hamiltonian including its Debye-Waller factor; Ideal rotates the
/// qubit alone with coupling g/2.
StateVector apply_carrier_pulse(const TrapParams& t, const StateVector& psi, double phi,
                                double duration, PulseMode mode);

enum class Verdict { Pass, Warn, Fail };
const char* to_string(Verdict v);

struct BudgetReport {
  double theta_rate = 0.0;      // max |d theta/dt| / lambda_m
  double phi_rate = 0.0;        // max |d phi/dt| / lambda_m
  double detuning_ratio = 0.0;  // |Delta_m| / nu
  Verdict theta_verdict = Verdict::Pass;
  Verdict phi_verdict = Verdict::Pass;
  Verdict detuning_verdict = Verdict::Pass;
  Verdict overall = Verdict::Pass;

  nlohmann::json to_json() const;
};

BudgetReport adiabaticity_budget(const TrapParams& t, const DriveSchedule& schedule,
                                 const std::vector<double>& segment_weights = {});

struct RamseyResult {
  double p_down = 0.0;
  double gamma_inferred = 0.0;  // arccos(1 - 2 p_down), in [0, pi]
  bool sign_unobservable = true;
  double gamma_analytic = 0.0;
  double p_down_analytic = 0.0;
  double leak = 0.0;
  double total_time = 0.0;
  double requested_time = 0.0;
  double cycle_residual = 0.0;  // |Lambda tau| distance to a multiple of 2 pi
  double splitting_shift = 0.0; // velocity-induced excess of the half splitting, integrated (rad)
  double norm_drift = 0.0;
  BudgetReport budget;
};

struct RamseyRun {
  TrapParams trap;
  LoopPath path;
  DriveSchedule schedule;
  int j_cycles = 0;
  bool snap_to_cycle = true;
  /// Snap on the dressed splitting of the moving-frame Hamiltonian, which
  /// includes the velocity-squared shift, instead of on Lambda alone.
  bool dressed_snap = true;
  PulseMode pulses = PulseMode::Finite;
  RamseyResult result;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  static std::vector<std::string> csv_header();
  std::vector<double> csv_row() const;
};

/// Resonant coupling lambda_m = |f_m(0)| and dressed frequency
/// Lambda = sqrt(Delta^2/4 + lambda_m^2 m!).
double trap_lambda(const TrapParams& t);
double trap_rabi_frequency(const TrapParams& t);

/// Default run: pole-anchored loop of the requested solid angle, plateau
/// profile with Fubini-Study segment timing, total time in units of
/// 1/lambda_m.
RamseyRun make_ramsey_run(const TrapParams& t, double omega_solid, double time_units,
                          int n_steps = 1024);

/// Integral over the schedule of (eps_+ - eps_-)/2 - Lambda, where eps_+-
/// are the eigenvalues of H0 - i U^dag dU/dt continued from the dressed pair.
double splitting_shift(const TrapParams& t, const DriveSchedule& schedule, int samples = 4096);

/// Preparation pulse, adiabatic loop, analysis pulse, readout. Throws
/// NonAdiabatic and CycleMismatch.
RamseyRun ramsey_protocol(RamseyRun run);

}  // namespace jcanyon
