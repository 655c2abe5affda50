#pragma once

namespace jcanyon {

// Every numerical threshold used by the library lives here.
struct Tolerances {
  double norm = 1e-12;             // state normalization after unitary maps
  double hermitian = 1e-12;        // density matrices and Hamiltonians
  double trace = 1e-12;
  double psd = 1e-10;              // smallest admissible density eigenvalue is -psd
  double unitary = 1e-11;          // ||U^dag U - I||_max
  double eigen_residual = 1e-10;   // ||H v - E v|| for analytic eigenvectors
  double exp_norm_limit = 1e3;     // ||scale * A||_1 beyond this is rejected
  double overlap_floor = 1e-6;     // smallest |<psi_k|psi_k+1>| along a loop
  double adiabatic_norm_drift = 1e-9;
  double leak_threshold = 1e-2;    // NonAdiabatic beyond this
  double solid_angle_slack = 1e-12;
  double closure = 1e-9;           // first/last sphere point of a closed loop
  double cycle_mismatch = 1e-6;    // residual Rabi phase (rad) when not snapping
  double budget_pass = 0.05;       // adiabaticity ratios
  double budget_fail = 0.5;
  double rk4_phase_budget = 1e-9;  // accumulated integrator phase error over a run
};

inline constexpr Tolerances kTolerances{};

}  // namespace jcanyon
