#pragma once

// m-quantum two-mode Jaynes-Cummings model: Hamiltonians, dressed
// eigensystem, geometric phase and statistical factor in closed form.

#include <utility>

#include "jcanyon/fock.hpp"

namespace jcanyon {

struct ModelParams {
  int m = 1;             // nonlinearity order
  double lambda = 1.0;   // effective coupling lambda_m
  double delta = 0.0;    // detuning Delta_m = omega - m nu
  double nu = 0.0;       // mode frequency, lab frame only
  double omega = 0.0;    // qubit frequency, lab frame only
  int n = 0;             // initial excitations of mode a
  int n_prime = 0;       // initial excitations of mode b
  bool free_mode = false;  // lambda_m = 0: decoupled oscillators

  /// Parameters with Delta_m derived from the lab-frame frequencies.
  static ModelParams lab_frame(int m, double lambda, double nu, double omega, int n = 0,
                               int n_prime = 0);
  bool has_lab_frame() const { return nu != 0.0 || omega != 0.0; }
  /// Throws InvalidParams, or DegenerateCoupling for lambda = 0 without free_mode.
  void validate() const;
  double coupling() const { return free_mode ? 0.0 : lambda; }
};

enum class Branch { Plus, Minus };

/// Dressed eigenstate c_up |up,n>|n'> + c_down |down,n+m>|n'>. For the plus
/// branch (c_up, c_down) = (C_up, C_down); the minus branch is the orthogonal
/// combination (C_down, -C_up), which coincides with (C_up, -C_down) at
/// resonance.
struct DressedState {
  ModelParams params;
  Branch branch = Branch::Plus;
  double c_up = 1.0;
  double c_down = 0.0;
  double big_lambda = 0.0;

  double energy() const { return branch == Branch::Plus ? big_lambda : -big_lambda; }
  StateVector to_state(const BasisSpec& basis) const;
};

/// (n+m)!/n!, exact for n + m <= 20 and through lgamma beyond.
double factorial_ratio(int n, int m);
/// Lambda = sqrt(Delta^2/4 + lambda^2 (n+m)!/n!).
double big_lambda(const ModelParams& p);

/// nu a^dag a + nu b^dag b + (omega/2) sigma_z + lambda [sigma_+ a^m + h.c.]
FockOperator build_full_hamiltonian(const ModelParams& p, const BasisSpec& basis);
/// (Delta/2) sigma_z + lambda [sigma_+ a^m + h.c.]
FockOperator build_interaction_hamiltonian(const ModelParams& p, const BasisSpec& basis);

std::pair<DressedState, DressedState> analytic_eigensystem(const ModelParams& p);

/// Omega <J_z> for the selected dressed branch. For the plus branch this is
/// (Omega/2)(n - n' + (m/2) lambda^2 (n+m)!/n! / (Lambda^2 + Lambda Delta/2)).
double analytic_berry_phase(const ModelParams& p, double omega_solid, Branch branch = Branch::Plus);

struct StatisticalFactor {
  double alpha = 0.0;
  double ratio = 0.0;  // alpha / ((m/4) Omega / 2pi), equal to 1 at resonance
};

StatisticalFactor statistical_factor(const ModelParams& p, double omega_solid);

/// Linear entropy of the reduced qubit in the dressed state, 2 C_up^2 C_down^2.
double entropy_vs_detuning(const ModelParams& p);

struct TwoAnyonParams {
  int m = 1;
  double lambda = 1.0;
  void validate() const;
};

/// lambda [sigma_+ a^m c^m + h.c.] on the four-mode basis.
FockOperator build_two_anyon_hamiltonian(const TwoAnyonParams& p, const BasisSpec& basis);
/// (|up>|0>_a|0>_c +- |down>|m>_a|m>_c)|0>_b|0>_d / sqrt(2).
StateVector two_anyon_eigenstate(const TwoAnyonParams& p, const BasisSpec& basis,
                                 Branch branch = Branch::Plus);
double two_anyon_analytic_phase(int m, double omega_solid);

void check_solid_angle(double omega_solid);

}  // namespace jcanyon
