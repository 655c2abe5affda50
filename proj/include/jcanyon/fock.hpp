#pragma once

// Finite-dimensional linear algebra for a qubit coupled to two or four
// bosonic modes. States are enumerated sector by sector, where a sector
// fixes the total boson number of each mode pair (a,b) and (c,d).

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jcanyon/errors.hpp"
#include "jcanyon/tolerances.hpp"

namespace jcanyon {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class Mode : int { A = 0, B = 1, C = 2, D = 3 };
enum class Qubit : int { None = -1, Up = 0, Down = 1 };
enum class LadderKind { Create, Annihilate };
enum class PauliKind { Z, Plus, Minus };

/// Total boson numbers of the (a,b) and (c,d) pairs.
struct Sector {
  int ab = 0;
  int cd = 0;
  auto operator<=>(const Sector&) const = default;
};

struct BasisState {
  Qubit qubit = Qubit::None;
  std::array<int, 4> occupation{};  // n_a, n_b, n_c, n_d
  auto operator<=>(const BasisState&) const = default;

  Sector sector() const { return {occupation[0] + occupation[1], occupation[2] + occupation[3]}; }
};

/// Ordered basis of a union of closed sectors.
///
/// Enumeration order: sectors ascending, then qubit (up before down), then
/// n_a descending, then n_c descending. For two modes dim = q * sum(N + 1)
/// with q = 2 when the qubit is included.
class BasisSpec {
 public:
  BasisSpec(int mode_count, std::vector<Sector> sectors, bool qubit_included);

  /// Sectors {n + n', n + n' + m}: closed under the Schwinger rotations and
  /// containing both components of the dressed pair |up,n>|n'> , |down,n+m>|n'>.
  static BasisSpec sector_exact(int n, int n_prime, int m);
  /// All two-mode sectors 0..n_max.
  static BasisSpec truncated(int n_max, bool qubit_included = true);
  /// Four modes with pair sectors {(0,0), (m,m)}.
  static BasisSpec two_anyon(int m);

  int mode_count() const;
  bool qubit_included() const;
  const std::vector<Sector>& sectors() const;
  Index dim() const;
  const BasisState& state(Index i) const;
  std::optional<Index> find(const BasisState& s) const;
  Index index_of(const BasisState& s) const;  // throws SectorOverflow when absent
  bool contains(Sector s) const;

  bool operator==(const BasisSpec& other) const;

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
};

struct FockOperator {
  BasisSpec basis;
  CMatrix matrix;
  /// Columns whose exact image has amplitude outside the included sectors.
  /// Products and sums propagate these flags conservatively.
  std::vector<Index> overflow_columns;

  bool has_overflow() const { return !overflow_columns.empty(); }
  FockOperator adjoint() const;
  bool is_hermitian(double tol = kTolerances.hermitian) const;
};

FockOperator operator*(const FockOperator& lhs, const FockOperator& rhs);
FockOperator operator+(const FockOperator& lhs, const FockOperator& rhs);
FockOperator operator-(const FockOperator& lhs, const FockOperator& rhs);
FockOperator operator*(Complex scale, const FockOperator& op);
FockOperator commutator(const FockOperator& lhs, const FockOperator& rhs);

struct StateVector {
  BasisSpec basis;
  CVector amplitudes;

  static StateVector basis_state(const BasisSpec& basis, const BasisState& s);
  double norm() const { return amplitudes.norm(); }
  Complex inner(const StateVector& other) const;  // <this|other>
};

/// op * psi. In strict mode any support of psi on an overflow column throws.
StateVector apply(const FockOperator& op, const StateVector& psi, bool strict = false);
/// op * psi for an operator expected to be unitary; the result's norm is
/// checked against the input norm, never renormalized.
StateVector apply_unitary(const FockOperator& op, const StateVector& psi,
                          double tol = kTolerances.norm);
Complex expectation(const FockOperator& op, const StateVector& psi);

FockOperator identity(const BasisSpec& basis);

/// Single creation or annihilation operator on one mode.
FockOperator build_ladder(const BasisSpec& basis, Mode mode, LadderKind kind, bool strict = false);
/// Product of same-kind powers, e.g. a^m c^m, with matrix elements computed
/// directly so that intermediate sectors need not be in the basis.
FockOperator build_monomial(const BasisSpec& basis, const std::array<int, 4>& powers,
                            LadderKind kind, bool strict = false);
FockOperator build_number(const BasisSpec& basis, Mode mode);
/// c_to^dag c_from, computed directly (conserves the total of a pair).
FockOperator build_hop(const BasisSpec& basis, Mode to, Mode from);
FockOperator build_pauli(const BasisSpec& basis, PauliKind which);
/// Annihilate: sigma_+ (x) a^powers, lowering the modes while raising the
/// qubit. Create: the Hermitian conjugate sigma_- (x) (a^dag)^powers.
FockOperator build_sideband(const BasisSpec& basis, const std::array<int, 4>& powers,
                            LadderKind kind = LadderKind::Annihilate, bool strict = false);

/// exp(scale * A), Pade scaling-and-squaring.
CMatrix matrix_exponential(const CMatrix& a, Complex scale);
FockOperator matrix_exponential(const FockOperator& a, Complex scale);

enum class Subsystem { Qubit, A, B, C, D };

/// [qubit, n_a, n_b, n_c, n_d]; -1 marks a traced-out slot.
using Label = std::array<int, 5>;

struct DensityMatrix {
  std::vector<Subsystem> kept;
  std::vector<Label> labels;
  CMatrix matrix;

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix from_matrix(const BasisSpec& basis, CMatrix rho);
  Index dim() const { return matrix.rows(); }
  /// Hermiticity, unit trace and positivity; throws InvalidDensity.
  void validate(const Tolerances& tol = kTolerances) const;
};

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Subsystem> keep);
double linear_entropy(const DensityMatrix& rho);

}  // namespace jcanyon
