#include "jcanyon/fock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace jcanyon {

namespace {

int mode_index(Mode m) { return static_cast<int>(m); }

void check_mode(const BasisSpec& basis, Mode mode) {
  if (mode_index(mode) < 0 || mode_index(mode) >= basis.mode_count()) {
    throw Error(ErrorCode::UnknownMode,
                "mode " + std::to_string(mode_index(mode)) + " not present in a " +
                    std::to_string(basis.mode_count()) + "-mode basis");
  }
}

void check_same_basis(const BasisSpec& a, const BasisSpec& b) {
  if (!(a == b)) throw Error(ErrorCode::BasisMismatch, "operands live on different bases");
}

// sqrt(n (n-1) ... (n-p+1)) for lowering, sqrt((n+1) ... (n+p)) for raising.
double ladder_coefficient(int n, int p, LadderKind kind) {
  double c = 1.0;
  if (kind == LadderKind::Annihilate) {
    for (int k = 0; k < p; ++k) c *= std::sqrt(static_cast<double>(n - k));
  } else {
    for (int k = 1; k <= p; ++k) c *= std::sqrt(static_cast<double>(n + k));
  }
  return c;
}

std::vector<Index> merge_flags(std::vector<Index> a, const std::vector<Index>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

FockOperator zero_operator(const BasisSpec& basis) {
  return {basis, CMatrix::Zero(basis.dim(), basis.dim()), {}};
}

// Fills column j of `op` with the image of state j under a mode monomial,
// optionally combined with a qubit flip. Returns false when the image leaves
// the basis.
bool place_monomial(FockOperator& op, Index j, const std::array<int, 4>& powers, LadderKind kind,
                    Qubit from_qubit, Qubit to_qubit, bool strict) {
  const BasisState& s = op.basis.state(j);
  if (s.qubit != from_qubit) return true;
  BasisState t = s;
  t.qubit = to_qubit;
  double coeff = 1.0;
  for (int k = 0; k < 4; ++k) {
    const int p = powers[static_cast<std::size_t>(k)];
    if (p == 0) continue;
    const int n = s.occupation[static_cast<std::size_t>(k)];
    if (kind == LadderKind::Annihilate) {
      if (n < p) return true;  // annihilated, image is zero
      t.occupation[static_cast<std::size_t>(k)] = n - p;
    } else {
      t.occupation[static_cast<std::size_t>(k)] = n + p;
    }
    coeff *= ladder_coefficient(n, p, kind);
  }
  const auto target = op.basis.find(t);
  if (!target) {
    if (strict) {
      throw Error(ErrorCode::SectorOverflow,
                  "image of basis state " + std::to_string(j) + " lies outside the included sectors");
    }
    op.overflow_columns.push_back(j);
    return false;
  }
  op.matrix(*target, j) = coeff;
  return true;
}

void check_powers(const BasisSpec& basis, const std::array<int, 4>& powers) {
  for (int k = 0; k < 4; ++k) {
    const int p = powers[static_cast<std::size_t>(k)];
    if (p < 0) throw Error(ErrorCode::InvalidParams, "negative ladder power");
    if (p > 0) check_mode(basis, static_cast<Mode>(k));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// BasisSpec

struct BasisSpec::Data {
  int mode_count = 2;
  bool qubit = true;
  std::vector<Sector> sectors;
  std::vector<BasisState> states;
  std::map<BasisState, Index> index;
};

BasisSpec::BasisSpec(int mode_count, std::vector<Sector> sectors, bool qubit_included) {
  if (mode_count != 2 && mode_count != 4) {
    throw Error(ErrorCode::InvalidParams, "mode_count must be 2 or 4");
  }
  if (sectors.empty()) throw Error(ErrorCode::InvalidParams, "basis needs at least one sector");
  std::sort(sectors.begin(), sectors.end());
  sectors.erase(std::unique(sectors.begin(), sectors.end()), sectors.end());
  for (const Sector& s : sectors) {
    if (s.ab < 0 || s.cd < 0) throw Error(ErrorCode::InvalidParams, "negative sector total");
    if (mode_count == 2 && s.cd != 0) {
      throw Error(ErrorCode::InvalidParams, "two-mode basis cannot carry a (c,d) total");
    }
  }

  auto d = std::make_shared<Data>();
  d->mode_count = mode_count;
  d->qubit = qubit_included;
  d->sectors = sectors;
  const std::vector<Qubit> levels =
      qubit_included ? std::vector<Qubit>{Qubit::Up, Qubit::Down} : std::vector<Qubit>{Qubit::None};
  for (const Sector& s : sectors) {
    for (Qubit q : levels) {
      for (int na = s.ab; na >= 0; --na) {
        for (int nc = s.cd; nc >= 0; --nc) {
          BasisState st;
          st.qubit = q;
          st.occupation = {na, s.ab - na, nc, s.cd - nc};
          d->index.emplace(st, static_cast<Index>(d->states.size()));
          d->states.push_back(st);
        }
      }
    }
  }
  d_ = std::move(d);
}

BasisSpec BasisSpec::sector_exact(int n, int n_prime, int m) {
  if (n < 0 || n_prime < 0 || m < 0) {
    throw Error(ErrorCode::InvalidParams, "sector_exact needs n, n', m >= 0");
  }
  return BasisSpec(2, {{n + n_prime, 0}, {n + n_prime + m, 0}}, true);
}

BasisSpec BasisSpec::truncated(int n_max, bool qubit_included) {
  if (n_max < 0) throw Error(ErrorCode::InvalidParams, "n_max must be >= 0");
  std::vector<Sector> sectors;
  for (int n = 0; n <= n_max; ++n) sectors.push_back({n, 0});
  return BasisSpec(2, std::move(sectors), qubit_included);
}

BasisSpec BasisSpec::two_anyon(int m) {
  if (m < 1) throw Error(ErrorCode::InvalidParams, "two_anyon needs m >= 1");
  return BasisSpec(4, {{0, 0}, {m, m}}, true);
}

int BasisSpec::mode_count() const { return d_->mode_count; }
bool BasisSpec::qubit_included() const { return d_->qubit; }
const std::vector<Sector>& BasisSpec::sectors() const { return d_->sectors; }
Index BasisSpec::dim() const { return static_cast<Index>(d_->states.size()); }
const BasisState& BasisSpec::state(Index i) const { return d_->states.at(static_cast<std::size_t>(i)); }

std::optional<Index> BasisSpec::find(const BasisState& s) const {
  const auto it = d_->index.find(s);
  if (it == d_->index.end()) return std::nullopt;
  return it->second;
}

Index BasisSpec::index_of(const BasisState& s) const {
  if (auto i = find(s)) return *i;
  throw Error(ErrorCode::SectorOverflow, "basis state not in the included sectors");
}

bool BasisSpec::contains(Sector s) const {
  return std::binary_search(d_->sectors.begin(), d_->sectors.end(), s);
}

bool BasisSpec::operator==(const BasisSpec& other) const {
  if (d_ == other.d_) return true;
  return d_->mode_count == other.d_->mode_count && d_->qubit == other.d_->qubit &&
         d_->sectors == other.d_->sectors;
}

// ---------------------------------------------------------------------------
// Operators and states

FockOperator FockOperator::adjoint() const {
  FockOperator out{basis, matrix.adjoint(), {}};
  // The adjoint of a compressed operator cannot recover which columns leak;
  // if the source leaked anywhere, flag everything.
  if (has_overflow()) {
    out.overflow_columns.resize(static_cast<std::size_t>(basis.dim()));
    for (Index j = 0; j < basis.dim(); ++j) out.overflow_columns[static_cast<std::size_t>(j)] = j;
  }
  return out;
}

bool FockOperator::is_hermitian(double tol) const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

FockOperator operator*(const FockOperator& lhs, const FockOperator& rhs) {
  check_same_basis(lhs.basis, rhs.basis);
  FockOperator out{lhs.basis, lhs.matrix * rhs.matrix, rhs.overflow_columns};
  for (Index col : lhs.overflow_columns) {
    for (Index j = 0; j < rhs.matrix.cols(); ++j) {
      if (rhs.matrix(col, j) != Complex(0.0)) out.overflow_columns.push_back(j);
    }
  }
  out.overflow_columns = merge_flags(std::move(out.overflow_columns), {});
  return out;
}

FockOperator operator+(const FockOperator& lhs, const FockOperator& rhs) {
  check_same_basis(lhs.basis, rhs.basis);
  return {lhs.basis, lhs.matrix + rhs.matrix, merge_flags(lhs.overflow_columns, rhs.overflow_columns)};
}

FockOperator operator-(const FockOperator& lhs, const FockOperator& rhs) {
  check_same_basis(lhs.basis, rhs.basis);
  return {lhs.basis, lhs.matrix - rhs.matrix, merge_flags(lhs.overflow_columns, rhs.overflow_columns)};
}

FockOperator operator*(Complex scale, const FockOperator& op) {
  return {op.basis, scale * op.matrix, op.overflow_columns};
}

FockOperator commutator(const FockOperator& lhs, const FockOperator& rhs) {
  return lhs * rhs - rhs * lhs;
}

StateVector StateVector::basis_state(const BasisSpec& basis, const BasisState& s) {
  StateVector psi{basis, CVector::Zero(basis.dim())};
  psi.amplitudes(basis.index_of(s)) = 1.0;
  return psi;
}

Complex StateVector::inner(const StateVector& other) const {
  check_same_basis(basis, other.basis);
  return amplitudes.dot(other.amplitudes);
}

StateVector apply(const FockOperator& op, const StateVector& psi, bool strict) {
  check_same_basis(op.basis, psi.basis);
  if (strict) {
    for (Index col : op.overflow_columns) {
      if (std::abs(psi.amplitudes(col)) > 0.0) {
        throw Error(ErrorCode::SectorOverflow,
                    "state has support on basis state " + std::to_string(col) +
                        " whose image leaves the basis");
      }
    }
  }
  return {psi.basis, op.matrix * psi.amplitudes};
}

StateVector apply_unitary(const FockOperator& op, const StateVector& psi, double tol) {
  StateVector out = apply(op, psi);
  const double before = psi.norm();
  const double after = out.norm();
  if (std::abs(after - before) > tol) {
    throw Error(ErrorCode::NormDrift, "norm changed from " + std::to_string(before) + " to " +
                                          std::to_string(after));
  }
  return out;
}

Complex expectation(const FockOperator& op, const StateVector& psi) {
  check_same_basis(op.basis, psi.basis);
  return psi.amplitudes.dot(op.matrix * psi.amplitudes);
}

FockOperator identity(const BasisSpec& basis) {
  return {basis, CMatrix::Identity(basis.dim(), basis.dim()), {}};
}

FockOperator build_ladder(const BasisSpec& basis, Mode mode, LadderKind kind, bool strict) {
  check_mode(basis, mode);
  std::array<int, 4> powers{};
  powers[static_cast<std::size_t>(mode_index(mode))] = 1;
  return build_monomial(basis, powers, kind, strict);
}

FockOperator build_monomial(const BasisSpec& basis, const std::array<int, 4>& powers,
                            LadderKind kind, bool strict) {
  check_powers(basis, powers);
  FockOperator op = zero_operator(basis);
  for (Index j = 0; j < basis.dim(); ++j) {
    const Qubit q = basis.state(j).qubit;
    place_monomial(op, j, powers, kind, q, q, strict);
  }
  return op;
}

FockOperator build_number(const BasisSpec& basis, Mode mode) {
  check_mode(basis, mode);
  FockOperator op = zero_operator(basis);
  for (Index j = 0; j < basis.dim(); ++j) {
    op.matrix(j, j) = basis.state(j).occupation[static_cast<std::size_t>(mode_index(mode))];
  }
  return op;
}

FockOperator build_hop(const BasisSpec& basis, Mode to, Mode from) {
  check_mode(basis, to);
  check_mode(basis, from);
  if (to == from) return build_number(basis, to);
  FockOperator op = zero_operator(basis);
  const auto ito = static_cast<std::size_t>(mode_index(to));
  const auto ifrom = static_cast<std::size_t>(mode_index(from));
  for (Index j = 0; j < basis.dim(); ++j) {
    const BasisState& s = basis.state(j);
    const int nf = s.occupation[ifrom];
    if (nf == 0) continue;
    BasisState t = s;
    t.occupation[ifrom] = nf - 1;
    t.occupation[ito] += 1;
    const auto target = basis.find(t);
    if (!target) {
      op.overflow_columns.push_back(j);
      continue;
    }
    op.matrix(*target, j) = std::sqrt(static_cast<double>(nf)) *
                            std::sqrt(static_cast<double>(s.occupation[ito] + 1));
  }
  return op;
}

FockOperator build_pauli(const BasisSpec& basis, PauliKind which) {
  if (!basis.qubit_included()) throw Error(ErrorCode::NoQubit, "basis carries no qubit");
  FockOperator op = zero_operator(basis);
  const std::array<int, 4> none{};
  for (Index j = 0; j < basis.dim(); ++j) {
    const Qubit q = basis.state(j).qubit;
    switch (which) {
      case PauliKind::Z:
        op.matrix(j, j) = (q == Qubit::Up) ? 1.0 : -1.0;
        break;
      case PauliKind::Plus:
        place_monomial(op, j, none, LadderKind::Annihilate, Qubit::Down, Qubit::Up, false);
        break;
      case PauliKind::Minus:
        place_monomial(op, j, none, LadderKind::Annihilate, Qubit::Up, Qubit::Down, false);
        break;
    }
  }
  return op;
}

FockOperator build_sideband(const BasisSpec& basis, const std::array<int, 4>& powers,
                            LadderKind kind, bool strict) {
  if (!basis.qubit_included()) throw Error(ErrorCode::NoQubit, "basis carries no qubit");
  check_powers(basis, powers);
  FockOperator op = zero_operator(basis);
  for (Index j = 0; j < basis.dim(); ++j) {
    if (kind == LadderKind::Annihilate) {
      place_monomial(op, j, powers, kind, Qubit::Down, Qubit::Up, strict);
    } else {
      place_monomial(op, j, powers, kind, Qubit::Up, Qubit::Down, strict);
    }
  }
  return op;
}

CMatrix matrix_exponential(const CMatrix& a, Complex scale) {
  const CMatrix b = scale * a;
  if (!b.allFinite()) throw Error(ErrorCode::InvalidParams, "matrix exponential of non-finite input");
  const double norm1 = b.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 > kTolerances.exp_norm_limit) {
    throw Error(ErrorCode::NormTooLarge,
                "||scale*A||_1 = " + std::to_string(norm1) + " exceeds supported range");
  }
  return b.exp();
}

FockOperator matrix_exponential(const FockOperator& a, Complex scale) {
  return {a.basis, matrix_exponential(a.matrix, scale), a.overflow_columns};
}

// ---------------------------------------------------------------------------
// Density matrices

namespace {

int slot_of(Subsystem s) { return static_cast<int>(s); }

Label label_of(const BasisState& s, const std::vector<Subsystem>& kept) {
  Label l{-1, -1, -1, -1, -1};
  for (Subsystem sub : kept) {
    const int slot = slot_of(sub);
    l[static_cast<std::size_t>(slot)] =
        slot == 0 ? static_cast<int>(s.qubit) : s.occupation[static_cast<std::size_t>(slot - 1)];
  }
  return l;
}

std::vector<Subsystem> full_subsystems(const BasisSpec& basis) {
  std::vector<Subsystem> kept;
  if (basis.qubit_included()) kept.push_back(Subsystem::Qubit);
  kept.push_back(Subsystem::A);
  kept.push_back(Subsystem::B);
  if (basis.mode_count() == 4) {
    kept.push_back(Subsystem::C);
    kept.push_back(Subsystem::D);
  }
  return kept;
}

}  // namespace

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return from_matrix(psi.basis, psi.amplitudes * psi.amplitudes.adjoint());
}

DensityMatrix DensityMatrix::from_matrix(const BasisSpec& basis, CMatrix rho) {
  if (rho.rows() != basis.dim() || rho.cols() != basis.dim()) {
    throw Error(ErrorCode::BasisMismatch, "density matrix size does not match basis");
  }
  DensityMatrix out;
  out.kept = full_subsystems(basis);
  out.labels.reserve(static_cast<std::size_t>(basis.dim()));
  for (Index i = 0; i < basis.dim(); ++i) out.labels.push_back(label_of(basis.state(i), out.kept));
  out.matrix = std::move(rho);
  return out;
}

void DensityMatrix::validate(const Tolerances& tol) const {
  const double herm = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol.hermitian) {
    throw Error(ErrorCode::InvalidDensity, "not Hermitian (deviation " + std::to_string(herm) + ")");
  }
  const double tr = matrix.trace().real();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw Error(ErrorCode::InvalidDensity, "trace " + std::to_string(tr) + " != 1");
  }
  const CMatrix sym = 0.5 * (matrix + matrix.adjoint());
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol.psd) {
    throw Error(ErrorCode::InvalidDensity, "negative eigenvalue " +
                                               std::to_string(es.eigenvalues().minCoeff()));
  }
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Subsystem> keep) {
  std::set<Subsystem> keep_set;
  for (Subsystem s : keep) {
    if (std::find(rho.kept.begin(), rho.kept.end(), s) == rho.kept.end()) {
      throw Error(ErrorCode::BadSubsystem, "subsystem not present in the input state");
    }
    if (!keep_set.insert(s).second) throw Error(ErrorCode::BadSubsystem, "duplicate subsystem");
  }
  std::vector<Subsystem> kept(keep_set.begin(), keep_set.end());
  std::vector<Subsystem> traced;
  for (Subsystem s : rho.kept) {
    if (!keep_set.count(s)) traced.push_back(s);
  }

  auto project = [](const Label& l, const std::vector<Subsystem>& subs) {
    Label out{-1, -1, -1, -1, -1};
    for (Subsystem s : subs) {
      const auto slot = static_cast<std::size_t>(slot_of(s));
      out[slot] = l[slot];
    }
    return out;
  };

  std::map<Label, Index> reduced_index;
  for (const Label& l : rho.labels) reduced_index.emplace(project(l, kept), 0);
  DensityMatrix out;
  out.kept = kept;
  for (auto& [label, idx] : reduced_index) {
    idx = static_cast<Index>(out.labels.size());
    out.labels.push_back(label);
  }
  const Index rd = static_cast<Index>(out.labels.size());
  out.matrix = CMatrix::Zero(rd, rd);

  const Index d = rho.dim();
  std::vector<Label> env(static_cast<std::size_t>(d));
  std::vector<Index> red(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) {
    env[static_cast<std::size_t>(i)] = project(rho.labels[static_cast<std::size_t>(i)], traced);
    red[static_cast<std::size_t>(i)] =
        reduced_index.at(project(rho.labels[static_cast<std::size_t>(i)], kept));
  }
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      if (env[static_cast<std::size_t>(i)] == env[static_cast<std::size_t>(j)]) {
        out.matrix(red[static_cast<std::size_t>(i)], red[static_cast<std::size_t>(j)]) +=
            rho.matrix(i, j);
      }
    }
  }
  return out;
}

double linear_entropy(const DensityMatrix& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return 1.0 - rho.matrix.cwiseAbs2().sum();
}

}  // namespace jcanyon
