#include "jcanyon/parampath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "jcanyon/model.hpp"

namespace jcanyon {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

SpherePoint from_cartesian(const Eigen::Vector3d& x, double phi_hint) {
  const double z = std::clamp(x.z(), -1.0, 1.0);
  SpherePoint p{std::acos(z), phi_hint};
  if (std::hypot(x.x(), x.y()) > 1e-14) {
    const double phi = std::atan2(x.y(), x.x());
    p.phi = phi_hint + std::remainder(phi - phi_hint, kTwoPi);
  }
  return p;
}

double normalize_area(double area) {
  double a = std::fmod(area, 4.0 * kPi);
  if (a < 0.0) a += 4.0 * kPi;
  if (a >= 4.0 * kPi) a -= 4.0 * kPi;
  return a;
}

std::vector<SpherePoint> parse_points(const nlohmann::json& arr) {
  std::vector<SpherePoint> pts;
  for (const auto& v : arr) {
    if (!v.is_array() || v.size() != 2) throw Error(ErrorCode::BadPath, "points must be [theta, phi] pairs");
    pts.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  return pts;
}

nlohmann::json dump_points(const std::vector<SpherePoint>& pts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pts) arr.push_back({p.theta, p.phi});
  return arr;
}

int round_up_even(int n) { return n + (n % 2); }

}  // namespace

Eigen::Vector3d SpherePoint::cartesian() const {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

const char* to_string(LoopKind kind) {
  switch (kind) {
    case LoopKind::ConstantLatitude: return "constant-latitude";
    case LoopKind::SphericalPolygon: return "polygon";
    case LoopKind::PoleAnchored: return "pole-anchored";
    case LoopKind::Custom: return "custom";
  }
  return "custom";
}

std::vector<std::size_t> LoopPath::segment_lengths() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < segment_starts.size(); ++i) {
    const std::size_t end = i + 1 < segment_starts.size() ? segment_starts[i + 1] : n_intervals();
    out.push_back(end - segment_starts[i]);
  }
  return out;
}

void LoopPath::validate() const {
  if (samples.size() < 2) throw Error(ErrorCode::BadPath, "a loop needs at least two samples");
  if (segment_starts.empty() || segment_starts.front() != 0 ||
      !std::is_sorted(segment_starts.begin(), segment_starts.end()) ||
      segment_starts.back() >= samples.size()) {
    throw Error(ErrorCode::BadPath, "segment starts must be increasing sample indices from 0");
  }
  if (closed) {
    const double gap = (samples.front().cartesian() - samples.back().cartesian()).norm();
    if (gap > kTolerances.closure) {
      throw Error(ErrorCode::BadPath, "first and last samples differ by " + std::to_string(gap));
    }
  }
  const double slack = kTolerances.solid_angle_slack;
  if (!(omega_solid >= -slack && omega_solid <= 4.0 * kPi + slack)) {
    throw Error(ErrorCode::BadPath, "solid angle outside [0, 4pi]");
  }
  if (revolutions < 1) throw Error(ErrorCode::BadPath, "revolutions must be >= 1");
}

nlohmann::json LoopPath::to_json() const {
  nlohmann::json doc{{"kind", to_string(kind)}};
  switch (kind) {
    case LoopKind::ConstantLatitude:
      doc["theta"] = theta;
      doc["n_steps"] = n_steps;
      doc["revolutions"] = revolutions;
      break;
    case LoopKind::PoleAnchored:
      doc["theta"] = theta;
      doc["n_steps"] = n_steps;
      break;
    case LoopKind::SphericalPolygon:
      doc["vertices"] = dump_points(vertices);
      doc["samples_per_edge"] = n_steps;
      break;
    case LoopKind::Custom:
      doc["samples"] = dump_points(samples);
      doc["omega_solid"] = omega_solid;
      break;
  }
  return doc;
}

LoopPath LoopPath::from_json(const nlohmann::json& doc) {
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "constant-latitude") {
      return constant_latitude_loop(doc.at("theta").get<double>(), doc.value("n_steps", 1024),
                                    doc.value("revolutions", 1));
    }
    if (kind == "pole-anchored") {
      return pole_anchored_loop(doc.at("theta").get<double>(), doc.value("n_steps", 1024));
    }
    if (kind == "polygon") {
      return spherical_polygon_loop(parse_points(doc.at("vertices")), doc.value("samples_per_edge", 256));
    }
    if (kind == "custom") {
      return custom_loop(parse_points(doc.at("samples")), doc.at("omega_solid").get<double>());
    }
    throw Error(ErrorCode::BadPath, "unknown loop kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadPath, std::string("malformed loop document: ") + e.what());
  }
}

double latitude_solid_angle(double theta) { return kTwoPi * (1.0 - std::cos(theta)); }

double theta_for_solid_angle(double omega_solid) {
  check_solid_angle(omega_solid);
  const double c = std::clamp(1.0 - omega_solid / kTwoPi, -1.0, 1.0);
  return std::acos(c);
}

LoopPath constant_latitude_loop(double theta, int n_steps, int revolutions) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw Error(ErrorCode::BadTheta, "theta = " + std::to_string(theta) + " outside [0, pi]");
  }
  if (n_steps < 8) throw Error(ErrorCode::BadPath, "n_steps must be >= 8");
  if (revolutions < 1) throw Error(ErrorCode::BadPath, "revolutions must be >= 1");
  LoopPath path;
  path.kind = LoopKind::ConstantLatitude;
  path.theta = theta;
  path.n_steps = n_steps;
  path.revolutions = revolutions;
  const int total = n_steps * revolutions;
  path.samples.reserve(total + 1);
  for (int k = 0; k <= total; ++k) {
    path.samples.push_back({theta, kTwoPi * static_cast<double>(k) / n_steps});
  }
  path.omega_solid = latitude_solid_angle(theta);
  return path;
}

LoopPath pole_anchored_loop(double theta, int n_steps) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw Error(ErrorCode::BadTheta, "theta = " + std::to_string(theta) + " outside [0, pi]");
  }
  if (n_steps < 8) throw Error(ErrorCode::BadPath, "n_steps must be >= 8");
  const int leg = std::max(8, round_up_even(static_cast<int>(std::ceil(n_steps * theta / (2.0 * kPi)))));
  LoopPath path;
  path.kind = LoopKind::PoleAnchored;
  path.theta = theta;
  path.n_steps = n_steps;
  path.samples.reserve(2 * leg + n_steps + 1);
  for (int k = 0; k <= leg; ++k) path.samples.push_back({theta * k / leg, 0.0});
  for (int k = 1; k <= n_steps; ++k) path.samples.push_back({theta, kTwoPi * k / n_steps});
  for (int k = 1; k <= leg; ++k) path.samples.push_back({theta * (leg - k) / leg, kTwoPi});
  path.segment_starts = {0, static_cast<std::size_t>(leg), static_cast<std::size_t>(leg + n_steps)};
  path.omega_solid = latitude_solid_angle(theta);
  return path;
}

LoopPath spherical_polygon_loop(const std::vector<SpherePoint>& vertices, int samples_per_edge) {
  if (samples_per_edge < 1) throw Error(ErrorCode::BadPath, "samples_per_edge must be >= 1");
  const int per_edge = std::max(2, round_up_even(samples_per_edge));
  LoopPath path;
  path.kind = LoopKind::SphericalPolygon;
  path.vertices = vertices;
  path.n_steps = per_edge;
  path.omega_solid = polygon_solid_angle(vertices);

  std::vector<Eigen::Vector3d> corners;
  for (const auto& v : vertices) corners.push_back(v.cartesian());
  if ((corners.front() - corners.back()).norm() < kTolerances.closure) corners.pop_back();

  path.segment_starts.clear();
  double phi = vertices.front().phi;
  path.samples.push_back(vertices.front());
  for (std::size_t e = 0; e < corners.size(); ++e) {
    const Eigen::Vector3d& p = corners[e];
    const Eigen::Vector3d& q = corners[(e + 1) % corners.size()];
    const double omega = std::acos(std::clamp(p.dot(q), -1.0, 1.0));
    if (kPi - omega < 1e-9) throw Error(ErrorCode::BadPath, "antipodal polygon edge is ambiguous");
    path.segment_starts.push_back(path.samples.size() - 1);
    for (int k = 1; k <= per_edge; ++k) {
      const double t = static_cast<double>(k) / per_edge;
      const Eigen::Vector3d x =
          (std::sin((1.0 - t) * omega) * p + std::sin(t * omega) * q) / std::sin(omega);
      const SpherePoint s = from_cartesian(x.normalized(), phi);
      phi = s.phi;
      path.samples.push_back(s);
    }
  }
  path.validate();
  return path;
}

LoopPath custom_loop(std::vector<SpherePoint> samples, double omega_solid) {
  LoopPath path;
  path.kind = LoopKind::Custom;
  path.samples = std::move(samples);
  path.omega_solid = omega_solid;
  path.n_steps = static_cast<int>(path.n_intervals());
  path.validate();
  return path;
}

double polygon_solid_angle(const std::vector<SpherePoint>& vertices) {
  std::vector<Eigen::Vector3d> pts;
  for (const auto& v : vertices) pts.push_back(v.cartesian());
  if (pts.size() >= 2 && (pts.front() - pts.back()).norm() < kTolerances.closure) pts.pop_back();
  if (pts.size() < 3) throw Error(ErrorCode::DegeneratePath, "a polygon needs three distinct vertices");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if ((pts[i] - pts[(i + 1) % pts.size()]).norm() < 1e-12) {
      throw Error(ErrorCode::DegeneratePath, "zero-length edge at vertex " + std::to_string(i));
    }
  }
  // Fan triangulation from the first vertex; each term is the signed excess
  // of one triangle.
  double total = 0.0;
  const Eigen::Vector3d& a = pts[0];
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Eigen::Vector3d& b = pts[i];
    const Eigen::Vector3d& c = pts[i + 1];
    const double num = a.dot(b.cross(c));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    total += 2.0 * std::atan2(num, den);
  }
  return normalize_area(total);
}

double polygon_solid_angle(const LoopPath& path) {
  if (!path.closed) throw Error(ErrorCode::BadPath, "solid angle of an open path");
  return polygon_solid_angle(path.samples);
}

struct SchwingerFrame::Data {
  BasisSpec basis;
  FockOperator jx;
  FockOperator jy;
  FockOperator jz;
  Eigen::VectorXd jz_diag;
  CMatrix jy_vectors;
  Eigen::VectorXd jy_values;
};

SchwingerFrame::SchwingerFrame(const BasisSpec& basis) {
  auto d = std::make_shared<Data>(Data{basis, identity(basis), identity(basis), identity(basis), {}, {}, {}});
  const Complex half(0.5), ihalf(0.0, 0.5);
  auto pair_ops = [&](Mode first, Mode second) {
    const FockOperator fwd = build_hop(basis, second, first);  // first -> second
    const FockOperator bwd = build_hop(basis, first, second);
    return std::array<FockOperator, 3>{
        half * (fwd + bwd), ihalf * (fwd - bwd),
        half * (build_number(basis, first) - build_number(basis, second))};
  };
  auto ab = pair_ops(Mode::A, Mode::B);
  d->jx = ab[0];
  d->jy = ab[1];
  d->jz = ab[2];
  if (basis.mode_count() == 4) {
    auto cd = pair_ops(Mode::C, Mode::D);
    d->jx = d->jx + cd[0];
    d->jy = d->jy + cd[1];
    d->jz = d->jz + cd[2];
  }
  d->jz_diag = d->jz.matrix.diagonal().real();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(d->jy.matrix);
  d->jy_vectors = eig.eigenvectors();
  d->jy_values = eig.eigenvalues();
  d_ = std::move(d);
}

const BasisSpec& SchwingerFrame::basis() const { return d_->basis; }
const FockOperator& SchwingerFrame::jx() const { return d_->jx; }
const FockOperator& SchwingerFrame::jy() const { return d_->jy; }
const FockOperator& SchwingerFrame::jz() const { return d_->jz; }
const Eigen::VectorXd& SchwingerFrame::jz_diagonal() const { return d_->jz_diag; }

namespace {

CVector phase_diag(const Eigen::VectorXd& generator, double angle) {
  CVector out(generator.size());
  for (Index i = 0; i < generator.size(); ++i) out(i) = std::polar(1.0, angle * generator(i));
  return out;
}

}  // namespace

SchwingerFrame::Rotation SchwingerFrame::rotation(double theta, double phi, FrameGauge gauge) const {
  return {this, phase_diag(d_->jz_diag, -phi), phase_diag(d_->jy_values, -theta),
          gauge == FrameGauge::Anchored};
}

CVector SchwingerFrame::Rotation::apply(const CVector& v) const {
  const Data& d = *frame->d_;
  CVector w = anchored ? CVector(z_phase.conjugate().cwiseProduct(v)) : v;
  CVector y = y_phase.cwiseProduct(d.jy_vectors.adjoint() * w);
  return z_phase.cwiseProduct(d.jy_vectors * y);
}

CVector SchwingerFrame::Rotation::apply_adjoint(const CVector& v) const {
  const Data& d = *frame->d_;
  CVector y = y_phase.conjugate().cwiseProduct(d.jy_vectors.adjoint() * z_phase.conjugate().cwiseProduct(v));
  CVector w = d.jy_vectors * y;
  return anchored ? CVector(z_phase.cwiseProduct(w)) : w;
}

CVector SchwingerFrame::rotate(const CVector& v, double theta, double phi, FrameGauge gauge) const {
  return rotation(theta, phi, gauge).apply(v);
}

CVector SchwingerFrame::rotate_adjoint(const CVector& v, double theta, double phi,
                                       FrameGauge gauge) const {
  return rotation(theta, phi, gauge).apply_adjoint(v);
}

FockOperator build_unitary(const SchwingerFrame& frame, double theta, double phi) {
  FockOperator ry = matrix_exponential(frame.jy(), Complex(0.0, -theta));
  FockOperator u{frame.basis(), phase_diag(frame.jz_diagonal(), -phi).asDiagonal() * ry.matrix, {}};
  return u;
}

FockOperator anchored_unitary(const SchwingerFrame& frame, double theta, double phi) {
  FockOperator u = build_unitary(frame, theta, phi);
  u.matrix = u.matrix * phase_diag(frame.jz_diagonal(), phi).asDiagonal();
  return u;
}

FockOperator rotated_hamiltonian(const FockOperator& h, const SchwingerFrame& frame, double theta,
                                 double phi, FrameGauge gauge) {
  if (!(h.basis == frame.basis())) {
    throw Error(ErrorCode::BasisMismatch, "Hamiltonian and Schwinger frame use different bases");
  }
  if (theta == 0.0 && phi == 0.0) return h;
  const FockOperator u =
      gauge == FrameGauge::Literal ? build_unitary(frame, theta, phi) : anchored_unitary(frame, theta, phi);
  FockOperator out{h.basis, u.matrix * h.matrix * u.matrix.adjoint(), {}};
  if (h.has_overflow()) {
    for (Index i = 0; i < h.basis.dim(); ++i) out.overflow_columns.push_back(i);
  }
  return out;
}

int default_revolutions(const BasisSpec& basis) {
  std::set<int> ab_parity, cd_parity;
  for (const Sector& s : basis.sectors()) {
    ab_parity.insert(s.ab % 2);
    cd_parity.insert(s.cd % 2);
  }
  const bool mixed = ab_parity.size() > 1 || (basis.mode_count() == 4 && cd_parity.size() > 1);
  return mixed ? 2 : 1;
}

}  // namespace jcanyon
