#pragma once

// Loops in the (theta, phi) parameter space, their solid angle on the
// Poincare sphere, and the Schwinger rotations that drive the dressed states
// around them.

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "jcanyon/fock.hpp"

namespace jcanyon {

struct SpherePoint {
  double theta = 0.0;
  double phi = 0.0;

  Eigen::Vector3d cartesian() const;
};

enum class LoopKind { ConstantLatitude, SphericalPolygon, PoleAnchored, Custom };

const char* to_string(LoopKind kind);

/// Sampled closed loop. The last sample repeats the first sphere point; phi is
/// unwrapped along the path, so a loop of r revolutions ends at phi = 2 pi r.
/// segment_starts lists the sample index where each smooth piece begins.
struct LoopPath {
  LoopKind kind = LoopKind::Custom;
  std::vector<SpherePoint> samples;
  std::vector<std::size_t> segment_starts{0};
  bool closed = true;
  double omega_solid = 0.0;
  int revolutions = 1;

  // Construction parameters, kept for serialization.
  double theta = 0.0;
  int n_steps = 0;
  std::vector<SpherePoint> vertices;

  std::size_t n_intervals() const { return samples.empty() ? 0 : samples.size() - 1; }
  /// Sample counts per segment, in intervals.
  std::vector<std::size_t> segment_lengths() const;
  /// Throws BadPath when closure or the solid-angle range is violated.
  void validate() const;

  nlohmann::json to_json() const;
  static LoopPath from_json(const nlohmann::json& doc);
};

/// phi: 0 -> 2 pi r at fixed theta; n_steps samples per revolution.
LoopPath constant_latitude_loop(double theta, int n_steps, int revolutions = 1);
/// Geodesic polygon through the given vertices, samples_per_edge intervals
/// on each edge (rounded up to an even count).
LoopPath spherical_polygon_loop(const std::vector<SpherePoint>& vertices, int samples_per_edge);
/// North pole, down the phi = 0 meridian to theta, once around the latitude
/// circle, and back up to the pole.
LoopPath pole_anchored_loop(double theta, int n_steps);
/// Caller-supplied samples with a known solid angle.
LoopPath custom_loop(std::vector<SpherePoint> samples, double omega_solid);

/// Inverse of Omega = 2 pi (1 - cos theta).
double theta_for_solid_angle(double omega_solid);
double latitude_solid_angle(double theta);

/// Oriented area enclosed by the geodesic polygon through the path's samples,
/// in [0, 4 pi). The region to the left of the direction of travel is
/// counted, so a counterclockwise loop seen from +z encloses the north cap;
/// reversing the loop yields 4 pi - Omega.
double polygon_solid_angle(const LoopPath& path);
double polygon_solid_angle(const std::vector<SpherePoint>& vertices);

enum class FrameGauge {
  /// U(theta, phi) = exp(-i phi J_z) exp(-i theta J_y)
  Literal,
  /// U(theta, phi) exp(i phi J_z): identity at the pole, single-valued in phi.
  Anchored,
};

/// J_x, J_y, J_z summed over the (a,b) pair and, for four-mode bases, the
/// (c,d) pair.
class SchwingerFrame {
 public:
  explicit SchwingerFrame(const BasisSpec& basis);

  const BasisSpec& basis() const;
  const FockOperator& jx() const;
  const FockOperator& jy() const;
  const FockOperator& jz() const;
  const Eigen::VectorXd& jz_diagonal() const;

  /// U(theta, phi) in factored form, reusable for several vectors.
  struct Rotation {
    const SchwingerFrame* frame;
    CVector z_phase;  // exp(-i phi J_z) diagonal
    CVector y_phase;  // exp(-i theta mu) in the J_y eigenbasis
    bool anchored;

    CVector apply(const CVector& v) const;
    CVector apply_adjoint(const CVector& v) const;
  };
  Rotation rotation(double theta, double phi, FrameGauge gauge) const;

  /// U v and U^dag v through the cached eigendecomposition of J_y.
  CVector rotate(const CVector& v, double theta, double phi, FrameGauge gauge) const;
  CVector rotate_adjoint(const CVector& v, double theta, double phi, FrameGauge gauge) const;

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
};

/// exp(-i phi J_z) exp(-i theta J_y), by matrix exponentials.
FockOperator build_unitary(const SchwingerFrame& frame, double theta, double phi);
FockOperator anchored_unitary(const SchwingerFrame& frame, double theta, double phi);

/// U H U^dag. Throws BasisMismatch when H lives on a different basis.
FockOperator rotated_hamiltonian(const FockOperator& h, const SchwingerFrame& frame, double theta,
                                 double phi, FrameGauge gauge = FrameGauge::Literal);

/// 2 when the included pair totals mix parity (odd m), otherwise 1.
int default_revolutions(const BasisSpec& basis);

}  // namespace jcanyon
