#pragma once

#include <utility>
#include <vector>

#include "wbl/mesh.hpp"

namespace wbl {

struct MonotoneOptions {
  // Straddling fragments are refined to diameter below clip_fraction * rho.
  double clip_fraction = 1.0 / 200.0;
  // Pieces near the base point are split while diam > singular_ratio * distance.
  double singular_ratio = 0.5;
  // Violation threshold, relative to max |A| over the profile.
  double tau_rel = 1e-2;
};

struct MonotoneSample {
  double rho = 0.0;
  double area_ratio = 0.0;           // |Sigma cap B_rho| / rho^2
  double energy_term = 0.0;          // 1/4 int_B |H|^2
  double curvature_remainder = 0.0;  // int_B <H, p - p0> / rho^2
  double boundary_remainder = 0.0;   // 1/2 int_{dSigma cap B} (|p-p0|^-2 - rho^-2) <p - p0, co>
  double total = 0.0;
};

struct MonotoneProfile {
  Vec3 p0 = Vec3::Zero();
  std::vector<MonotoneSample> samples;
  double tolerance = 0.0;
  // Index pairs (k, k+1) with A(rho_{k+1}) < A(rho_k) - tolerance.
  std::vector<std::pair<int, int>> violations;

  bool monotone() const { return violations.empty(); }
};

/// Precomputes the per-vertex fields (H extended to the boundary, vertex
/// normals, conormals) once so that many radii and base points can be
/// evaluated against the same mesh. Read-only after construction.
///
/// Surface fields are evaluated inside a face by barycentric interpolation.
/// The energy density is weighted by each corner's share of the mixed area,
/// so that integrating it over the whole mesh gives sum_i |H_i|^2 A_i.
class MonotoneEvaluator {
 public:
  explicit MonotoneEvaluator(const TriMesh& mesh, const MonotoneOptions& options = {});

  const TriMesh& mesh() const { return mesh_; }
  const MonotoneOptions& options() const { return options_; }

  double ball_area(const Vec3& p0, double rho) const;
  MonotoneSample quantity(const Vec3& p0, double rho) const;
  MonotoneProfile profile(const Vec3& p0, const std::vector<double>& radii) const;

  /// int over sigma <= |p - p0| < rho of |H/2 + (p - p0)^perp / |p - p0|^2|^2,
  /// expanded as 1/4 |H|^2 + <H, p - p0>/|p - p0|^2 + |(p - p0)^perp|^2/|p - p0|^4.
  /// rho may be +infinity.
  double annulus_integral(const Vec3& p0, double sigma, double rho) const;

  /// int over the whole boundary of <(p - p0)/|p - p0|^2, co>; 0 on closed meshes.
  double boundary_flux(const Vec3& p0) const;

  /// sum over all vertices of |H~_i|^2 A_i with H~ extended to the boundary.
  double field_energy() const { return field_energy_; }

  /// Area ratio |Sigma cap B_s| / (pi s^2) at s = delta, 2 delta, 4 delta,
  /// extrapolated quadratically to s = 0.
  double density(const Vec3& p0, double delta) const;

  /// Throws BasePointOnBoundary when p0 is within 1e-6 * extent of the boundary.
  void check_off_boundary(const Vec3& p0) const;

 private:
  struct PointFields {
    Vec3 h;         // interpolated mean curvature vector
    double energy;  // area-weighted |H|^2 density
    Vec3 normal;
  };
  PointFields fields_at(int face, const Vec3& bary) const;
  double boundary_remainder(const Vec3& p0, double rho) const;
  Vec3 conormal_at(int seg, double t) const;

  TriMesh mesh_;
  MonotoneOptions options_;
  std::vector<Vec3> h_;
  std::vector<Vec3> normals_;
  std::vector<std::array<double, 3>> corner_weight_;  // A_{k,f} / (area_f / 3)
  double field_energy_ = 0.0;
  // Boundary edges as segments, with the conormals of their end points.
  std::vector<Vec3> seg_a_, seg_b_, co_a_, co_b_;
};

double ball_area(const TriMesh& mesh, const Vec3& p0, double rho);
MonotoneSample monotone_quantity(const TriMesh& mesh, const Vec3& p0, double rho);
MonotoneProfile monotone_profile(const TriMesh& mesh, const Vec3& p0,
                                 const std::vector<double>& radii,
                                 const MonotoneOptions& options = {});

/// Position of the mesh vertex nearest to p.
Vec3 snap_to_vertex(const TriMesh& mesh, const Vec3& p);

/// Mean length of the edges at the vertex nearest to p.
double local_edge_length(const TriMesh& mesh, const Vec3& p);

struct BoundaryIdentityTerms {
  double delta = 0.0;
  double density = 0.0;   // extrapolated theta
  double annulus = 0.0;   // integral outside B_delta
  double energy = 0.0;    // field energy
  double flux = 0.0;      // int_boundary <(p - p0)/|p - p0|^2, co>
  double lhs = 0.0;       // 4 pi theta + 4 annulus
  double rhs = 0.0;       // energy + 2 flux
  double residual = 0.0;  // |lhs - rhs|
};

/// Both sides of the boundary identity at a surface point p0. Throws
/// BasePointOffSurface / BasePointOnBoundary.
BoundaryIdentityTerms boundary_identity_terms(const TriMesh& mesh, const Vec3& p0);
double boundary_identity_residual(const TriMesh& mesh, const Vec3& p0);

struct LowerBoundTerms {
  double willmore = 0.0;
  double boundary_length = 0.0;
  double distance = 0.0;  // farthest sampled surface point from the boundary
  double gap = 0.0;       // willmore + 2 length / distance - 4 pi
};

/// Throws NoBoundary / Disconnected.
LowerBoundTerms lower_bound_terms(const TriMesh& mesh);
double lower_bound_gap(const TriMesh& mesh);

}  // namespace wbl
