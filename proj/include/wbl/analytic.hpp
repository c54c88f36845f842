#pragma once

#include <array>
#include <vector>

#include "wbl/mesh.hpp"

namespace wbl {

/// Two coaxial circles: radius 1 at z = +h and radius R at z = -h.
struct BoundaryConfig {
  double R = 1.0;
  double h = 1.0;

  /// Throws InvalidConfig unless R >= 1 and h > 0.
  void validate() const;
};

/// Profile r(z) = c cosh((z - z0) / c) through both circles.
struct CatenoidSolution {
  double c = 0.0;
  double z0 = 0.0;
  bool valid = false;
  /// Every (c, z0) pair found, ordered by decreasing c; the first is returned.
  std::vector<std::array<double, 2>> branches;

  double radius_at(double z) const;
};

/// Mesh resolution. For surfaces of revolution n_around is the number of
/// vertices per ring and n_axial the number of ring-to-ring bands; disks and
/// caps use n_axial as the ring count. A positive target_edge overrides both
/// with counts derived from the surface size.
struct MeshRecipe {
  int n_around = 64;
  int n_axial = 16;
  double target_edge = 0.0;

  void validate() const;
};

/// 4 pi (4h^2 + R^2 - 1) / sqrt((4h^2 + R^2 - 1)^2 + 16 h^2).
/// Equals the energy of the truncated sphere when R = 1 and bounds it above
/// otherwise.
double truncated_sphere_energy(double R, double h);

/// Exact energy of the sphere zone through both circles, 4 pi h / r.
double truncated_sphere_zone_energy(double R, double h);

/// Centre height and radius of the sphere through both circles.
struct SphereThroughCircles {
  double center_z;
  double radius;
};
SphereThroughCircles sphere_through_circles(double R, double h);

/// Latitude-longitude zone of the sphere through both circles, clipped at
/// |z| <= h. Boundary rings are placed exactly on the circles.
TriMesh truncated_sphere_mesh(double R, double h, const MeshRecipe& recipe);

/// Largest h for which a catenoid spans the two circles. R = 1 solves
/// t tanh t = 1; R > 1 bisects on h using solve_catenoid.
double catenoid_critical_height(double R);
/// Same bisection used for R > 1, exposed so it can be checked against the
/// R = 1 closed form.
double catenoid_critical_height_by_bisection(double R);

/// Throws NoCatenoid when h exceeds the critical height.
CatenoidSolution solve_catenoid(double R, double h);

TriMesh catenoid_mesh(double R, double h, const MeshRecipe& recipe);
/// Ruled surface (a cylinder for R = 1, a frustum otherwise) between the circles.
TriMesh cylinder_mesh(double R, double h, const MeshRecipe& recipe);
/// Subdivided icosahedron projected to the sphere; 10 * 4^n + 2 vertices.
TriMesh icosphere(const Vec3& center, double radius, int subdivisions);
/// Disk in the z = 0 plane, concentric rings with 6k vertices on ring k.
TriMesh flat_disk(double radius, const MeshRecipe& recipe);
/// Polar cap of the sphere of the given radius centred at the origin,
/// polar angle in [0, max_polar_angle], with the same ring layout as flat_disk.
/// max_polar_angle = pi / 2 gives the upper hemisphere.
TriMesh spherical_cap(double radius, double max_polar_angle, const MeshRecipe& recipe);

struct CircleSamples {
  std::vector<Vec3> upper;  // radius 1, z = +h
  std::vector<Vec3> lower;  // radius R, z = -h
};
CircleSamples gamma_Rh_samples(double R, double h, int n);

}  // namespace wbl
