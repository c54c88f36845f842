#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "wbl/analytic.hpp"
#include "wbl/curvature.hpp"
#include "wbl/mesh.hpp"
#include "wbl/optimizer.hpp"

namespace wbl::test {

inline constexpr double kPi = std::numbers::pi;

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

inline Vec3 random_vector(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

/// Interior vertices moved by up to `amplitude` in each coordinate.
inline TriMesh perturbed(const TriMesh& mesh, double amplitude, std::mt19937_64& rng) {
  std::vector<Vec3> x = mesh.positions();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.is_boundary_vertex(v)) x[v] += random_vector(rng, amplitude);
  }
  return mesh.with_positions(std::move(x));
}

inline double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// max_i |g_i - FD_i| / (max_i |FD_i| + 1e-12), central differences over
/// every interior coordinate.
inline double gradient_fd_error(const TriMesh& mesh, const BoundaryCondition& bc, double step) {
  const VertexField g = gradient(mesh, bc);
  std::vector<Vec3> x = mesh.positions();
  double worst = 0.0, scale = 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    Vec3 fd = Vec3::Zero();
    if (!mesh.is_boundary_vertex(v)) {
      for (int k = 0; k < 3; ++k) {
        const double keep = x[v][k];
        x[v][k] = keep + step;
        const double plus = objective(mesh.with_positions(x), bc);
        x[v][k] = keep - step;
        const double minus = objective(mesh.with_positions(x), bc);
        x[v][k] = keep;
        fd[k] = (plus - minus) / (2.0 * step);
      }
    }
    worst = std::max(worst, (g[v] - fd).norm());
    scale = std::max(scale, fd.norm());
  }
  return worst / (scale + 1e-12);
}

/// Perturbed, rigidly moved test surface; `which` cycles through four shapes.
inline TriMesh random_config(std::mt19937_64& rng, int which) {
  const Eigen::Matrix3d Q = random_rotation(rng);
  const Vec3 t = random_vector(rng, 2.0);
  TriMesh base = [&] {
    switch (which % 4) {
      case 0: return flat_disk(1.0, {6, 5, 0});
      case 1: return truncated_sphere_mesh(1.2, 0.8, {16, 6, 0});
      case 2: return catenoid_mesh(1.0, 0.4, {16, 5, 0});
      default: return cylinder_mesh(1.3, 0.6, {12, 5, 0});
    }
  }();
  return transformed(perturbed(base, 0.03, rng), Q, t);
}

/// Clamped condition with the current conormals tilted at random.
inline BoundaryCondition tilted_targets(const TriMesh& m, std::mt19937_64& rng, double lambda) {
  std::vector<Vec3> targets = conormal_field(m).conormals;
  for (auto& c : targets) c = (c + random_vector(rng, 0.3)).normalized();
  return BoundaryCondition::clamped(m, std::move(targets), lambda);
}

}  // namespace wbl::test
