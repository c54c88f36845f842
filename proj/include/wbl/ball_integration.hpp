#pragma once

#include <functional>

#include "wbl/mesh.hpp"

namespace wbl {

/// Shell {x : inner <= |x - center| < outer}; inner = 0 gives the open ball.
struct Shell {
  Vec3 center = Vec3::Zero();
  double inner = 0.0;
  double outer = 0.0;

  bool contains(const Vec3& x) const {
    const double d = (x - center).norm();
    return d >= inner && d < outer;
  }
};

struct ClipSettings {
  // Fragments straddling a shell sphere are split until their diameter is
  // below clip_size. Such a leaf then counts with the fraction of its area
  // where the linear interpolant of |x - center| - radius is negative, or,
  // with fractional_leaves off, in full when its centroid is inside.
  double clip_size = 0.0;
  // When positive, contained pieces are also split while
  // diameter > singular_ratio * distance(center, piece), for integrands
  // that blow up at the centre.
  double singular_ratio = 0.0;
  bool fractional_leaves = true;
};

/// Callbacks receive either a whole face (entirely inside the shell and
/// fine enough) or a leaf fragment given by the barycentric coordinates of
/// its centroid and its area.
struct SurfaceVisitor {
  std::function<void(int face)> whole;
  std::function<void(int face, const Vec3& bary, const Vec3& point, double area)> fragment;
};

/// Deterministic traversal of mesh intersected with the shell by recursive
/// 1-to-4 subdivision. Whole faces are reported in face order.
void integrate_surface(const TriMesh& mesh, const Shell& shell, const ClipSettings& settings,
                       const SurfaceVisitor& visitor);

/// Same idea for a set of segments: segment s runs from a[s] to b[s]; the
/// callback receives the segment id, the parameter t in [0, 1] and the
/// length weight of each quadrature point.
void integrate_segments(const std::vector<Vec3>& a, const std::vector<Vec3>& b, const Shell& shell,
                        const ClipSettings& settings,
                        const std::function<void(int seg, double t, double weight)>& visit);

}  // namespace wbl
