#include "wbl/ball_integration.hpp"

#include <algorithm>
#include <cmath>

namespace wbl {

namespace {

struct Piece {
  Vec3 x[3];   // corner positions
  Vec3 l[3];   // corner barycentric coordinates in the parent face
};

double diameter(const Piece& p) {
  return std::max({(p.x[0] - p.x[1]).norm(), (p.x[1] - p.x[2]).norm(), (p.x[2] - p.x[0]).norm()});
}

double piece_area(const Piece& p) { return 0.5 * (p.x[1] - p.x[0]).cross(p.x[2] - p.x[0]).norm(); }

constexpr int kMaxDepth = 24;

// Fraction of a triangle where the linear interpolant of the corner values is negative.
double negative_fraction(const double f[3]) {
  int neg = 0;
  for (int k = 0; k < 3; ++k) neg += f[k] < 0.0;
  if (neg == 0) return 0.0;
  if (neg == 3) return 1.0;
  const bool lone_negative = neg == 1;
  int lone = 0;
  for (int k = 0; k < 3; ++k) {
    if ((f[k] < 0.0) == lone_negative) lone = k;
  }
  const double a = f[lone], b = f[(lone + 1) % 3], c = f[(lone + 2) % 3];
  const double corner = a * a / ((a - b) * (a - c));
  return lone_negative ? corner : 1.0 - corner;
}

enum class Relation { Outside, Inside, Straddles };

Relation classify(const Piece& p, const Shell& s, double& dmin) {
  double dmax = 0.0;
  for (const auto& x : p.x) dmax = std::max(dmax, (x - s.center).norm());
  dmin = point_triangle_distance(s.center, p.x[0], p.x[1], p.x[2]);
  if (dmin >= s.outer || dmax < s.inner) return Relation::Outside;
  // Ball is convex, so corners inside the outer ball put the whole piece there.
  if (dmax < s.outer && dmin >= s.inner) return Relation::Inside;
  return Relation::Straddles;
}

class SurfaceWalker {
 public:
  SurfaceWalker(const Shell& s, const ClipSettings& c, const SurfaceVisitor& v)
      : shell_(s), settings_(c), visitor_(v) {}

  void run(int face, const Piece& root) {
    face_ = face;
    recurse(root, 0);
  }

 private:
  void emit_leaf(const Piece& p) {
    const Vec3 x = (p.x[0] + p.x[1] + p.x[2]) / 3.0;
    double weight = 0.0;
    if (settings_.fractional_leaves) {
      double fo[3], fi[3];
      for (int k = 0; k < 3; ++k) {
        const double r = (p.x[k] - shell_.center).norm();
        fo[k] = r - shell_.outer;
        fi[k] = r - shell_.inner;
      }
      // Inner ball is contained in the outer one.
      weight = piece_area(p) * (negative_fraction(fo) - (shell_.inner > 0.0 ? negative_fraction(fi) : 0.0));
      if (weight <= 0.0) return;
    } else {
      if (!shell_.contains(x)) return;
      weight = piece_area(p);
    }
    visitor_.fragment(face_, (p.l[0] + p.l[1] + p.l[2]) / 3.0, x, weight);
  }

  // Three edge-midpoint rule, exact for quadratic integrands.
  void emit_midpoints(const Piece& p) {
    const double w = piece_area(p) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const int a = k, b = (k + 1) % 3;
      visitor_.fragment(face_, 0.5 * (p.l[a] + p.l[b]), 0.5 * (p.x[a] + p.x[b]), w);
    }
  }

  void recurse(const Piece& p, int depth) {
    double dmin = 0.0;
    const Relation rel = classify(p, shell_, dmin);
    if (rel == Relation::Outside) return;
    const double diam = diameter(p);
    const bool tiny = diam < settings_.clip_size || depth >= kMaxDepth;
    if (rel == Relation::Inside) {
      const bool smooth_enough =
          settings_.singular_ratio <= 0.0 || diam <= settings_.singular_ratio * dmin;
      if (smooth_enough || tiny) {
        if (settings_.singular_ratio <= 0.0 && depth == 0 && visitor_.whole) {
          visitor_.whole(face_);
        } else {
          emit_midpoints(p);
        }
        return;
      }
    } else if (tiny) {
      emit_leaf(p);
      return;
    }
    const Vec3 mx[3] = {0.5 * (p.x[0] + p.x[1]), 0.5 * (p.x[1] + p.x[2]), 0.5 * (p.x[2] + p.x[0])};
    const Vec3 ml[3] = {0.5 * (p.l[0] + p.l[1]), 0.5 * (p.l[1] + p.l[2]), 0.5 * (p.l[2] + p.l[0])};
    recurse(Piece{{p.x[0], mx[0], mx[2]}, {p.l[0], ml[0], ml[2]}}, depth + 1);
    recurse(Piece{{mx[0], p.x[1], mx[1]}, {ml[0], p.l[1], ml[1]}}, depth + 1);
    recurse(Piece{{mx[2], mx[1], p.x[2]}, {ml[2], ml[1], p.l[2]}}, depth + 1);
    recurse(Piece{{mx[0], mx[1], mx[2]}, {ml[0], ml[1], ml[2]}}, depth + 1);
  }

  const Shell& shell_;
  const ClipSettings& settings_;
  const SurfaceVisitor& visitor_;
  int face_ = -1;
};

}  // namespace

void integrate_surface(const TriMesh& mesh, const Shell& shell, const ClipSettings& settings,
                       const SurfaceVisitor& visitor) {
  SurfaceWalker walker(shell, settings, visitor);
  const auto& faces = mesh.faces();
  const auto& x = mesh.positions();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = faces[f];
    Piece root{{x[t[0]], x[t[1]], x[t[2]]}, {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()}};
    walker.run(f, root);
  }
}

namespace {

// Two-point Gauss-Legendre on [t0, t1].
void gauss2(int seg, double t0, double t1, double length,
            const std::function<void(int, double, double)>& visit) {
  const double half = 0.5 * (t1 - t0);
  const double mid = 0.5 * (t0 + t1);
  const double off = half / std::sqrt(3.0);
  visit(seg, mid - off, 0.5 * length);
  visit(seg, mid + off, 0.5 * length);
}

double inside_fraction(const Vec3& a, const Vec3& b, const Vec3& center, double radius) {
  const double fa = (a - center).norm() - radius;
  const double fb = (b - center).norm() - radius;
  if (fa < 0.0 && fb < 0.0) return 1.0;
  if (fa >= 0.0 && fb >= 0.0) return 0.0;
  return fa < 0.0 ? fa / (fa - fb) : fb / (fb - fa);
}

void segment_recurse(int seg, const Vec3& a, const Vec3& b, double t0, double t1, const Shell& s,
                     const ClipSettings& c, const std::function<void(int, double, double)>& visit) {
  const Vec3 pa = a + t0 * (b - a);
  const Vec3 pb = a + t1 * (b - a);
  const double len = (pb - pa).norm();
  const double dmin = point_segment_distance(s.center, pa, pb);
  const double dmax = std::max((pa - s.center).norm(), (pb - s.center).norm());
  if (dmin >= s.outer || dmax < s.inner) return;
  const bool inside = dmax < s.outer && dmin >= s.inner;
  const bool tiny = len < c.clip_size || t1 - t0 < 1e-9;
  if (inside) {
    if (c.singular_ratio <= 0.0 || len <= c.singular_ratio * dmin || tiny) {
      gauss2(seg, t0, t1, len, visit);
      return;
    }
  } else if (tiny) {
    if (c.fractional_leaves) {
      const double w = len * (inside_fraction(pa, pb, s.center, s.outer) -
                              (s.inner > 0.0 ? inside_fraction(pa, pb, s.center, s.inner) : 0.0));
      if (w > 0.0) visit(seg, 0.5 * (t0 + t1), w);
    } else if (s.contains(0.5 * (pa + pb))) {
      visit(seg, 0.5 * (t0 + t1), len);
    }
    return;
  }
  const double tm = 0.5 * (t0 + t1);
  segment_recurse(seg, a, b, t0, tm, s, c, visit);
  segment_recurse(seg, a, b, tm, t1, s, c, visit);
}

}  // namespace

void integrate_segments(const std::vector<Vec3>& a, const std::vector<Vec3>& b, const Shell& shell,
                        const ClipSettings& settings,
                        const std::function<void(int seg, double t, double weight)>& visit) {
  for (std::size_t s = 0; s < a.size(); ++s) {
    segment_recurse(static_cast<int>(s), a[s], b[s], 0.0, 1.0, shell, settings, visit);
  }
}

}  // namespace wbl
