#include "wbl/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <utility>

namespace wbl {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, what);
}

struct Ring {
  std::vector<int> index;
  std::vector<double> angle;  // increasing, spanning less than 2 pi
};

// Triangulates the band between two rings by merging them in angular order.
// With flip = false the triangles are counterclockwise when the "upper" ring
// lies in the direction d such that (angular direction) x d is the normal.
void stitch(const Ring& lower, const Ring& upper, bool flip, std::vector<Face>& faces) {
  auto emit = [&](int a, int b, int c) {
    if (flip) std::swap(b, c);
    faces.push_back({a, b, c});
  };
  const int nl = static_cast<int>(lower.index.size());
  const int nu = static_cast<int>(upper.index.size());
  if (nl == 1) {
    for (int k = 0; k < nu; ++k) emit(lower.index[0], upper.index[(k + 1) % nu], upper.index[k]);
    return;
  }
  if (nu == 1) {
    for (int i = 0; i < nl; ++i) emit(lower.index[i], lower.index[(i + 1) % nl], upper.index[0]);
    return;
  }
  auto wrap = [](double a) {
    a = std::fmod(a, 2.0 * kPi);
    return a < 0 ? a + 2.0 * kPi : a;
  };
  // Rotate the upper ring so that its first vertex is angularly closest to
  // the first lower vertex.
  int shift = 0;
  double best = 1e300;
  for (int k = 0; k < nu; ++k) {
    double d = wrap(upper.angle[k] - lower.angle[0]);
    d = std::min(d, 2.0 * kPi - d);
    if (d < best) {
      best = d;
      shift = k;
    }
  }
  const double alpha0 = lower.angle[0];
  std::vector<double> alpha(nl + 1), beta(nu + 1);
  for (int i = 0; i < nl; ++i) alpha[i] = alpha0 + wrap(lower.angle[i] - alpha0);
  alpha[nl] = alpha0 + 2.0 * kPi;
  double beta0 = upper.angle[shift];
  double off = wrap(beta0 - alpha0);
  if (off > kPi) off -= 2.0 * kPi;
  beta0 = alpha0 + off;
  for (int k = 0; k < nu; ++k) beta[k] = beta0 + wrap(upper.angle[(k + shift) % nu] - upper.angle[shift]);
  beta[nu] = beta0 + 2.0 * kPi;
  auto up = [&](int k) { return upper.index[(k + shift) % nu]; };

  int i = 0, k = 0;
  while (i < nl || k < nu) {
    const bool advance_lower = k == nu || (i < nl && alpha[i + 1] <= beta[k + 1]);
    if (advance_lower) {
      emit(lower.index[i], lower.index[(i + 1) % nl], up(k));
      ++i;
    } else {
      emit(lower.index[i % nl], up(k + 1), up(k));
      ++k;
    }
  }
}

// Rings of a surface of revolution, listed from z = -h upwards. Odd rings are
// rotated by half a step so the triangles are close to equilateral.
TriMesh revolution_mesh(const std::vector<std::pair<double, double>>& profile, int n_around) {
  std::vector<Vec3> pos;
  std::vector<Ring> rings;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const auto [r, z] = profile[j];
    Ring ring;
    const double offset = (j % 2) ? 0.5 : 0.0;
    for (int i = 0; i < n_around; ++i) {
      const double theta = 2.0 * kPi * (i + offset) / n_around;
      ring.index.push_back(static_cast<int>(pos.size()));
      ring.angle.push_back(theta);
      pos.emplace_back(r * std::cos(theta), r * std::sin(theta), z);
    }
    rings.push_back(std::move(ring));
  }
  std::vector<Face> faces;
  for (std::size_t j = 0; j + 1 < rings.size(); ++j) stitch(rings[j], rings[j + 1], false, faces);
  return build_mesh(std::move(pos), std::move(faces));
}

// Concentric rings around a pole; ring k holds counts[k] vertices placed by
// point(k, theta). Outward normal points from the ring plane towards +z.
TriMesh polar_mesh(const std::vector<int>& counts,
                   const std::function<Vec3(int, double)>& point) {
  std::vector<Vec3> pos;
  std::vector<Ring> rings;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    Ring ring;
    for (int i = 0; i < counts[k]; ++i) {
      const double theta = 2.0 * kPi * i / counts[k];
      ring.index.push_back(static_cast<int>(pos.size()));
      ring.angle.push_back(theta);
      pos.push_back(point(static_cast<int>(k), theta));
    }
    rings.push_back(std::move(ring));
  }
  std::vector<Face> faces;
  for (std::size_t k = 0; k + 1 < rings.size(); ++k) stitch(rings[k], rings[k + 1], true, faces);
  return build_mesh(std::move(pos), std::move(faces));
}

struct Counts {
  int around;
  int axial;
};

Counts resolve(const MeshRecipe& recipe, double circumference, double profile_length) {
  recipe.validate();
  if (recipe.target_edge > 0.0) {
    const int around = std::max(3, static_cast<int>(std::ceil(circumference / recipe.target_edge)));
    const int axial = std::max(
        3, static_cast<int>(std::ceil(profile_length / (recipe.target_edge * std::sqrt(3.0) / 2.0))));
    return {around, axial};
  }
  return {recipe.n_around, recipe.n_axial};
}

double bisect(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Waist-between-circles family and waist-above-top-circle family: the
// half-separation spanned by a catenoid of waist c.
double span_between(double R, double c) { return c * (std::acosh(1.0 / c) + std::acosh(R / c)); }
double span_outside(double R, double c) { return c * (std::acosh(R / c) - std::acosh(1.0 / c)); }

std::vector<double> waist_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 1400; ++k) grid.push_back(std::pow(10.0, -14.0 + 14.0 * k / 1400.0));
  for (int k = 1; k < 2000; ++k) grid.push_back(0.0005 * k);
  grid.push_back(1.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

// argmax of span_between over (0, 1]: best grid sample refined by golden section.
double widest_waist(double R, const std::vector<double>& grid) {
  std::size_t best = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (span_between(R, grid[k]) > span_between(R, grid[best])) best = k;
  }
  double a = grid[best > 0 ? best - 1 : 0];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = span_between(R, x1), f2 = span_between(R, x2);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = span_between(R, x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = span_between(R, x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void BoundaryConfig::validate() const {
  require(std::isfinite(R) && R >= 1.0, "R must be >= 1 (got " + std::to_string(R) + ")");
  require(std::isfinite(h) && h > 0.0, "h must be > 0 (got " + std::to_string(h) + ")");
}

void MeshRecipe::validate() const {
  if (target_edge > 0.0) return;
  require(n_around >= 3 && n_axial >= 3, "mesh resolutions must be >= 3");
}

double CatenoidSolution::radius_at(double z) const { return c * std::cosh((z - z0) / c); }

double truncated_sphere_energy(double R, double h) {
  BoundaryConfig{R, h}.validate();
  const double a = 4.0 * h * h + (R - 1.0) * (R + 1.0);  // no cancellation as h -> 0
  return 4.0 * kPi * a / std::sqrt(a * a + 16.0 * h * h);
}

SphereThroughCircles sphere_through_circles(double R, double h) {
  BoundaryConfig{R, h}.validate();
  const double zc = (1.0 - R * R) / (4.0 * h);
  return {zc, std::sqrt(1.0 + (zc - h) * (zc - h))};
}

double truncated_sphere_zone_energy(double R, double h) {
  const auto s = sphere_through_circles(R, h);
  // W = area / r^2 with area = 2 pi r * 2h.
  return 4.0 * kPi * h / s.radius;
}

TriMesh truncated_sphere_mesh(double R, double h, const MeshRecipe& recipe) {
  const auto s = sphere_through_circles(R, h);
  const double phi_top = std::acos(std::clamp((h - s.center_z) / s.radius, -1.0, 1.0));
  const double phi_bottom = std::acos(std::clamp((-h - s.center_z) / s.radius, -1.0, 1.0));
  const double max_r = phi_top < kPi / 2 && phi_bottom > kPi / 2 ? s.radius : std::max(1.0, R);
  const auto n = resolve(recipe, 2.0 * kPi * max_r, s.radius * (phi_bottom - phi_top));
  std::vector<std::pair<double, double>> profile;
  for (int j = 0; j <= n.axial; ++j) {
    if (j == 0) {
      profile.emplace_back(R, -h);
    } else if (j == n.axial) {
      profile.emplace_back(1.0, h);
    } else {
      const double phi = phi_bottom + (phi_top - phi_bottom) * j / n.axial;
      profile.emplace_back(s.radius * std::sin(phi), s.center_z + s.radius * std::cos(phi));
    }
  }
  return revolution_mesh(profile, n.around);
}

CatenoidSolution solve_catenoid(double R, double h) {
  BoundaryConfig{R, h}.validate();
  static const std::vector<double> base_grid = waist_grid();
  std::vector<double> grid = base_grid;
  const double widest = widest_waist(R, grid);
  if (2.0 * h > span_between(R, widest)) {
    throw Error(ErrorCode::NoCatenoid, "no catenoid spans R = " + std::to_string(R) +
                                           ", h = " + std::to_string(h));
  }
  grid.push_back(widest);
  std::sort(grid.begin(), grid.end());

  std::vector<double> between, outside;
  auto collect = [&](double (*span)(double, double), std::vector<double>& roots) {
    auto g = [&](double c) { return span(R, c) - 2.0 * h; };
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const double ga = g(grid[k]), gb = g(grid[k + 1]);
      if (ga == 0.0) {
        roots.push_back(grid[k]);
      } else if ((ga < 0) != (gb < 0) && gb != 0.0) {
        roots.push_back(bisect(g, grid[k], grid[k + 1]));
      }
    }
    if (g(grid.back()) == 0.0) roots.push_back(grid.back());
  };
  collect(span_between, between);
  if (R > 1.0) collect(span_outside, outside);
  // Tangential root exactly at the critical height.
  if (between.empty()) between.push_back(widest);

  CatenoidSolution sol;
  for (double c : between) sol.branches.push_back({c, h - c * std::acosh(1.0 / c)});
  for (double c : outside) {
    if (c < 1.0) sol.branches.push_back({c, h + c * std::acosh(1.0 / c)});
  }
  std::sort(sol.branches.begin(), sol.branches.end(),
            [](const auto& a, const auto& b) { return a[0] > b[0]; });
  sol.c = sol.branches.front()[0];
  sol.z0 = sol.branches.front()[1];
  sol.valid = true;
  return sol;
}

double catenoid_critical_height_by_bisection(double R) {
  BoundaryConfig{R, 1.0}.validate();
  auto solvable = [R](double h) {
    try {
      solve_catenoid(R, h);
      return true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoCatenoid) throw;
      return false;
    }
  };
  double lo = 1e-9, hi = 1.0;
  while (solvable(hi)) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (solvable(mid) ? lo : hi) = mid;
  }
  return lo;
}

double catenoid_critical_height(double R) {
  BoundaryConfig{R, 1.0}.validate();
  if (R > 1.0) return catenoid_critical_height_by_bisection(R);
  // max_t t / cosh t is attained where t tanh t = 1.
  auto g = [](double t) { return t * std::tanh(t) - 1.0; };
  double t = bisect(g, 1.0, 2.0);
  for (int it = 0; it < 3; ++it) {
    const double sech = 1.0 / std::cosh(t);
    t -= g(t) / (std::tanh(t) + t * sech * sech);
  }
  return t / std::cosh(t);
}

TriMesh catenoid_mesh(double R, double h, const MeshRecipe& recipe) {
  const auto sol = solve_catenoid(R, h);
  const double c = sol.c;
  // Arc-length parametrisation: s = c sinh((z - z0) / c), r = sqrt(c^2 + s^2).
  const double s_bottom = c * std::sinh((-h - sol.z0) / c);
  const double s_top = c * std::sinh((h - sol.z0) / c);
  const auto n = resolve(recipe, 2.0 * kPi * R, s_top - s_bottom);
  std::vector<std::pair<double, double>> profile;
  for (int j = 0; j <= n.axial; ++j) {
    if (j == 0) {
      profile.emplace_back(R, -h);
    } else if (j == n.axial) {
      profile.emplace_back(1.0, h);
    } else {
      const double s = s_bottom + (s_top - s_bottom) * j / n.axial;
      profile.emplace_back(std::sqrt(c * c + s * s), sol.z0 + c * std::asinh(s / c));
    }
  }
  return revolution_mesh(profile, n.around);
}

TriMesh cylinder_mesh(double R, double h, const MeshRecipe& recipe) {
  BoundaryConfig{R, h}.validate();
  const auto n = resolve(recipe, 2.0 * kPi * R, std::hypot(2.0 * h, R - 1.0));
  std::vector<std::pair<double, double>> profile;
  for (int j = 0; j <= n.axial; ++j) {
    const double t = static_cast<double>(j) / n.axial;
    profile.emplace_back(j == n.axial ? 1.0 : R + (1.0 - R) * t, j == n.axial ? h : -h + 2.0 * h * t);
  }
  return revolution_mesh(profile, n.around);
}

TriMesh icosphere(const Vec3& center, double radius, int subdivisions) {
  require(radius > 0.0, "icosphere radius must be positive");
  require(subdivisions >= 0 && subdivisions <= 8, "icosphere subdivisions must be in [0, 8]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> pos = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                           {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                           {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : pos) p.normalize();
  std::vector<Face> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      pos.push_back((pos[a] + pos[b]).normalized());
      const int idx = static_cast<int>(pos.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    next.reserve(4 * faces.size());
    for (const Face& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  for (auto& p : pos) p = center + radius * p;
  return build_mesh(std::move(pos), std::move(faces));
}

TriMesh flat_disk(double radius, const MeshRecipe& recipe) {
  require(radius > 0.0, "disk radius must be positive");
  recipe.validate();
  const int rings = recipe.target_edge > 0.0
                        ? std::max(3, static_cast<int>(std::ceil(radius / recipe.target_edge)))
                        : recipe.n_axial;
  std::vector<int> counts(rings + 1);
  counts[0] = 1;
  for (int k = 1; k <= rings; ++k) counts[k] = 6 * k;
  return polar_mesh(counts, [&](int k, double theta) {
    const double r = radius * k / rings;
    return Vec3(r * std::cos(theta), r * std::sin(theta), 0.0);
  });
}

TriMesh spherical_cap(double radius, double max_polar_angle, const MeshRecipe& recipe) {
  require(radius > 0.0, "cap radius must be positive");
  require(max_polar_angle > 0.0 && max_polar_angle < kPi, "cap angle must lie in (0, pi)");
  recipe.validate();
  const int rings =
      recipe.target_edge > 0.0
          ? std::max(3, static_cast<int>(std::ceil(radius * max_polar_angle / recipe.target_edge)))
          : recipe.n_axial;
  std::vector<int> counts(rings + 1);
  counts[0] = 1;
  for (int k = 1; k <= rings; ++k) {
    const double phi = max_polar_angle * k / rings;
    counts[k] = std::max(6, static_cast<int>(std::lround(6.0 * k * std::sin(phi) / phi)));
  }
  return polar_mesh(counts, [&](int k, double theta) {
    const double phi = max_polar_angle * k / rings;
    double z = radius * std::cos(phi);
    if (std::abs(z) < 1e-15 * radius) z = 0.0;
    const double r = radius * std::sin(phi);
    return Vec3(r * std::cos(theta), r * std::sin(theta), z);
  });
}

CircleSamples gamma_Rh_samples(double R, double h, int n) {
  BoundaryConfig{R, h}.validate();
  require(n >= 3, "need at least 3 samples per circle");
  CircleSamples out;
  for (int i = 0; i < n; ++i) {
    const double theta = 2.0 * kPi * i / n;
    out.upper.emplace_back(std::cos(theta), std::sin(theta), h);
    out.lower.emplace_back(R * std::cos(theta), R * std::sin(theta), -h);
  }
  return out;
}

}  // namespace wbl
