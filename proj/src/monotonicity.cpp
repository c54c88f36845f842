#include "wbl/monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wbl/ball_integration.hpp"
#include "wbl/curvature.hpp"

namespace wbl {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_radius(double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCode::NonpositiveRadius, "radius " + std::to_string(rho));
}

double distance_to_boundary(const TriMesh& mesh, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  const auto& x = mesh.positions();
  for (const auto& loop : mesh.loops()) {
    const std::size_t n = loop.size();
    for (std::size_t k = 0; k < n; ++k) {
      best = std::min(best, point_segment_distance(p, x[loop.vertices[k]],
                                                   x[loop.vertices[(k + 1) % n]]));
    }
  }
  return best;
}

}  // namespace

MonotoneEvaluator::MonotoneEvaluator(const TriMesh& mesh, const MonotoneOptions& options)
    : mesh_(mesh), options_(options) {
  const int nv = mesh_.num_vertices();
  const auto& x = mesh_.positions();
  const auto& faces = mesh_.faces();
  const auto& areas = mesh_.face_areas();
  const auto& corners = mesh_.corner_areas();

  h_ = extended_mean_curvature(mesh_).values();
  const auto& mixed = mesh_.mixed_areas();
  for (int v = 0; v < nv; ++v) field_energy_ += h_[v].squaredNorm() * mixed[v];

  normals_.assign(nv, Vec3::Zero());
  corner_weight_.resize(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& t = faces[f];
    const Vec3 n = (x[t[1]] - x[t[0]]).cross(x[t[2]] - x[t[0]]);
    for (int k = 0; k < 3; ++k) {
      normals_[t[k]] += n;
      corner_weight_[f][k] = corners[f][k] / (areas[f] / 3.0);
    }
  }
  for (auto& n : normals_) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }

  if (mesh_.has_boundary()) {
    const BoundaryData bd = conormal_field(mesh_);
    for (const auto& loop : mesh_.loops()) {
      const std::size_t n = loop.size();
      for (std::size_t k = 0; k < n; ++k) {
        const int a = loop.vertices[k];
        const int b = loop.vertices[(k + 1) % n];
        seg_a_.push_back(x[a]);
        seg_b_.push_back(x[b]);
        co_a_.push_back(bd.conormals[bd.slot_of_vertex[a]]);
        co_b_.push_back(bd.conormals[bd.slot_of_vertex[b]]);
      }
    }
  }
}

MonotoneEvaluator::PointFields MonotoneEvaluator::fields_at(int face, const Vec3& bary) const {
  const Face& t = mesh_.faces()[face];
  PointFields out{Vec3::Zero(), 0.0, Vec3::Zero()};
  for (int k = 0; k < 3; ++k) {
    out.h += bary[k] * h_[t[k]];
    out.energy += bary[k] * corner_weight_[face][k] * h_[t[k]].squaredNorm();
    out.normal += bary[k] * normals_[t[k]];
  }
  const double len = out.normal.norm();
  if (len > 0.0) out.normal /= len;
  return out;
}

Vec3 MonotoneEvaluator::conormal_at(int seg, double t) const {
  Vec3 co = (1.0 - t) * co_a_[seg] + t * co_b_[seg];
  const double len = co.norm();
  return len > 0.0 ? Vec3(co / len) : co;
}

void MonotoneEvaluator::check_off_boundary(const Vec3& p0) const {
  if (!mesh_.has_boundary()) return;
  if (distance_to_boundary(mesh_, p0) <= 1e-6 * mesh_.extent()) {
    throw Error(ErrorCode::BasePointOnBoundary, "base point lies on the boundary");
  }
}

double MonotoneEvaluator::ball_area(const Vec3& p0, double rho) const {
  require_positive_radius(rho);
  const auto& areas = mesh_.face_areas();
  double sum = 0.0;
  SurfaceVisitor visitor;
  visitor.whole = [&](int f) { sum += areas[f]; };
  visitor.fragment = [&](int, const Vec3&, const Vec3&, double a) { sum += a; };
  integrate_surface(mesh_, Shell{p0, 0.0, rho}, ClipSettings{options_.clip_fraction * rho, 0.0},
                    visitor);
  return sum;
}

double MonotoneEvaluator::boundary_remainder(const Vec3& p0, double rho) const {
  if (seg_a_.empty()) return 0.0;
  double sum = 0.0;
  const ClipSettings clip{options_.clip_fraction * rho, options_.singular_ratio};
  integrate_segments(seg_a_, seg_b_, Shell{p0, 0.0, rho}, clip, [&](int s, double t, double w) {
    const Vec3 d = seg_a_[s] + t * (seg_b_[s] - seg_a_[s]) - p0;
    const double r2 = d.squaredNorm();
    sum += w * (1.0 / r2 - 1.0 / (rho * rho)) * d.dot(conormal_at(s, t));
  });
  return 0.5 * sum;
}

MonotoneSample MonotoneEvaluator::quantity(const Vec3& p0, double rho) const {
  require_positive_radius(rho);
  check_off_boundary(p0);
  const auto& faces = mesh_.faces();
  const auto& x = mesh_.positions();
  const auto& areas = mesh_.face_areas();
  const auto& corners = mesh_.corner_areas();

  double area = 0.0, energy = 0.0, curv = 0.0;
  SurfaceVisitor visitor;
  visitor.whole = [&](int f) {
    const Face& t = faces[f];
    area += areas[f];
    for (int k = 0; k < 3; ++k) energy += corners[f][k] * h_[t[k]].squaredNorm();
    // <H, p - p0> is quadratic on the face: edge midpoints integrate it exactly.
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      curv += areas[f] / 3.0 * (0.5 * (h_[a] + h_[b])).dot(0.5 * (x[a] + x[b]) - p0);
    }
  };
  visitor.fragment = [&](int f, const Vec3& bary, const Vec3& p, double a) {
    const PointFields q = fields_at(f, bary);
    area += a;
    energy += a * q.energy;
    curv += a * q.h.dot(p - p0);
  };
  integrate_surface(mesh_, Shell{p0, 0.0, rho}, ClipSettings{options_.clip_fraction * rho, 0.0},
                    visitor);

  MonotoneSample s;
  s.rho = rho;
  s.area_ratio = area / (rho * rho);
  s.energy_term = 0.25 * energy;
  s.curvature_remainder = curv / (rho * rho);
  s.boundary_remainder = boundary_remainder(p0, rho);
  s.total = s.area_ratio + s.energy_term + s.curvature_remainder + s.boundary_remainder;
  return s;
}

MonotoneProfile MonotoneEvaluator::profile(const Vec3& p0, const std::vector<double>& radii) const {
  for (std::size_t k = 0; k < radii.size(); ++k) {
    require_positive_radius(radii[k]);
    if (k > 0 && !(radii[k] > radii[k - 1])) {
      throw Error(ErrorCode::InvalidInput, "radii must be strictly increasing");
    }
  }
  MonotoneProfile out;
  out.p0 = p0;
  double max_abs = 0.0;
  for (double r : radii) {
    out.samples.push_back(quantity(p0, r));
    max_abs = std::max(max_abs, std::abs(out.samples.back().total));
  }
  out.tolerance = options_.tau_rel * max_abs;
  for (std::size_t k = 0; k + 1 < out.samples.size(); ++k) {
    if (out.samples[k + 1].total < out.samples[k].total - out.tolerance) {
      out.violations.emplace_back(static_cast<int>(k), static_cast<int>(k + 1));
    }
  }
  return out;
}

double MonotoneEvaluator::annulus_integral(const Vec3& p0, double sigma, double rho) const {
  if (!(sigma > 0.0)) require_positive_radius(sigma);
  const double reach = (p0 - mesh_.barycenter()).norm() + 2.0 * mesh_.extent();
  const double outer = std::min(rho, reach);
  if (!(outer > sigma)) return 0.0;
  double sum = 0.0;
  SurfaceVisitor visitor;
  visitor.fragment = [&](int f, const Vec3& bary, const Vec3& p, double a) {
    const PointFields q = fields_at(f, bary);
    const Vec3 d = p - p0;
    const double r2 = d.squaredNorm();
    const double dn = d.dot(q.normal);
    sum += a * (0.25 * q.energy + q.h.dot(d) / r2 + dn * dn / (r2 * r2));
  };
  // Clip size is tied to the inner radius; the outer sphere is normally
  // beyond the mesh.
  integrate_surface(mesh_, Shell{p0, sigma, outer},
                    ClipSettings{options_.clip_fraction * sigma, options_.singular_ratio}, visitor);
  return sum;
}

double MonotoneEvaluator::boundary_flux(const Vec3& p0) const {
  if (seg_a_.empty()) return 0.0;
  check_off_boundary(p0);
  const double reach = (p0 - mesh_.barycenter()).norm() + 2.0 * mesh_.extent();
  double sum = 0.0;
  const ClipSettings clip{0.0, options_.singular_ratio};
  integrate_segments(seg_a_, seg_b_, Shell{p0, 0.0, reach}, clip, [&](int s, double t, double w) {
    const Vec3 d = seg_a_[s] + t * (seg_b_[s] - seg_a_[s]) - p0;
    sum += w * d.dot(conormal_at(s, t)) / d.squaredNorm();
  });
  return sum;
}

double MonotoneEvaluator::density(const Vec3& p0, double delta) const {
  require_positive_radius(delta);
  auto ratio = [&](double s) { return ball_area(p0, s) / (kPi * s * s); };
  // Lagrange weights at 0 for nodes delta, 2 delta, 4 delta.
  return 8.0 / 3.0 * ratio(delta) - 2.0 * ratio(2.0 * delta) + 1.0 / 3.0 * ratio(4.0 * delta);
}

double ball_area(const TriMesh& mesh, const Vec3& p0, double rho) {
  require_positive_radius(rho);
  return MonotoneEvaluator(mesh).ball_area(p0, rho);
}

MonotoneSample monotone_quantity(const TriMesh& mesh, const Vec3& p0, double rho) {
  require_positive_radius(rho);
  return MonotoneEvaluator(mesh).quantity(p0, rho);
}

MonotoneProfile monotone_profile(const TriMesh& mesh, const Vec3& p0,
                                 const std::vector<double>& radii, const MonotoneOptions& options) {
  return MonotoneEvaluator(mesh, options).profile(p0, radii);
}

Vec3 snap_to_vertex(const TriMesh& mesh, const Vec3& p) {
  return mesh.position(nearest_vertex(mesh, p));
}

double local_edge_length(const TriMesh& mesh, const Vec3& p) {
  const int v = nearest_vertex(mesh, p);
  double sum = 0.0;
  int count = 0;
  for (int w : mesh.vertex_neighbors(v)) {
    sum += (mesh.position(w) - mesh.position(v)).norm();
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

BoundaryIdentityTerms boundary_identity_terms(const TriMesh& mesh, const Vec3& p0) {
  if (distance_to_mesh(mesh, p0) > 1e-6 * mesh.extent()) {
    throw Error(ErrorCode::BasePointOffSurface, "base point is not on the mesh");
  }
  MonotoneEvaluator eval(mesh);
  eval.check_off_boundary(p0);
  BoundaryIdentityTerms out;
  out.delta = 2.0 * local_edge_length(mesh, p0);
  out.density = eval.density(p0, out.delta);
  out.annulus = eval.annulus_integral(p0, out.delta, std::numeric_limits<double>::infinity());
  out.energy = eval.field_energy();
  out.flux = eval.boundary_flux(p0);
  out.lhs = 4.0 * kPi * out.density + 4.0 * out.annulus;
  out.rhs = out.energy + 2.0 * out.flux;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

double boundary_identity_residual(const TriMesh& mesh, const Vec3& p0) {
  return boundary_identity_terms(mesh, p0).residual;
}

LowerBoundTerms lower_bound_terms(const TriMesh& mesh) {
  if (!mesh.has_boundary()) throw Error(ErrorCode::NoBoundary, "mesh is closed");
  if (count_components(mesh) != 1) throw Error(ErrorCode::Disconnected, "mesh is not connected");
  LowerBoundTerms out;
  out.willmore = willmore_energy(mesh);
  for (const auto& loop : mesh.loops()) out.boundary_length += loop_length(mesh, loop);

  const auto& x = mesh.positions();
  std::vector<Vec3> samples(x.begin(), x.end());
  for (const auto& e : mesh.edges()) samples.push_back(0.5 * (x[e[0]] + x[e[1]]));
  for (const auto& t : mesh.faces()) samples.push_back((x[t[0]] + x[t[1]] + x[t[2]]) / 3.0);
  for (const auto& p : samples) out.distance = std::max(out.distance, distance_to_boundary(mesh, p));

  out.gap = out.willmore + 2.0 * out.boundary_length / out.distance - 4.0 * kPi;
  return out;
}

double lower_bound_gap(const TriMesh& mesh) { return lower_bound_terms(mesh).gap; }

}  // namespace wbl
