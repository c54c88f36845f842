#include "wbl/curvature.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace wbl {

namespace {

constexpr double kPi = std::numbers::pi;

double corner_angle(const Vec3& at, const Vec3& p, const Vec3& q) {
  const Vec3 u = p - at, v = q - at;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

}  // namespace

std::vector<Vec3> cotan_laplacian(const TriMesh& mesh) {
  std::vector<Vec3> lap(mesh.num_vertices(), Vec3::Zero());
  const auto& pos = mesh.positions();
  const auto& faces = mesh.faces();
  const auto& area = mesh.face_areas();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = faces[f];
    for (int k = 0; k < 3; ++k) {
      const int i = t[k], j = t[(k + 1) % 3], o = t[(k + 2) % 3];
      // Half-cotangent of the angle opposite the edge (i, j).
      const double w = 0.5 * (pos[i] - pos[o]).dot(pos[j] - pos[o]) / (2.0 * area[f]);
      const Vec3 d = w * (pos[j] - pos[i]);
      lap[i] += d;
      lap[j] -= d;
    }
  }
  return lap;
}

VertexField mean_curvature_vectors(const TriMesh& mesh) {
  const auto lap = cotan_laplacian(mesh);
  const auto& mixed = mesh.mixed_areas();
  VertexField h(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.is_boundary_vertex(v)) {
      h.set_boundary(v, true);
      continue;
    }
    if (mixed[v] < mesh.area_epsilon() || !(mixed[v] > 0.0)) {
      throw Error(ErrorCode::ZeroMixedArea, "vertex " + std::to_string(v));
    }
    h[v] = lap[v] / (2.0 * mixed[v]);
  }
  return h;
}

double willmore_energy(const TriMesh& mesh) {
  const auto h = mean_curvature_vectors(mesh);
  const auto& mixed = mesh.mixed_areas();
  double w = 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!h.on_boundary(v)) w += h[v].squaredNorm() * mixed[v];
  }
  return w;
}

VertexField extended_mean_curvature(const TriMesh& mesh) {
  VertexField h = mean_curvature_vectors(mesh);
  VertexField out = h;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!h.on_boundary(v)) continue;
    Vec3 sum = Vec3::Zero();
    int count = 0;
    for (int w : mesh.vertex_neighbors(v)) {
      if (!h.on_boundary(w)) {
        sum += h[w];
        ++count;
      }
    }
    out[v] = count > 0 ? Vec3(sum / count) : Vec3::Zero();
  }
  return out;
}

BoundaryData conormal_field(const TriMesh& mesh) {
  if (!mesh.has_boundary()) throw Error(ErrorCode::NoBoundary, "mesh is closed");
  const auto& pos = mesh.positions();
  const auto& faces = mesh.faces();
  const auto lap = cotan_laplacian(mesh);
  const auto h = extended_mean_curvature(mesh);
  const auto& mixed = mesh.mixed_areas();
  BoundaryData data;
  data.slot_of_vertex.assign(mesh.num_vertices(), -1);
  data.loop_offsets.push_back(0);
  for (const auto& loop : mesh.loops()) {
    const std::size_t n = loop.size();
    for (std::size_t k = 0; k < n; ++k) {
      const int v = loop.vertices[k];
      const int prev = loop.vertices[(k + n - 1) % n];
      const int next = loop.vertices[(k + 1) % n];
      const Vec3 t = (pos[next] - pos[prev]).normalized();
      // Area gradient at a boundary vertex is -co * l + 2 H A; remove the
      // curvature part with the one-ring H and keep the component normal to t.
      Vec3 co = -lap[v] + 2.0 * h[v] * mixed[v];
      co -= co.dot(t) * t;
      if (co.norm() <= 1e-14 * mesh.extent()) {
        Vec3 normal = Vec3::Zero();
        for (int f : mesh.vertex_faces(v)) {
          const Face& tri = faces[f];
          normal += (pos[tri[1]] - pos[tri[0]]).cross(pos[tri[2]] - pos[tri[0]]);
        }
        co = t.cross(normal);
      }
      data.slot_of_vertex[v] = static_cast<int>(data.vertices.size());
      data.vertices.push_back(v);
      data.tangents.push_back(t);
      data.conormals.push_back(co.normalized());
      data.dual_lengths.push_back(0.5 * ((pos[v] - pos[prev]).norm() + (pos[next] - pos[v]).norm()));
    }
    data.loop_offsets.push_back(static_cast<int>(data.vertices.size()));
  }
  return data;
}

std::vector<double> angle_defects(const TriMesh& mesh) {
  std::vector<double> sum(mesh.num_vertices(), 0.0);
  const auto& pos = mesh.positions();
  for (const Face& t : mesh.faces()) {
    for (int k = 0; k < 3; ++k) {
      sum[t[k]] += corner_angle(pos[t[k]], pos[t[(k + 1) % 3]], pos[t[(k + 2) % 3]]);
    }
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    sum[v] = (mesh.is_boundary_vertex(v) ? kPi : 2.0 * kPi) - sum[v];
  }
  return sum;
}

double gauss_bonnet_residual(const TriMesh& mesh) {
  double total = 0.0;
  for (double d : angle_defects(mesh)) total += d;
  return std::abs(total - 2.0 * kPi * mesh.euler_characteristic());
}

double second_form_norm_sq(const TriMesh& mesh) {
  const double w = willmore_energy(mesh);
  const auto defects = angle_defects(mesh);
  double gauss = 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.is_boundary_vertex(v)) gauss += defects[v];
  }
  return 4.0 * w - 2.0 * gauss;
}

double first_variation_residual(const TriMesh& mesh, const VertexField& field) {
  if (field.size() != static_cast<std::size_t>(mesh.num_vertices())) {
    throw Error(ErrorCode::FieldLengthMismatch,
                "field has " + std::to_string(field.size()) + " values for " +
                    std::to_string(mesh.num_vertices()) + " vertices");
  }
  const auto& pos = mesh.positions();
  double divergence = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.faces()[f];
    const Vec3 n = mesh.face_normal(f);
    // area * div X = sum_k <area * grad(lambda_k), X_k>, area * grad(lambda_k) = n x (p_{k+2} - p_{k+1}) / 2
    for (int k = 0; k < 3; ++k) {
      const Vec3 g = 0.5 * n.cross(pos[t[(k + 2) % 3]] - pos[t[(k + 1) % 3]]);
      divergence += g.dot(field[t[k]]);
    }
  }

  const auto h = mean_curvature_vectors(mesh);
  const auto& mixed = mesh.mixed_areas();
  double curvature = 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!h.on_boundary(v)) curvature += h[v].dot(field[v]) * mixed[v];
  }

  double boundary = 0.0;
  if (mesh.has_boundary()) {
    const auto bd = conormal_field(mesh);
    for (std::size_t s = 0; s < bd.size(); ++s) {
      boundary += field[bd.vertices[s]].dot(bd.conormals[s]) * bd.dual_lengths[s];
    }
  }
  return std::abs(divergence + 2.0 * curvature - boundary);
}

}  // namespace wbl
