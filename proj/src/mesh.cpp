#include "wbl/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

namespace wbl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorCode::NonManifoldVertex: return "NonManifoldVertex";
    case ErrorCode::InconsistentOrientation: return "InconsistentOrientation";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::ZeroMixedArea: return "ZeroMixedArea";
    case ErrorCode::NoBoundary: return "NoBoundary";
    case ErrorCode::FieldLengthMismatch: return "FieldLengthMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NoCatenoid: return "NoCatenoid";
    case ErrorCode::NonpositiveRadius: return "NonpositiveRadius";
    case ErrorCode::BasePointOnBoundary: return "BasePointOnBoundary";
    case ErrorCode::BasePointOffSurface: return "BasePointOffSurface";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::BoundaryMismatch: return "BoundaryMismatch";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigParse:
    case ErrorCode::InvalidConfig:
      return 2;
    case ErrorCode::Io:
      return 4;
    default:
      return 3;
  }
}

namespace {

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

void build_csr(int n, const std::vector<std::vector<int>>& lists, std::vector<int>& offset,
               std::vector<int>& index) {
  offset.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) offset[v + 1] = offset[v] + static_cast<int>(lists[v].size());
  index.clear();
  index.reserve(offset[n]);
  for (const auto& l : lists) index.insert(index.end(), l.begin(), l.end());
}

std::shared_ptr<const Topology> build_topology(int num_vertices, std::vector<Face> faces) {
  auto topo = std::make_shared<Topology>();
  const int nf = static_cast<int>(faces.size());

  for (int f = 0; f < nf; ++f) {
    const Face& t = faces[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= num_vertices) {
        throw Error(ErrorCode::InvalidInput,
                    "face " + std::to_string(f) + " references vertex " + std::to_string(t[k]) +
                        " out of range");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw Error(ErrorCode::DegenerateFace,
                  "face " + std::to_string(f) + " repeats a vertex index");
    }
  }

  std::unordered_map<std::uint64_t, int> directed;
  std::unordered_map<std::uint64_t, int> undirected;
  directed.reserve(3 * faces.size());
  undirected.reserve(3 * faces.size());
  for (int f = 0; f < nf; ++f) {
    const Face& t = faces[f];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      const auto key = edge_key(std::min(a, b), std::max(a, b));
      auto [it, inserted] = undirected.try_emplace(key, 0);
      if (inserted) {
        topo->edges.push_back({std::min(a, b), std::max(a, b)});
        topo->edge_face_count.push_back(0);
        it->second = static_cast<int>(topo->edges.size()) - 1;
      }
      if (++topo->edge_face_count[it->second] > 2) {
        throw Error(ErrorCode::NonManifoldEdge, "edge (" + std::to_string(a) + ", " +
                                                    std::to_string(b) +
                                                    ") has more than two incident faces");
      }
      if (!directed.try_emplace(edge_key(a, b), f).second) {
        throw Error(ErrorCode::InconsistentOrientation,
                    "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                        ") is traversed in the same direction by two faces");
      }
    }
  }

  topo->boundary_vertex.assign(num_vertices, 0);
  std::vector<int> next_on_boundary(num_vertices, -1);
  for (int f = 0; f < nf; ++f) {
    const Face& t = faces[f];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      if (directed.count(edge_key(b, a)) == 0) {
        if (next_on_boundary[a] != -1) {
          throw Error(ErrorCode::NonManifoldVertex,
                      "vertex " + std::to_string(a) + " starts two boundary edges");
        }
        next_on_boundary[a] = b;
        topo->boundary_vertex[a] = 1;
        topo->boundary_vertex[b] = 1;
      }
    }
  }

  std::vector<char> visited(num_vertices, 0);
  for (int start = 0; start < num_vertices; ++start) {
    if (next_on_boundary[start] == -1 || visited[start]) continue;
    BoundaryLoop loop;
    int v = start;
    while (!visited[v]) {
      visited[v] = 1;
      loop.vertices.push_back(v);
      v = next_on_boundary[v];
      if (v == -1) throw Error(ErrorCode::NonManifoldVertex, "open boundary chain");
    }
    if (v != start) throw Error(ErrorCode::NonManifoldVertex, "boundary loop is not simple");
    topo->loops.push_back(std::move(loop));
  }

  std::vector<std::vector<int>> vf(num_vertices), vv(num_vertices);
  for (int f = 0; f < nf; ++f)
    for (int v : faces[f]) vf[v].push_back(f);
  for (const auto& e : topo->edges) {
    vv[e[0]].push_back(e[1]);
    vv[e[1]].push_back(e[0]);
  }
  build_csr(num_vertices, vf, topo->vf_offset, topo->vf_index);
  build_csr(num_vertices, vv, topo->vv_offset, topo->vv_index);
  topo->faces = std::move(faces);
  return topo;
}

}  // namespace

TriMesh::TriMesh(std::shared_ptr<const Topology> topology, std::vector<Vec3> positions,
                 const BuildOptions& options)
    : topology_(std::move(topology)), positions_(std::move(positions)), options_(options) {
  compute_geometry();
}

TriMesh TriMesh::build(std::vector<Vec3> positions, std::vector<Face> faces,
                       const BuildOptions& options) {
  const int n = static_cast<int>(positions.size());
  if (faces.empty()) throw Error(ErrorCode::InvalidInput, "mesh has no faces");
  for (const auto& p : positions) {
    if (!p.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite vertex position");
  }
  auto topo = build_topology(n, std::move(faces));
  return TriMesh(std::move(topo), std::move(positions), options);
}

TriMesh TriMesh::with_positions(std::vector<Vec3> positions) const {
  if (positions.size() != positions_.size()) {
    throw Error(ErrorCode::FieldLengthMismatch, "position count differs from the mesh");
  }
  return TriMesh(topology_, std::move(positions), options_);
}

void TriMesh::compute_geometry() {
  const int nv = num_vertices();
  const int nf = num_faces();
  if (nv > 0) {
    Vec3 lo = positions_[0], hi = positions_[0];
    for (const auto& p : positions_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    extent_ = (hi - lo).norm();
  }
  area_epsilon_ = options_.area_tolerance * extent_ * extent_;

  face_area_.resize(nf);
  corner_area_.resize(nf);
  mixed_area_.assign(nv, 0.0);
  const auto& faces = topology_->faces;
  for (int f = 0; f < nf; ++f) {
    const Vec3& a = positions_[faces[f][0]];
    const Vec3& b = positions_[faces[f][1]];
    const Vec3& c = positions_[faces[f][2]];
    const double area = 0.5 * (b - a).cross(c - a).norm();
    if (!(area > area_epsilon_) || !(area > 0.0)) {
      throw Error(ErrorCode::DegenerateFace,
                  "face " + std::to_string(f) + " has area " + std::to_string(area));
    }
    face_area_[f] = area;

    const std::array<Vec3, 3> p{a, b, c};
    std::array<double, 3> dots{};
    for (int k = 0; k < 3; ++k) {
      dots[k] = (p[(k + 1) % 3] - p[k]).dot(p[(k + 2) % 3] - p[k]);
    }
    auto& ca = corner_area_[f];
    const int obtuse = dots[0] < 0 ? 0 : dots[1] < 0 ? 1 : dots[2] < 0 ? 2 : -1;
    if (obtuse >= 0) {
      for (int k = 0; k < 3; ++k) ca[k] = (k == obtuse ? 0.5 : 0.25) * area;
    } else {
      for (int k = 0; k < 3; ++k) {
        const int j = (k + 1) % 3, l = (k + 2) % 3;
        // cot at corner j weights the edge k-l, cot at l weights the edge k-j.
        const double cot_j = dots[j] / (2.0 * area);
        const double cot_l = dots[l] / (2.0 * area);
        ca[k] = ((p[l] - p[k]).squaredNorm() * cot_j + (p[j] - p[k]).squaredNorm() * cot_l) / 8.0;
      }
    }
    for (int k = 0; k < 3; ++k) mixed_area_[faces[f][k]] += ca[k];
  }
}

std::span<const int> TriMesh::vertex_faces(int v) const {
  const auto& t = *topology_;
  return {t.vf_index.data() + t.vf_offset[v],
          static_cast<std::size_t>(t.vf_offset[v + 1] - t.vf_offset[v])};
}

std::span<const int> TriMesh::vertex_neighbors(int v) const {
  const auto& t = *topology_;
  return {t.vv_index.data() + t.vv_offset[v],
          static_cast<std::size_t>(t.vv_offset[v + 1] - t.vv_offset[v])};
}

double TriMesh::total_area() const {
  double sum = 0.0;
  for (double a : face_area_) sum += a;
  return sum;
}

Vec3 TriMesh::face_normal(int f) const {
  const Face& t = faces()[f];
  return (positions_[t[1]] - positions_[t[0]]).cross(positions_[t[2]] - positions_[t[0]]).normalized();
}

Vec3 TriMesh::barycenter() const {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : positions_) sum += p;
  return positions_.empty() ? sum : Vec3(sum / static_cast<double>(positions_.size()));
}

TriMesh build_mesh(std::vector<Vec3> positions, std::vector<Face> faces,
                   const BuildOptions& options) {
  return TriMesh::build(std::move(positions), std::move(faces), options);
}

std::vector<BoundaryLoop> boundary_loops(const TriMesh& mesh) { return mesh.loops(); }

double loop_length(const TriMesh& mesh, const BoundaryLoop& loop) {
  double len = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t k = 0; k < n; ++k) {
    len += (mesh.position(loop.vertices[(k + 1) % n]) - mesh.position(loop.vertices[k])).norm();
  }
  return len;
}

double VertexField::max_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, v.norm());
  return m;
}

double BoundaryData::total_length() const {
  return std::accumulate(dual_lengths.begin(), dual_lengths.end(), 0.0);
}

TriMesh merge(const TriMesh& a, const TriMesh& b) {
  std::vector<Vec3> pos = a.positions();
  pos.insert(pos.end(), b.positions().begin(), b.positions().end());
  std::vector<Face> faces = a.faces();
  const int shift = a.num_vertices();
  for (Face f : b.faces()) {
    for (int& v : f) v += shift;
    faces.push_back(f);
  }
  return build_mesh(std::move(pos), std::move(faces));
}

TriMesh transformed(const TriMesh& mesh, const Eigen::Matrix3d& rotation, const Vec3& translation,
                    double scale) {
  std::vector<Vec3> pos;
  pos.reserve(mesh.num_vertices());
  for (const auto& p : mesh.positions()) pos.push_back(scale * (rotation * p) + translation);
  return build_mesh(std::move(pos), mesh.faces());
}

int nearest_vertex(const TriMesh& mesh, const Vec3& p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double d = (mesh.position(v) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const double n2 = n.squaredNorm();
  if (n2 > 0.0) {
    // Barycentric coordinates of the projection onto the plane.
    const Vec3 q = p - n * ((p - a).dot(n) / n2);
    const double u = (c - b).cross(q - b).dot(n) / n2;
    const double v = (a - c).cross(q - c).dot(n) / n2;
    const double w = 1.0 - u - v;
    if (u >= 0.0 && v >= 0.0 && w >= 0.0) return (q - p).norm();
  }
  return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c),
                   point_segment_distance(p, c, a)});
}

double distance_to_mesh(const TriMesh& mesh, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  const auto& pos = mesh.positions();
  for (const Face& f : mesh.faces()) {
    best = std::min(best, point_triangle_distance(p, pos[f[0]], pos[f[1]], pos[f[2]]));
  }
  return best;
}

int count_components(const TriMesh& mesh) {
  const int n = mesh.num_vertices();
  std::vector<int> label(n, -1);
  int count = 0;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (label[s] != -1) continue;
    label[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : mesh.vertex_neighbors(v)) {
        if (label[w] == -1) {
          label[w] = count;
          stack.push_back(w);
        }
      }
    }
    ++count;
  }
  return count;
}

}  // namespace wbl
