#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wbl/error.hpp"

namespace wbl {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

/// Closed cycle of boundary edges, in the traversal order induced by the
/// face orientation (vertices[k] -> vertices[k+1] is a boundary half-edge).
struct BoundaryLoop {
  std::vector<int> vertices;

  std::size_t size() const { return vertices.size(); }
};

struct BuildOptions {
  // Faces with area below area_tolerance * diam^2 are rejected.
  double area_tolerance = 1e-12;
};

/// Connectivity shared between meshes that only differ in vertex positions.
struct Topology {
  std::vector<Face> faces;
  std::vector<std::array<int, 2>> edges;  // undirected, lower index first
  std::vector<int> edge_face_count;       // 1 on the boundary, 2 inside
  std::vector<char> boundary_vertex;
  std::vector<BoundaryLoop> loops;
  // CSR adjacency: faces incident to a vertex, and one-ring neighbours.
  std::vector<int> vf_offset, vf_index;
  std::vector<int> vv_offset, vv_index;

  int num_vertices() const { return static_cast<int>(boundary_vertex.size()); }
};

/// Oriented triangle mesh with boundary. Immutable once built; geometric
/// caches (face areas, mixed areas) are filled at construction.
class TriMesh {
 public:
  TriMesh() = default;

  static TriMesh build(std::vector<Vec3> positions, std::vector<Face> faces,
                       const BuildOptions& options = {});

  /// Same connectivity, new positions. Re-runs the degenerate-face check.
  TriMesh with_positions(std::vector<Vec3> positions) const;

  int num_vertices() const { return static_cast<int>(positions_.size()); }
  int num_faces() const { return static_cast<int>(topology_->faces.size()); }
  int num_edges() const { return static_cast<int>(topology_->edges.size()); }
  int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }

  const std::vector<Vec3>& positions() const { return positions_; }
  const Vec3& position(int v) const { return positions_[v]; }
  const std::vector<Face>& faces() const { return topology_->faces; }
  const std::vector<std::array<int, 2>>& edges() const { return topology_->edges; }
  const std::vector<int>& edge_face_count() const { return topology_->edge_face_count; }
  const std::vector<BoundaryLoop>& loops() const { return topology_->loops; }
  const Topology& topology() const { return *topology_; }
  std::shared_ptr<const Topology> shared_topology() const { return topology_; }

  bool is_boundary_vertex(int v) const { return topology_->boundary_vertex[v] != 0; }
  bool has_boundary() const { return !topology_->loops.empty(); }

  std::span<const int> vertex_faces(int v) const;
  std::span<const int> vertex_neighbors(int v) const;

  const std::vector<double>& face_areas() const { return face_area_; }
  /// Voronoi area per vertex with the obtuse-triangle fallback.
  const std::vector<double>& mixed_areas() const { return mixed_area_; }
  /// Contribution of each face corner to its vertex's mixed area.
  const std::vector<std::array<double, 3>>& corner_areas() const { return corner_area_; }

  double total_area() const;
  /// Bounding-box diagonal; an upper bound on the true diameter, used for
  /// scale-relative tolerances.
  double extent() const { return extent_; }
  double area_epsilon() const { return area_epsilon_; }
  Vec3 face_normal(int f) const;  // unit
  Vec3 barycenter() const;

 private:
  TriMesh(std::shared_ptr<const Topology> topology, std::vector<Vec3> positions,
          const BuildOptions& options);
  void compute_geometry();

  std::shared_ptr<const Topology> topology_;
  std::vector<Vec3> positions_;
  BuildOptions options_;
  double extent_ = 0.0;
  double area_epsilon_ = 0.0;
  std::vector<double> face_area_;
  std::vector<double> mixed_area_;
  std::vector<std::array<double, 3>> corner_area_;
};

TriMesh build_mesh(std::vector<Vec3> positions, std::vector<Face> faces,
                   const BuildOptions& options = {});

std::vector<BoundaryLoop> boundary_loops(const TriMesh& mesh);

/// Polygonal length of a boundary loop.
double loop_length(const TriMesh& mesh, const BoundaryLoop& loop);

/// One value per vertex, plus a per-vertex boundary flag for quantities that
/// are only defined at interior vertices.
class VertexField {
 public:
  VertexField() = default;
  explicit VertexField(std::size_t n, const Vec3& fill = Vec3::Zero())
      : values_(n, fill), boundary_(n, 0) {}
  explicit VertexField(std::vector<Vec3> values)
      : values_(std::move(values)), boundary_(values_.size(), 0) {}

  std::size_t size() const { return values_.size(); }
  Vec3& operator[](std::size_t i) { return values_[i]; }
  const Vec3& operator[](std::size_t i) const { return values_[i]; }
  const std::vector<Vec3>& values() const { return values_; }
  std::vector<Vec3>& values() { return values_; }

  bool on_boundary(std::size_t i) const { return boundary_[i] != 0; }
  void set_boundary(std::size_t i, bool b) { boundary_[i] = b ? 1 : 0; }

  double max_norm() const;

 private:
  std::vector<Vec3> values_;
  std::vector<char> boundary_;
};

/// Per-boundary-vertex conormal and dual arc length, stored loop by loop.
struct BoundaryData {
  std::vector<int> vertices;        // concatenated loops
  std::vector<int> loop_offsets;    // loop k spans [loop_offsets[k], loop_offsets[k+1])
  std::vector<Vec3> conormals;      // unit, tangent to the surface, outward
  std::vector<Vec3> tangents;       // unit, along the loop direction
  std::vector<double> dual_lengths; // half the sum of adjacent edge lengths
  std::vector<int> slot_of_vertex;  // vertex -> index into the arrays above, or -1

  std::size_t size() const { return vertices.size(); }
  std::size_t num_loops() const { return loop_offsets.empty() ? 0 : loop_offsets.size() - 1; }
  double total_length() const;
};

/// Disjoint union of two meshes.
TriMesh merge(const TriMesh& a, const TriMesh& b);

/// x -> scale * R x + t applied to every vertex.
TriMesh transformed(const TriMesh& mesh, const Eigen::Matrix3d& rotation, const Vec3& translation,
                    double scale = 1.0);

/// Index of the vertex nearest to p.
int nearest_vertex(const TriMesh& mesh, const Vec3& p);

/// Euclidean distance from p to the closest point of the triangle (a, b, c).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

/// Distance from p to the mesh surface (brute force over faces).
double distance_to_mesh(const TriMesh& mesh, const Vec3& p);

/// Number of connected components of the vertex-edge graph.
int count_components(const TriMesh& mesh);

}  // namespace wbl
