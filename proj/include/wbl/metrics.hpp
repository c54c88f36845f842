#pragma once

#include <string>
#include <vector>

#include "wbl/mesh.hpp"

namespace wbl {

enum class SampleSource { MeshDense, MeshVertices, Boundary, Points };

/// Finite point set standing in for a continuous one. `spacing` bounds the
/// distance from any point of the underlying set to the sample.
struct PointSample {
  std::vector<Vec3> points;
  SampleSource source = SampleSource::Points;
  double spacing = 0.0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Vertices, edge midpoints and face barycentres; spacing = max circumradius.
PointSample sample_mesh(const TriMesh& mesh);
/// Boundary vertices plus `per_edge - 1` interior points per boundary edge.
PointSample sample_boundary(const TriMesh& mesh, int per_edge = 2);
PointSample sample_points(std::vector<Vec3> points, double spacing = 0.0);

/// sup_{a in A} min_{b in B} |a - b|.
double directed_hausdorff(const PointSample& a, const PointSample& b);
/// max of both directed distances; exact on the finite samples. Throws EmptySample.
double hausdorff_distance(const PointSample& a, const PointSample& b);

struct ComponentLabels {
  int count = 0;
  // Mesh vertices first, then the points of each curve in order.
  std::vector<int> labels;
};

/// Components of the graph on mesh vertices and curve points, with mesh
/// edges, consecutive curve points, and every pair closer than glue_tol as
/// links. Throws InvalidInput when glue_tol <= 0.
ComponentLabels connected_components(const TriMesh& mesh, const std::vector<PointSample>& curves,
                                     double glue_tol);

/// 2 x longest boundary edge, or 2 x longest edge on closed meshes.
double default_glue_tolerance(const TriMesh& mesh);

enum class FitKind { Sphere, Plane };

struct ShapeFit {
  FitKind kind = FitKind::Sphere;
  Vec3 center = Vec3::Zero();  // sphere
  double radius = 0.0;
  Vec3 normal = Vec3::UnitZ();  // plane: <normal, x> = offset
  double offset = 0.0;
  double rms = 0.0;
  double max_residual = 0.0;
};

/// Algebraic least squares followed by five Gauss-Newton steps on the
/// geometric residuals |x - c| - r. Throws DegenerateSample for fewer than
/// four points or (nearly) coplanar data.
ShapeFit sphere_fit(const std::vector<Vec3>& points);
/// Centroid and smallest principal direction. Throws DegenerateSample for
/// fewer than three points or (nearly) collinear data.
ShapeFit plane_fit(const std::vector<Vec3>& points);

/// Largest vertex-to-vertex distance.
double mesh_diameter(const TriMesh& mesh);

enum class RescaleMode { ByDiameter, ByHeight };

struct RescaleReport {
  RescaleMode mode = RescaleMode::ByDiameter;
  double diameter = 0.0;           // before rescaling
  double scale = 1.0;              // factor applied
  double willmore_excess = 0.0;    // W - 4 pi
  double boundary_per_diameter = 0.0;
  ShapeFit fit;                    // of the rescaled vertices
  double fitted_diameter = 0.0;    // 2 r of the fit (sphere mode)
  TriMesh rescaled;                // centred at the vertex centroid
  std::string note;
};

/// ByDiameter scales to unit diameter and fits a sphere; ByHeight scales by
/// 1/h and fits a plane. Throws InvalidInput for h <= 0 in ByHeight mode.
RescaleReport rescale_diagnostics(const TriMesh& mesh, RescaleMode mode, double h = 0.0);

}  // namespace wbl
