#include "wbl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "wbl/curvature.hpp"
#include "wbl/kdtree.hpp"

namespace wbl {

namespace {

double circumradius(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
  const double area2 = (b - a).cross(c - a).norm();
  return area2 > 0.0 ? la * lb * lc / (2.0 * area2) : std::max({la, lb, lc});
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

void residuals(ShapeFit& fit, const std::vector<Vec3>& pts) {
  double sum = 0.0, worst = 0.0;
  for (const auto& p : pts) {
    const double r = fit.kind == FitKind::Sphere ? (p - fit.center).norm() - fit.radius
                                                 : fit.normal.dot(p) - fit.offset;
    sum += r * r;
    worst = std::max(worst, std::abs(r));
  }
  fit.rms = std::sqrt(sum / pts.size());
  fit.max_residual = worst;
}

Eigen::Matrix3d covariance(const std::vector<Vec3>& pts, Vec3& centroid) {
  centroid = Vec3::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= static_cast<double>(pts.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pts) cov += (p - centroid) * (p - centroid).transpose();
  return cov / static_cast<double>(pts.size());
}

}  // namespace

PointSample sample_mesh(const TriMesh& mesh) {
  PointSample s;
  s.source = SampleSource::MeshDense;
  const auto& x = mesh.positions();
  s.points.reserve(x.size() + mesh.num_edges() + mesh.num_faces());
  s.points.insert(s.points.end(), x.begin(), x.end());
  for (const auto& e : mesh.edges()) s.points.push_back(0.5 * (x[e[0]] + x[e[1]]));
  for (const auto& f : mesh.faces()) {
    s.points.push_back((x[f[0]] + x[f[1]] + x[f[2]]) / 3.0);
    s.spacing = std::max(s.spacing, circumradius(x[f[0]], x[f[1]], x[f[2]]));
  }
  return s;
}

PointSample sample_boundary(const TriMesh& mesh, int per_edge) {
  if (per_edge < 1) throw Error(ErrorCode::InvalidInput, "per_edge must be >= 1");
  PointSample s;
  s.source = SampleSource::Boundary;
  for (const auto& loop : mesh.loops()) {
    const std::size_t n = loop.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Vec3& a = mesh.position(loop.vertices[k]);
      const Vec3& b = mesh.position(loop.vertices[(k + 1) % n]);
      for (int j = 0; j < per_edge; ++j) s.points.push_back(a + (b - a) * (double(j) / per_edge));
      s.spacing = std::max(s.spacing, 0.5 * (b - a).norm() / per_edge);
    }
  }
  return s;
}

PointSample sample_points(std::vector<Vec3> points, double spacing) {
  PointSample s;
  s.points = std::move(points);
  s.spacing = spacing;
  return s;
}

double directed_hausdorff(const PointSample& a, const PointSample& b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySample, "Hausdorff distance of an empty sample");
  const KdTree tree(b.points);
  double worst = 0.0;
  for (const auto& p : a.points) worst = std::max(worst, tree.nearest(p).second);
  return worst;
}

double hausdorff_distance(const PointSample& a, const PointSample& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

ComponentLabels connected_components(const TriMesh& mesh, const std::vector<PointSample>& curves,
                                     double glue_tol) {
  if (!(glue_tol > 0.0)) throw Error(ErrorCode::InvalidInput, "glue tolerance must be positive");
  std::vector<Vec3> nodes(mesh.positions().begin(), mesh.positions().end());
  std::vector<int> curve_start;
  for (const auto& c : curves) {
    curve_start.push_back(static_cast<int>(nodes.size()));
    nodes.insert(nodes.end(), c.points.begin(), c.points.end());
  }
  UnionFind uf(static_cast<int>(nodes.size()));
  for (const auto& e : mesh.edges()) uf.unite(e[0], e[1]);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    for (std::size_t k = 1; k < curves[c].size(); ++k) {
      uf.unite(curve_start[c] + static_cast<int>(k) - 1, curve_start[c] + static_cast<int>(k));
    }
  }
  const KdTree tree(nodes);
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    for (int j : tree.within(nodes[i], glue_tol)) uf.unite(i, j);
  }

  ComponentLabels out;
  out.labels.assign(nodes.size(), -1);
  std::vector<int> root_label(nodes.size(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int r = uf.find(static_cast<int>(i));
    if (root_label[r] < 0) root_label[r] = out.count++;
    out.labels[i] = root_label[r];
  }
  return out;
}

double default_glue_tolerance(const TriMesh& mesh) {
  double longest = 0.0;
  const auto& counts = mesh.edge_face_count();
  const bool boundary_only = mesh.has_boundary();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (boundary_only && counts[e] != 1) continue;
    const auto& ed = mesh.edges()[e];
    longest = std::max(longest, (mesh.position(ed[0]) - mesh.position(ed[1])).norm());
  }
  return 2.0 * longest;
}

ShapeFit sphere_fit(const std::vector<Vec3>& pts) {
  if (pts.size() < 4) throw Error(ErrorCode::DegenerateSample, "sphere fit needs at least 4 points");
  Vec3 centroid;
  const Eigen::Matrix3d cov = covariance(pts, centroid);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Vec3 ev = eig.eigenvalues();
  if (!(ev[0] > 1e-12 * ev[2])) throw Error(ErrorCode::DegenerateSample, "points are coplanar");

  // Work relative to the centroid for conditioning. |y|^2 = 2 c.y + k.
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 y = pts[i] - centroid;
    A.row(i) << 2.0 * y.x(), 2.0 * y.y(), 2.0 * y.z(), 1.0;
    rhs[i] = y.squaredNorm();
  }
  const Eigen::Vector4d sol = A.colPivHouseholderQr().solve(rhs);
  Vec3 c = sol.head<3>();
  double r = std::sqrt(std::max(sol[3] + c.squaredNorm(), 0.0));

  for (int it = 0; it < 5; ++it) {
    Eigen::MatrixXd J(n, 4);
    Eigen::VectorXd res(n);
    for (int i = 0; i < n; ++i) {
      const Vec3 d = pts[i] - centroid - c;
      const double len = d.norm();
      const Vec3 u = len > 0.0 ? Vec3(d / len) : Vec3::Zero();
      J.row(i) << -u.x(), -u.y(), -u.z(), -1.0;
      res[i] = len - r;
    }
    const Eigen::Vector4d step = J.colPivHouseholderQr().solve(-res);
    c += step.head<3>();
    r += step[3];
  }

  ShapeFit fit;
  fit.kind = FitKind::Sphere;
  fit.center = centroid + c;
  fit.radius = std::abs(r);
  residuals(fit, pts);
  return fit;
}

ShapeFit plane_fit(const std::vector<Vec3>& pts) {
  if (pts.size() < 3) throw Error(ErrorCode::DegenerateSample, "plane fit needs at least 3 points");
  Vec3 centroid;
  const Eigen::Matrix3d cov = covariance(pts, centroid);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Vec3 ev = eig.eigenvalues();
  if (!(ev[1] > 1e-12 * ev[2])) throw Error(ErrorCode::DegenerateSample, "points are collinear");
  Vec3 normal = eig.eigenvectors().col(0).normalized();
  int axis = 0;
  normal.cwiseAbs().maxCoeff(&axis);
  if (normal[axis] < 0.0) normal = -normal;

  ShapeFit fit;
  fit.kind = FitKind::Plane;
  fit.normal = normal;
  fit.offset = normal.dot(centroid);
  fit.center = centroid;
  residuals(fit, pts);
  return fit;
}

double mesh_diameter(const TriMesh& mesh) {
  const auto& x = mesh.positions();
  const Vec3 g = mesh.barycenter();
  // Visit points by decreasing distance from g; |p_i - p_j| <= r_i + r_j prunes.
  std::vector<int> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = (x[i] - g).norm();
  std::sort(order.begin(), order.end(), [&](int a, int b) { return r[a] > r[b] || (r[a] == r[b] && a < b); });
  double best2 = 0.0;
  for (std::size_t a = 0; a < order.size(); ++a) {
    const int i = order[a];
    if ((r[i] + r[order[0]]) * (r[i] + r[order[0]]) <= best2) break;
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const int j = order[b];
      if ((r[i] + r[j]) * (r[i] + r[j]) <= best2) break;
      best2 = std::max(best2, (x[i] - x[j]).squaredNorm());
    }
  }
  return std::sqrt(best2);
}

RescaleReport rescale_diagnostics(const TriMesh& mesh, RescaleMode mode, double h) {
  RescaleReport rep;
  rep.mode = mode;
  rep.diameter = mesh_diameter(mesh);
  if (!(rep.diameter > 0.0)) throw Error(ErrorCode::DegenerateSample, "mesh has zero diameter");
  if (mode == RescaleMode::ByHeight && !(h > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "rescaling by height needs h > 0");
  }
  rep.scale = mode == RescaleMode::ByDiameter ? 1.0 / rep.diameter : 1.0 / h;
  rep.willmore_excess = willmore_energy(mesh) - 4.0 * std::numbers::pi;
  double length = 0.0;
  for (const auto& loop : mesh.loops()) length += loop_length(mesh, loop);
  rep.boundary_per_diameter = length / rep.diameter;

  Vec3 centroid = Vec3::Zero();
  for (const auto& p : mesh.positions()) centroid += p;
  centroid /= static_cast<double>(mesh.num_vertices());
  std::vector<Vec3> scaled;
  scaled.reserve(mesh.num_vertices());
  for (const auto& p : mesh.positions()) scaled.push_back(rep.scale * (p - centroid));
  rep.rescaled = mesh.with_positions(scaled);

  if (mode == RescaleMode::ByDiameter) {
    rep.fit = sphere_fit(scaled);
    rep.fitted_diameter = 2.0 * rep.fit.radius;
    rep.note = "sphere fit of this mesh only; convergence along a subsequence is not assessed";
  } else {
    rep.fit = plane_fit(scaled);
    rep.note = "plane fit of the mesh scaled by 1/h";
  }
  return rep;
}

}  // namespace wbl
