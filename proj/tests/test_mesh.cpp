#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"
#include "wbl/analytic.hpp"
#include "wbl/curvature.hpp"
#include "wbl/obj_io.hpp"
#include "oracle_values.hpp"

using namespace wbl;
using wbl::test::kPi;

namespace {

ErrorCode build_error(std::vector<Vec3> p, std::vector<Face> f) {
  try {
    build_mesh(std::move(p), std::move(f));
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;  // sentinel: no error
}

TriMesh flat_annulus(int n, double r0, double r1) {
  std::vector<Vec3> p;
  std::vector<Face> f;
  for (int k = 0; k < n; ++k) {
    const double t = 2 * kPi * k / n;
    p.emplace_back(r0 * std::cos(t), r0 * std::sin(t), 0);
    p.emplace_back(r1 * std::cos(t), r1 * std::sin(t), 0);
  }
  for (int k = 0; k < n; ++k) {
    const int a = 2 * k, b = 2 * k + 1, c = 2 * ((k + 1) % n), d = c + 1;
    f.push_back({a, b, d});
    f.push_back({a, d, c});
  }
  return build_mesh(p, f);
}

}  // namespace

TEST(BuildMesh, SingleTriangleHasOneBoundaryLoop) {
  const TriMesh m = build_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  ASSERT_EQ(m.loops().size(), 1u);
  EXPECT_EQ(m.loops()[0].size(), 3u);
  EXPECT_EQ(boundary_loops(m).size(), 1u);
}

TEST(BuildMesh, RejectsInconsistentOrientation) {
  EXPECT_EQ(build_error({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}, {{0, 1, 2}, {1, 2, 3}}),
            ErrorCode::InconsistentOrientation);
}

TEST(BuildMesh, RejectsNonManifoldEdge) {
  EXPECT_EQ(build_error({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}},
                        {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}),
            ErrorCode::NonManifoldEdge);
}

TEST(BuildMesh, RejectsBowtieVertex) {
  EXPECT_EQ(build_error({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}}, {{0, 1, 2}, {0, 3, 4}}),
            ErrorCode::NonManifoldVertex);
}

TEST(BuildMesh, RejectsDegenerateAndRepeatedFaces) {
  EXPECT_EQ(build_error({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}}), ErrorCode::DegenerateFace);
  EXPECT_EQ(build_error({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 1}}), ErrorCode::DegenerateFace);
  EXPECT_EQ(build_error({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 3}}), ErrorCode::InvalidInput);
}

TEST(BuildMesh, IcosahedronIsClosed) {
  const TriMesh m = icosphere(Vec3::Zero(), 1.0, 0);
  EXPECT_EQ(m.num_vertices(), 12);
  EXPECT_EQ(m.num_faces(), 20);
  EXPECT_TRUE(m.loops().empty());
  EXPECT_EQ(m.euler_characteristic(), 2);
}

TEST(BoundaryLoops, AnnulusHasTwoDisjointLoops) {
  const TriMesh m = flat_annulus(24, 0.5, 1.0);
  const auto loops = boundary_loops(m);
  ASSERT_EQ(loops.size(), 2u);
  std::vector<int> seen(m.num_vertices(), 0);
  std::size_t total = 0;
  for (const auto& l : loops) {
    for (int v : l.vertices) ++seen[v];
    total += l.size();
  }
  EXPECT_EQ(total, 48u);
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(BoundaryLoops, CylinderLoopsLieOnTheCircles) {
  const TriMesh m = cylinder_mesh(1.5, 0.7, {32, 8, 0});
  ASSERT_EQ(m.loops().size(), 2u);
  for (const auto& loop : m.loops()) {
    const double z = m.position(loop.vertices[0]).z();
    const double r = z > 0 ? 1.0 : 1.5;
    for (int v : loop.vertices) {
      const Vec3& p = m.position(v);
      EXPECT_NEAR(std::hypot(p.x(), p.y()), r, 1e-12);
      EXPECT_NEAR(std::abs(p.z()), 0.7, 1e-12);
    }
  }
}

TEST(MeanCurvature, UnitSphereNormalization) {
  const TriMesh m = icosphere(Vec3::Zero(), 1.0, 4);
  const VertexField H = mean_curvature_vectors(m);
  double norm_sq = 0, angle_sq = 0;
  for (int v = 0; v < m.num_vertices(); ++v) {
    norm_sq += std::pow(H[v].norm() - 1.0, 2);
    const double c = std::clamp(H[v].normalized().dot(-m.position(v).normalized()), -1.0, 1.0);
    angle_sq += std::pow(std::acos(c) * 180.0 / kPi, 2);
  }
  EXPECT_LT(std::sqrt(norm_sq / m.num_vertices()), 0.01);
  EXPECT_LT(std::sqrt(angle_sq / m.num_vertices()), 1.0);
}

TEST(MeanCurvature, FlatDiskIsZeroAndBoundaryFlagged) {
  const TriMesh m = flat_disk(1.0, {64, 12, 0});
  const VertexField H = mean_curvature_vectors(m);
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (m.is_boundary_vertex(v)) {
      EXPECT_TRUE(H.on_boundary(v));
      EXPECT_EQ(H[v], Vec3::Zero());
    } else {
      EXPECT_LT(H[v].norm(), 1e-10);
    }
  }
}

TEST(MeanCurvature, ScalesInverselyWithSize) {
  const TriMesh m = icosphere(Vec3::Zero(), 1.0, 3);
  const VertexField H1 = mean_curvature_vectors(m);
  const VertexField H2 = mean_curvature_vectors(icosphere(Vec3::Zero(), 2.0, 3));
  double mean = 0;
  for (int v = 0; v < m.num_vertices(); ++v) mean += H2[v].norm() / m.num_vertices();
  EXPECT_NEAR(mean, 0.5, 0.01);
  for (double lambda : {0.1, 10.0}) {
    const VertexField Hs = mean_curvature_vectors(transformed(m, Eigen::Matrix3d::Identity(), Vec3::Zero(), lambda));
    for (int v = 0; v < m.num_vertices(); ++v) {
      EXPECT_LT(wbl::test::relative(Hs[v].norm(), H1[v].norm() / lambda), 1e-10);
    }
  }
}

TEST(Willmore, IcosphereRefinementConverges) {
  double last = 1e300;
  for (int n = 2; n <= 5; ++n) {
    const double err = std::abs(willmore_energy(icosphere(Vec3::Zero(), 1.0, n)) - 4 * kPi);
    EXPECT_LT(err, last) << "subdivision " << n;
    last = err;
    if (n == 4) {
      EXPECT_LT(err, 0.02 * 4 * kPi);
    }
  }
}

TEST(Willmore, FlatDiskIsZero) { EXPECT_LT(willmore_energy(flat_disk(1.0, {64, 12, 0})), 1e-18); }

TEST(Willmore, CatenoidEnergyHalvesUnderRefinement) {
  const double coarse = willmore_energy(catenoid_mesh(1.0, 0.4, {0, 0, 0.1}));
  const double fine = willmore_energy(catenoid_mesh(1.0, 0.4, {0, 0, 0.05}));
  EXPECT_LT(fine, 0.5 * coarse);
  EXPECT_LT(fine, 1e-2);
}

TEST(Willmore, RigidMotionAndScaleInvariance) {
  std::mt19937_64 rng(11);
  const TriMesh base = wbl::test::perturbed(truncated_sphere_mesh(1.3, 0.8, {24, 8, 0}), 0.02, rng);
  const double W = willmore_energy(base), gb = gauss_bonnet_residual(base), II = second_form_norm_sq(base);
  for (int trial = 0; trial < 5; ++trial) {
    const TriMesh m = transformed(base, wbl::test::random_rotation(rng), wbl::test::random_vector(rng, 5.0));
    EXPECT_LT(wbl::test::relative(willmore_energy(m), W), 1e-10);
    EXPECT_LT(std::abs(gauss_bonnet_residual(m) - gb), 1e-10);
    EXPECT_LT(wbl::test::relative(second_form_norm_sq(m), II), 1e-10);
  }
  for (double lambda : {0.1, 1.0, 10.0}) {
    const TriMesh m = transformed(base, Eigen::Matrix3d::Identity(), Vec3::Zero(), lambda);
    EXPECT_LT(wbl::test::relative(willmore_energy(m), W), 1e-10);
  }
}

TEST(Conormal, FlatDiskIsRadial) {
  const TriMesh m = flat_disk(1.0, {64, 10, 0});
  const BoundaryData bd = conormal_field(m);
  for (std::size_t s = 0; s < bd.size(); ++s) {
    const Vec3 p = m.position(bd.vertices[s]);
    EXPECT_LT((bd.conormals[s] - p.normalized()).norm(), 1e-6);
  }
}

TEST(Conormal, HemisphereEquatorPointsDown) {
  const TriMesh m = spherical_cap(1.0, kPi / 2, {128, 40, 0});
  const BoundaryData bd = conormal_field(m);
  double worst = 0;
  for (const Vec3& co : bd.conormals) worst = std::max(worst, (co - Vec3(0, 0, -1)).norm());
  EXPECT_LT(worst, 1e-3);
}

TEST(Conormal, CylinderIsAxialUnderRefinement) {
  double last = 1e300;
  for (int k : {1, 2, 4}) {
    const TriMesh m = cylinder_mesh(1.0, 0.5, {48 * k, 8 * k, 0});
    const BoundaryData bd = conormal_field(m);
    double worst = 0;
    for (std::size_t s = 0; s < bd.size(); ++s) {
      const double z = m.position(bd.vertices[s]).z();
      worst = std::max(worst, (bd.conormals[s] - Vec3(0, 0, z > 0 ? 1 : -1)).norm());
    }
    EXPECT_LT(worst, 2e-4);
    EXPECT_LT(worst, 0.25 * last);
    last = worst;
  }
}

TEST(Conormal, UnitOrthogonalAndPartitionsLength) {
  std::mt19937_64 rng(5);
  const TriMesh m = wbl::test::perturbed(catenoid_mesh(1.2, 0.45, {40, 10, 0}), 0.01, rng);
  const BoundaryData bd = conormal_field(m);
  for (std::size_t s = 0; s < bd.size(); ++s) {
    EXPECT_NEAR(bd.conormals[s].norm(), 1.0, 1e-12);
    EXPECT_LT(std::abs(bd.conormals[s].dot(bd.tangents[s])), 1e-8);
  }
  ASSERT_EQ(bd.num_loops(), m.loops().size());
  for (std::size_t k = 0; k < bd.num_loops(); ++k) {
    double sum = 0;
    for (int s = bd.loop_offsets[k]; s < bd.loop_offsets[k + 1]; ++s) sum += bd.dual_lengths[s];
    EXPECT_NEAR(sum, loop_length(m, m.loops()[k]), 1e-12 * sum);
  }
  EXPECT_THROW(conormal_field(icosphere(Vec3::Zero(), 1, 1)), Error);
}

TEST(GaussBonnet, IdentityHoldsForEveryTopology) {
  const TriMesh ico = icosphere(Vec3::Zero(), 1.0, 3);
  const TriMesh cyl = cylinder_mesh(1.0, 1.0, {32, 8, 0});
  const TriMesh disk = flat_disk(1.0, {32, 6, 0});
  EXPECT_EQ(ico.euler_characteristic(), 2);
  EXPECT_EQ(cyl.euler_characteristic(), 0);
  EXPECT_EQ(disk.euler_characteristic(), 1);
  std::mt19937_64 rng(3);
  for (const TriMesh& m : {ico, cyl, disk, wbl::test::perturbed(cyl, 0.05, rng)}) {
    EXPECT_LT(gauss_bonnet_residual(m), 1e-9);
  }
}

TEST(SecondForm, ReferenceValues) {
  EXPECT_LT(wbl::test::relative(second_form_norm_sq(icosphere(Vec3::Zero(), 1.0, 5)), 8 * kPi), 0.01);
  EXPECT_LT(std::abs(second_form_norm_sq(flat_disk(1.0, {32, 8, 0}))), 1e-12);
  // Catenoid: |II|^2 integrates to -2 int K. The interior-only sum misses
  // the boundary ring, a first-order error.
  double last = 1e300;
  for (int k : {1, 2, 4}) {
    const double cat = second_form_norm_sq(catenoid_mesh(1.0, 0.4, {64 * k, 16 * k, 0}));
    const double err = wbl::test::relative(cat, -2 * oracle::kCatenoidIntK04);
    EXPECT_LT(err, 0.55 * last);
    last = err;
  }
  EXPECT_LT(last, 0.02);
}

TEST(FirstVariation, ReferenceFields) {
  const TriMesh disk = flat_disk(1.0, {32, 8, 0});
  EXPECT_EQ(first_variation_residual(disk, VertexField(disk.num_vertices())), 0.0);
  double last = 1e300;
  for (int rings : {8, 16, 32}) {
    const TriMesh m = flat_disk(1.0, {32, rings, 0});
    const double r = first_variation_residual(m, VertexField(m.positions()));
    EXPECT_LT(r, last);
    last = r;
  }
  EXPECT_LT(last, 1e-2);
  const TriMesh ico = icosphere(Vec3::Zero(), 1.0, 3);
  EXPECT_LT(first_variation_residual(ico, VertexField(ico.num_vertices(), Vec3(0.3, -1.0, 2.0))), 1e-10);
  EXPECT_THROW(first_variation_residual(ico, VertexField(3)), Error);
}

TEST(ObjIo, RoundTripIsBitStable) {
  std::mt19937_64 rng(9);
  const TriMesh m = wbl::test::perturbed(truncated_sphere_mesh(1.0, 1.0, {16, 6, 0}), 0.01, rng);
  std::stringstream ss;
  write_obj(ss, m);
  const TriMesh back = read_obj(ss);
  ASSERT_EQ(back.num_vertices(), m.num_vertices());
  EXPECT_EQ(back.faces(), m.faces());
  for (int v = 0; v < m.num_vertices(); ++v) EXPECT_EQ(back.position(v), m.position(v));
  std::stringstream bad("v 0 0 0\nv 1 0 0\nf 1 2\n");
  EXPECT_THROW(read_obj(bad), Error);
}
