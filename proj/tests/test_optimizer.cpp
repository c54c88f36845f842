#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "wbl/analytic.hpp"
#include "wbl/curvature.hpp"
#include "wbl/error.hpp"
#include "wbl/metrics.hpp"
#include "wbl/monotonicity.hpp"
#include "wbl/optimizer.hpp"

using namespace wbl;
using wbl::test::kPi;

using wbl::test::random_config;
using wbl::test::tilted_targets;

TEST(Objective, ReferenceValues) {
  const TriMesh disk = flat_disk(1.0, {6, 12, 0});
  EXPECT_NEAR(objective(disk, BoundaryCondition::navier(disk)), 0.0, 1e-20);
  EXPECT_NEAR(objective(disk, BoundaryCondition::clamped_to_current(disk, 3.0)), 0.0, 1e-20);
  std::vector<Vec3> flipped = conormal_field(disk).conormals;
  for (auto& c : flipped) c = -c;
  const double lambda = 3.0;
  const ObjectiveValue v = evaluate_objective(disk, BoundaryCondition::clamped(disk, flipped, lambda));
  // Dual lengths sum to the polygon perimeter.
  const double perimeter = 2.0 * 72 * std::sin(kPi / 72);
  EXPECT_NEAR(v.penalty, 0.5 * lambda * 4.0 * perimeter, 1e-10);
  EXPECT_NEAR(v.penalty, 0.5 * lambda * 4.0 * 2.0 * kPi, 0.5 * lambda * 4.0 * 2.0 * kPi * 2e-3);
  EXPECT_NEAR(v.conormal_deviation, 4.0 * perimeter, 1e-10);
}

TEST(Objective, Errors) {
  const TriMesh disk = flat_disk(1.0, {6, 4, 0});
  const TriMesh cyl = cylinder_mesh(1.0, 0.5, {12, 3, 0});
  EXPECT_THROW(objective(cyl, BoundaryCondition::navier(disk)), Error);
  EXPECT_THROW(objective(cyl, BoundaryCondition::clamped_to_current(disk, 1.0)), Error);
  EXPECT_THROW(BoundaryCondition::clamped_to_current(disk, 0.0).check(disk), Error);
  std::vector<Vec3> bad = conormal_field(disk).conormals;
  bad[0] *= 2.0;
  EXPECT_THROW(BoundaryCondition::clamped(disk, bad, 1.0).check(disk), Error);
  try {
    objective(cyl, BoundaryCondition::navier(disk));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundaryMismatch);
  }
  FlowConfig cfg;
  cfg.backtrack = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.max_iters = 0;
  EXPECT_THROW(minimize(disk, BoundaryCondition::navier(disk), cfg), Error);
}

TEST(Gradient, MatchesFiniteDifferencesNavier) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const TriMesh m = random_config(rng, trial);
    const double err = wbl::test::gradient_fd_error(m, BoundaryCondition::navier(m), 1e-6 * mesh_diameter(m));
    EXPECT_LT(err, 1e-5) << "trial " << trial;
  }
}

TEST(Gradient, MatchesFiniteDifferencesClamped) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const TriMesh m = random_config(rng, trial);
    const double err =
        wbl::test::gradient_fd_error(m, tilted_targets(m, rng, 0.5 + trial), 1e-6 * mesh_diameter(m));
    EXPECT_LT(err, 1e-5) << "trial " << trial;
  }
}

TEST(Gradient, VanishesOnFlatDiskAndOnBoundary) {
  const TriMesh disk = flat_disk(1.0, {6, 10, 0});
  const VertexField g = gradient(disk, BoundaryCondition::navier(disk));
  for (std::size_t v = 0; v < g.size(); ++v) EXPECT_LT(g[v].norm(), 1e-12);
  std::mt19937_64 rng(3);
  const TriMesh m = random_config(rng, 1);
  const VertexField gm = gradient(m, tilted_targets(m, rng, 2.0));
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (m.is_boundary_vertex(v)) {
      EXPECT_EQ(gm[v], Vec3::Zero());
    }
  }
}

TEST(Gradient, TranslationEquivariant) {
  std::mt19937_64 rng(11);
  const TriMesh m = wbl::test::perturbed(spherical_cap(1.0, 2.0, {8, 8, 0}), 0.02, rng);
  const TriMesh moved = transformed(m, Eigen::Matrix3d::Identity(), Vec3(0.3, -1.2, 0.7));
  const VertexField a = gradient(m, BoundaryCondition::navier(m));
  const VertexField b = gradient(moved, BoundaryCondition::navier(moved));
  double worst = 0.0, scale = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    worst = std::max(worst, (a[v] - b[v]).norm());
    scale = std::max(scale, a[v].norm());
  }
  EXPECT_LT(worst, 1e-10 * std::max(scale, 1.0));
}

TEST(Minimize, MonotoneDescentPinsBoundaryKeepsFaces) {
  std::mt19937_64 rng(5);
  FlowConfig cfg;
  cfg.max_iters = 40;
  for (int trial = 0; trial < 8; ++trial) {
    const TriMesh m = random_config(rng, trial);
    const BoundaryCondition bc = trial % 2 ? tilted_targets(m, rng, 1.0) : BoundaryCondition::navier(m);
    const FlowResult r = minimize(m, bc, cfg);
    EXPECT_TRUE(r.trace.strictly_decreasing()) << "trial " << trial;
    ASSERT_GE(r.trace.records.size(), 2u);
    EXPECT_LT(r.trace.records.back().objective, r.trace.records.front().objective);
    EXPECT_EQ(r.mesh.faces(), m.faces());
    for (int v = 0; v < m.num_vertices(); ++v) {
      if (m.is_boundary_vertex(v)) {
        EXPECT_EQ(r.mesh.position(v), m.position(v));
      }
    }
    EXPECT_NEAR(objective(r.mesh, bc), r.trace.records.back().objective, 1e-12);
  }
}

TEST(Minimize, SteepestDescentAlsoDescends) {
  std::mt19937_64 rng(9);
  const TriMesh m = random_config(rng, 2);
  FlowConfig cfg;
  cfg.max_iters = 30;
  cfg.lbfgs_history = 0;
  const FlowResult r = minimize(m, BoundaryCondition::navier(m), cfg);
  EXPECT_TRUE(r.trace.strictly_decreasing());
  EXPECT_LT(r.trace.records.back().objective, r.trace.records.front().objective);
}

TEST(Minimize, ClampedDeviationShrinksAsLambdaGrows) {
  // Targets tilted away from a truncated sphere; stronger penalties must track them better.
  std::mt19937_64 rng(13);
  const TriMesh m = truncated_sphere_mesh(1.0, 0.8, {24, 8, 0});
  std::vector<Vec3> targets = conormal_field(m).conormals;
  for (auto& c : targets) c = (c + Vec3(0, 0, 0.3 * (c.z() > 0 ? -1 : 1))).normalized();
  FlowConfig cfg;
  cfg.max_iters = 300;
  double last = INFINITY;
  for (double lambda : {0.1, 1.0, 10.0}) {
    const BoundaryCondition bc = BoundaryCondition::clamped(m, targets, lambda);
    const FlowResult r = minimize(m, bc, cfg);
    const double dev = evaluate_objective(r.mesh, bc).conormal_deviation;
    EXPECT_LT(dev, last) << "lambda " << lambda;
    last = dev;
  }
}

TEST(Minimize, TruncatedSphereStaysBelowFourPi) {
  const TriMesh m = truncated_sphere_mesh(1.0, 1.0, {48, 16, 0});
  FlowConfig cfg;
  cfg.max_iters = 200;
  const FlowResult r = minimize(m, BoundaryCondition::navier(m), cfg);
  EXPECT_TRUE(r.trace.strictly_decreasing());
  EXPECT_LE(willmore_energy(r.mesh), 8.886);
  EXPECT_LT(willmore_energy(r.mesh), 4 * kPi);
}

TEST(Minimize, CylinderAboveCriticalHeightRespectsLowerBound) {
  const TriMesh m = cylinder_mesh(1.0, 0.7, {32, 8, 0});
  FlowConfig cfg;
  cfg.max_iters = 300;
  const FlowResult r = minimize(m, BoundaryCondition::navier(m), cfg);
  const LowerBoundTerms lb = lower_bound_terms(r.mesh);
  EXPECT_GT(lb.willmore, 0.0);
  EXPECT_GE(lb.willmore, 4 * kPi - 2 * lb.boundary_length / lb.distance);
  EXPECT_GE(lb.gap, 0.0);
}
