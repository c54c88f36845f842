#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "wbl/analytic.hpp"
#include "wbl/curvature.hpp"
#include "wbl/monotonicity.hpp"

using namespace wbl;
using wbl::test::kPi;

namespace {

ErrorCode error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

std::vector<double> geometric(double lo, double hi, int n) {
  std::vector<double> r(n);
  for (int k = 0; k < n; ++k) r[k] = lo * std::pow(hi / lo, double(k) / (n - 1));
  return r;
}

const TriMesh& unit_disk() {
  static const TriMesh m = flat_disk(1.0, {6, 24, 0});
  return m;
}

const TriMesh& unit_sphere() {
  static const TriMesh m = icosphere(Vec3::Zero(), 1.0, 4);
  return m;
}

}  // namespace

TEST(BallArea, FlatDiskCenter) {
  EXPECT_LT(wbl::test::relative(ball_area(unit_disk(), Vec3::Zero(), 0.5), kPi / 4), 2e-3);
}

TEST(BallArea, SphereCapIdentity) {
  const MonotoneEvaluator eval(unit_sphere());
  const Vec3 p0 = unit_sphere().position(7);
  for (double rho : {0.1, 0.5, 1.0, 1.5, 2.0}) {
    // The chordal ball of radius rho cuts a cap of area pi rho^2 from the unit sphere.
    EXPECT_LT(wbl::test::relative(eval.ball_area(p0, rho), kPi * rho * rho), 5e-3) << rho;
  }
}

TEST(BallArea, LargeBallGivesTotalAreaExactly) {
  const TriMesh m = truncated_sphere_mesh(1.3, 0.8, {24, 8, 0});
  const Vec3 p0(0.2, -0.1, 0.4);
  const double rho = m.extent() + (p0 - m.barycenter()).norm() + 1e-9;
  EXPECT_EQ(ball_area(m, p0, rho), m.total_area());
}

TEST(BallArea, Errors) {
  EXPECT_EQ(error_of([] { ball_area(unit_disk(), Vec3::Zero(), 0.0); }), ErrorCode::NonpositiveRadius);
  EXPECT_EQ(error_of([] { monotone_quantity(unit_disk(), Vec3::Zero(), -1.0); }), ErrorCode::NonpositiveRadius);
  EXPECT_EQ(error_of([] { monotone_quantity(unit_disk(), Vec3(1, 0, 0), 0.5); }), ErrorCode::BasePointOnBoundary);
}

TEST(MonotoneQuantity, FlatDiskIsConstantPi) {
  const MonotoneEvaluator eval(unit_disk());
  for (double rho : geometric(0.05, 3.0, 12)) {
    const MonotoneSample s = eval.quantity(Vec3::Zero(), rho);
    EXPECT_LT(wbl::test::relative(s.total, kPi), 5e-3) << rho;
    if (rho < 0.99) {
      EXPECT_EQ(s.boundary_remainder, 0.0);
    }
  }
  // Beyond the disk the boundary term makes up the missing area ratio.
  const MonotoneSample far = eval.quantity(Vec3::Zero(), 2.0);
  EXPECT_NEAR(far.boundary_remainder, 0.75 * kPi, 5e-3);
}

TEST(MonotoneQuantity, UnitSphereIsConstantPi) {
  const MonotoneEvaluator eval(unit_sphere());
  for (int v : {0, 100, 1234}) {
    const Vec3 p0 = unit_sphere().position(v);
    for (double rho : geometric(0.05, 3.0, 10)) {
      EXPECT_LT(wbl::test::relative(eval.quantity(p0, rho).total, kPi), 1e-2) << v << " " << rho;
    }
  }
}

TEST(MonotoneQuantity, BoundaryTermVanishesAwayFromBoundary) {
  const TriMesh m = catenoid_mesh(1, 0.4, {48, 12, 0});
  const Vec3 p0 = snap_to_vertex(m, Vec3(1, 0, 0));
  for (double rho : {0.05, 0.1, 0.2}) EXPECT_EQ(monotone_quantity(m, p0, rho).boundary_remainder, 0.0);
  EXPECT_NE(monotone_quantity(m, p0, 1.0).boundary_remainder, 0.0);
}

TEST(MonotoneProfile, TruncatedSphereApexHasNoViolations) {
  const TriMesh m = truncated_sphere_mesh(1, 1, {96, 32, 0});
  const Vec3 p0 = snap_to_vertex(m, Vec3(std::sqrt(2.0), 0, 0));
  const MonotoneProfile prof = monotone_profile(m, p0, geometric(0.05, 4.0, 12));
  EXPECT_TRUE(prof.monotone());
  EXPECT_EQ(prof.samples.size(), 12u);
}

TEST(MonotoneProfile, ViolationsShrinkUnderRefinement) {
  const std::vector<double> radii = geometric(0.05, 4.0, 24);
  MonotoneOptions strict;
  strict.tau_rel = 1e-4;
  auto count = [&](int n) {
    const TriMesh m = truncated_sphere_mesh(1, 1, {n, n / 2, 0});
    const Vec3 p0 = snap_to_vertex(m, Vec3(0.5, 0.8, 0.3));
    return monotone_profile(m, p0, radii, strict).violations.size();
  };
  const std::size_t coarse = count(6), fine = count(96);
  EXPECT_GT(coarse, 0u);
  EXPECT_LT(fine, coarse);
}

TEST(MonotoneProfile, RejectsUnorderedRadii) {
  EXPECT_EQ(error_of([] { monotone_profile(unit_disk(), Vec3::Zero(), {0.2, 0.1}); }), ErrorCode::InvalidInput);
}

TEST(MonotoneProfile, RandomInteriorPoints) {
  std::mt19937_64 rng(2024);
  const TriMesh m = catenoid_mesh(1, 0.4, {96, 24, 0});
  const MonotoneEvaluator eval(m);
  std::vector<int> interior;
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (!m.is_boundary_vertex(v)) interior.push_back(v);
  }
  for (int trial = 0; trial < 5; ++trial) {
    const int v = interior[std::uniform_int_distribution<std::size_t>(0, interior.size() - 1)(rng)];
    EXPECT_TRUE(eval.profile(m.position(v), geometric(0.05, 4.0, 12)).monotone()) << v;
  }
}

TEST(MonotoneIdentity, TelescopesBetweenRadii) {
  const TriMesh m = truncated_sphere_mesh(1.2, 0.7, {96, 32, 0});
  const MonotoneEvaluator eval(m);
  const Vec3 p0 = snap_to_vertex(m, Vec3(0.3, 1.0, 0.1));
  for (auto [sigma, rho] : {std::pair{0.1, 0.5}, {0.2, 1.5}, {0.5, 3.0}}) {
    const double lhs = eval.quantity(p0, sigma).total + eval.annulus_integral(p0, sigma, rho);
    EXPECT_LT(wbl::test::relative(lhs, eval.quantity(p0, rho).total), 0.02) << sigma << " " << rho;
  }
}

TEST(MonotoneIdentity, SphereAnnulusVanishes) {
  const MonotoneEvaluator eval(unit_sphere());
  for (int v : {3, 500, 2000}) {
    EXPECT_LT(std::abs(eval.annulus_integral(unit_sphere().position(v), 0.05, INFINITY)), 0.01 * kPi);
  }
}

TEST(MonotoneIdentity, LimitBeyondTheMesh) {
  const TriMesh m = catenoid_mesh(1.3, 0.5, {96, 24, 0});
  const MonotoneEvaluator eval(m);
  const Vec3 p0 = snap_to_vertex(m, Vec3(1.0, 0.2, 0.0));
  const double limit = 0.25 * eval.field_energy() + 0.5 * eval.boundary_flux(p0);
  const double reach = m.extent() + (p0 - m.barycenter()).norm();
  for (double f : {2.0, 10.0, 1000.0}) {
    EXPECT_LT(std::abs(eval.quantity(p0, f * reach).total - limit), 1e-3 * std::abs(limit)) << f;
  }
}

TEST(BoundaryIdentity, FlatDiskCenter) {
  const BoundaryIdentityTerms t = boundary_identity_terms(unit_disk(), Vec3::Zero());
  EXPECT_NEAR(t.density, 1.0, 1e-3);
  EXPECT_NEAR(t.lhs, 4 * kPi, 0.02 * 4 * kPi);
  EXPECT_NEAR(t.rhs, 4 * kPi, 0.02 * 4 * kPi);
  EXPECT_LT(t.residual, 0.02 * 4 * kPi);
}

TEST(BoundaryIdentity, ResidualShrinksUnderRefinement) {
  double disk_last = 1e300, hemi_last = 1e300;
  for (int rings : {10, 20, 40}) {
    const double d = boundary_identity_residual(flat_disk(1.0, {6, rings, 0}), Vec3::Zero());
    const double h = boundary_identity_residual(spherical_cap(1.0, kPi / 2, {6, rings, 0}), Vec3(0, 0, 1));
    EXPECT_LT(d, 0.5 * disk_last);
    EXPECT_LT(h, 0.5 * hemi_last);
    disk_last = d;
    hemi_last = h;
  }
  EXPECT_LT(hemi_last, 0.02 * 4 * kPi);
}

TEST(BoundaryIdentity, Preconditions) {
  EXPECT_EQ(error_of([] { boundary_identity_residual(unit_disk(), Vec3(0, 0, 0.5)); }), ErrorCode::BasePointOffSurface);
  EXPECT_EQ(error_of([] { boundary_identity_residual(unit_disk(), unit_disk().position(unit_disk().loops()[0].vertices[0])); }),
            ErrorCode::BasePointOnBoundary);
}

TEST(LowerBound, ReferenceSurfaces) {
  const LowerBoundTerms ts = lower_bound_terms(truncated_sphere_mesh(1, 1, {64, 16, 0}));
  EXPECT_GE(ts.gap, 0.0);
  EXPECT_NEAR(ts.boundary_length, 4 * kPi, 0.01);
  const LowerBoundTerms cyl = lower_bound_terms(cylinder_mesh(1, 5, {64, 64, 0}));
  EXPECT_GE(cyl.gap, 0.0);
  EXPECT_GE(cyl.willmore, 4 * kPi - 2 * cyl.boundary_length / cyl.distance);
  // Disk: equality case, up to discretization.
  double last = 1e300;
  for (int rings : {8, 16, 32}) {
    const LowerBoundTerms d = lower_bound_terms(flat_disk(1.0, {6, rings, 0}));
    EXPECT_LT(std::abs(d.gap), last);
    last = std::abs(d.gap);
  }
  EXPECT_LT(last, 0.01);
}

TEST(LowerBound, Errors) {
  EXPECT_EQ(error_of([] { lower_bound_gap(unit_sphere()); }), ErrorCode::NoBoundary);
  const TriMesh two = merge(flat_disk(1.0, {6, 4, 0}),
                            transformed(flat_disk(1.0, {6, 4, 0}), Eigen::Matrix3d::Identity(), Vec3(0, 0, 2)));
  EXPECT_EQ(error_of([&] { lower_bound_gap(two); }), ErrorCode::Disconnected);
}
