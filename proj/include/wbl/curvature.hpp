#pragma once

#include <vector>

#include "wbl/mesh.hpp"

namespace wbl {

/// Cotangent Laplacian of the embedding, (L p)_i = 1/2 sum_j (cot a_ij + cot b_ij)(p_j - p_i).
/// Evaluated at every vertex; only interior values approximate A_i * Laplace(p).
std::vector<Vec3> cotan_laplacian(const TriMesh& mesh);

/// Mean curvature vector H_i = (L p)_i / (2 A_i) at interior vertices. With
/// this normalization a unit sphere has |H| = 1 with H pointing to the
/// centre. Boundary vertices hold zero and are flagged.
/// Throws ZeroMixedArea when an interior vertex has A_i below the mesh's
/// area epsilon.
VertexField mean_curvature_vectors(const TriMesh& mesh);

/// Sum over interior vertices of |H_i|^2 A_i.
double willmore_energy(const TriMesh& mesh);

/// Conormals at boundary vertices. At a boundary vertex the area gradient is
/// -(L p)_i = co * l_i - 2 H A_i to leading order, so the conormal is taken
/// as -(L p)_i + 2 H~_i A_i projected orthogonally to the central-difference
/// loop tangent and normalized, with H~_i the average H of interior
/// neighbours. Falls back to t x n (area-weighted normal) when that vector
/// vanishes. Throws NoBoundary on closed meshes.
BoundaryData conormal_field(const TriMesh& mesh);

/// Interior: 2 pi - angle sum. Boundary: pi - angle sum.
std::vector<double> angle_defects(const TriMesh& mesh);

/// |sum of defects - 2 pi chi|, zero up to roundoff for every mesh.
double gauss_bonnet_residual(const TriMesh& mesh);

/// 4 W - 2 sum_interior K_i A_i, the discrete counterpart of the integral
/// of |II|^2 through |II|^2 = 4|H|^2 - 2K.
double second_form_norm_sq(const TriMesh& mesh);

/// | integral div_T X + 2 sum <H_i, X_i> A_i - sum_boundary <X_i, co_i> l_i |
/// for the piecewise-linear field X. Throws FieldLengthMismatch.
double first_variation_residual(const TriMesh& mesh, const VertexField& field);

/// H extended to boundary vertices by averaging the interior one-ring values;
/// used where a surface field (rather than the interior-only energy) is
/// integrated, e.g. over balls in the monotonicity module.
VertexField extended_mean_curvature(const TriMesh& mesh);

}  // namespace wbl
