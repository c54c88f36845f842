#pragma once

#include <string>
#include <vector>

#include "wbl/mesh.hpp"

namespace wbl {

enum class BoundaryMode { Navier, Clamped };

/// Boundary vertices are always pinned. Clamped mode adds the penalty
/// 1/2 lambda sum_s |co_s - target_s|^2 l_s over boundary slots s, in the
/// slot order of conormal_field.
struct BoundaryCondition {
  BoundaryMode mode = BoundaryMode::Navier;
  std::vector<int> boundary_vertices;  // slot order; empty skips the check in navier mode
  std::vector<Vec3> targets;
  double lambda = 0.0;

  static BoundaryCondition navier(const TriMesh& mesh);
  static BoundaryCondition clamped(const TriMesh& mesh, std::vector<Vec3> targets, double lambda);
  /// Targets are the mesh's current conormals.
  static BoundaryCondition clamped_to_current(const TriMesh& mesh, double lambda);

  /// Throws InvalidConfig (lambda, target norms) or BoundaryMismatch.
  void check(const TriMesh& mesh) const;
};

struct ObjectiveValue {
  double total = 0.0;
  double willmore = 0.0;
  double penalty = 0.0;
  double conormal_deviation = 0.0;  // sum |co - target|^2 l, clamped only
};

ObjectiveValue evaluate_objective(const TriMesh& mesh, const BoundaryCondition& bc);
double objective(const TriMesh& mesh, const BoundaryCondition& bc);

/// Exact gradient of the objective with respect to vertex positions, with
/// boundary rows zeroed. Conormal targets, tangents and dual lengths depend
/// on boundary positions only and are constants here.
VertexField gradient(const TriMesh& mesh, const BoundaryCondition& bc);

struct FlowConfig {
  int max_iters = 500;
  // First trial step moves the fastest vertex by this many mean edge lengths.
  double initial_step = 0.1;
  // Cap on any single vertex displacement per step, in mean edge lengths.
  double max_move = 0.5;
  double backtrack = 0.5;
  double armijo = 1e-4;
  double grad_tol = 1e-9;
  // Steps are rejected if a face area drops below eps_flow_factor * initial min face area.
  double eps_flow_factor = 1e-6;
  // Smallest trial displacement, in mean edge lengths, before giving up.
  double min_move = 1e-13;
  // Quasi-Newton memory; 0 gives plain steepest descent.
  int lbfgs_history = 8;

  /// Throws InvalidConfig.
  void validate() const;
};

enum class Termination { GradientTolerance, MaxIterations, LineSearchFailed };
std::string to_string(Termination t);

struct FlowRecord {
  int iter = 0;
  double objective = 0.0;
  double willmore = 0.0;
  double penalty = 0.0;
  double grad_norm = 0.0;  // max over vertices of |g_i|
  double step = 0.0;       // accepted step length along the search direction
};

struct FlowTrace {
  std::vector<FlowRecord> records;  // records[0] is the initial state
  Termination termination = Termination::MaxIterations;
  int rejected_steps = 0;           // trial steps refused by the face-area guard
  double eps_flow = 0.0;

  bool strictly_decreasing() const;
};

struct FlowResult {
  TriMesh mesh;  // best mesh reached
  FlowTrace trace;
};

/// Armijo backtracking descent over interior vertices. A failed line search
/// is reported through trace.termination with the best mesh so far.
FlowResult minimize(const TriMesh& mesh, const BoundaryCondition& bc, const FlowConfig& config = {});

}  // namespace wbl
